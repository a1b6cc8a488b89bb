#include "fraisse/search.hpp"

#include <exception>
#include <thread>
#include <vector>

#include "fraisse/error.hpp"

namespace fraisse {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::SignatureMismatch: return "SignatureMismatch";
        case ErrorCode::SignatureOverlap: return "SignatureOverlap";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::NotBijective: return "NotBijective";
        case ErrorCode::BoundExceeded: return "BoundExceeded";
        case ErrorCode::UnknownRelation: return "UnknownRelation";
        case ErrorCode::TransitivityOnNonBinary: return "TransitivityOnNonBinary";
        case ErrorCode::NonBinarySignature: return "NonBinarySignature";
        case ErrorCode::NotAmalgamation: return "NotAmalgamation";
        case ErrorCode::NotParameterFree: return "NotParameterFree";
        case ErrorCode::NotReductive: return "NotReductive";
        case ErrorCode::CapacityExceeded: return "CapacityExceeded";
        case ErrorCode::UnderCertifiedTarget: return "UnderCertifiedTarget";
        case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
        case ErrorCode::WitnessMissing: return "WitnessMissing";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::Parse: return "ParseError";
        case ErrorCode::Usage: return "UsageError";
    }
    return "Error";
}

void Budget::charge(std::uint64_t nodes) {
    auto before = used_.fetch_add(nodes, std::memory_order_relaxed);
    if (before + nodes > limit_) throw Error(ErrorCode::BoundExceeded, "search budget of " + std::to_string(limit_) + " nodes exhausted");
}

void parallel_for(unsigned jobs, std::size_t count, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace fraisse
