#include "fraisse/enumerate.hpp"

#include <map>
#include <mutex>
#include <set>

#include "fraisse/completion.hpp"
#include "fraisse/error.hpp"

namespace fraisse {

namespace {

std::vector<FiniteStructure> sorted_canonical(std::set<std::vector<std::uint8_t>>& seen, std::vector<FiniteStructure>& reps) {
    std::map<std::vector<std::uint8_t>, FiniteStructure> ordered;
    for (auto& s : reps) ordered.emplace(s.encoding(), std::move(s));
    std::vector<FiniteStructure> out;
    for (auto& [k, s] : ordered) out.push_back(std::move(s));
    seen.clear();
    return out;
}

std::string cache_key(const ClassSpec& spec, int size) {
    std::string key = spec.name + "|";
    for (const auto& r : spec.signature) key += r.name + "/" + std::to_string(r.arity) + ",";
    key += "|";
    for (auto p : spec.properties) key += std::to_string(p) + ",";
    key += "|" + std::to_string(spec.customs.size()) + "|" + std::to_string(size);
    return key;
}

std::mutex cache_mu;
std::map<std::string, std::vector<FiniteStructure>>& cache() {
    static std::map<std::string, std::vector<FiniteStructure>> c;
    return c;
}

}  // namespace

std::vector<FiniteStructure> enumerate_structures(const ClassSpec& spec, int size, const SearchContext& ctx) {
    if (size < 0) throw Error(ErrorCode::OutOfRange, "negative size");
    const std::string key = cache_key(spec, size);
    const bool cached = ctx.budget == nullptr;
    if (cached) {
        std::lock_guard<std::mutex> lock(cache_mu);
        auto it = cache().find(key);
        if (it != cache().end()) return it->second;
    }
    std::vector<FiniteStructure> out;
    if (size == 0) {
        out.push_back(FiniteStructure(spec.signature, 0));
    } else {
        auto parents = enumerate_structures(spec, size - 1, ctx);
        std::set<std::vector<std::uint8_t>> seen;
        std::vector<FiniteStructure> reps;
        CompletionOptions opt;
        opt.check_fixed = false;
        for (const auto& parent : parents) {
            complete_members(spec, PartialStructure::extend(parent, 1), [&](const FiniteStructure& s) {
                ctx.charge();
                FiniteStructure c = canonical_form(s);
                if (seen.insert(c.encoding()).second) reps.push_back(std::move(c));
                return true;
            }, opt);
        }
        out = sorted_canonical(seen, reps);
    }
    if (cached) {
        std::lock_guard<std::mutex> lock(cache_mu);
        cache().emplace(key, out);
    }
    return out;
}

std::vector<FiniteStructure> enumerate_structures_bruteforce(const ClassSpec& spec, int size, const SearchContext& ctx) {
    std::set<std::vector<std::uint8_t>> seen;
    std::vector<FiniteStructure> reps;
    for (const auto& s : labeled_members(spec, size, ctx)) {
        FiniteStructure c = canonical_form(s);
        if (seen.insert(c.encoding()).second) reps.push_back(std::move(c));
    }
    return sorted_canonical(seen, reps);
}

std::vector<FiniteStructure> enumerate_up_to(const ClassSpec& spec, int bound, const SearchContext& ctx) {
    std::vector<FiniteStructure> out;
    for (int s = 0; s <= bound; ++s) {
        auto level = enumerate_structures(spec, s, ctx);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

}  // namespace fraisse
