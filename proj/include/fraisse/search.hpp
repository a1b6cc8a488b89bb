#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>

namespace fraisse {

// Shared node counter.  Charging past the limit throws BoundExceeded.
class Budget {
public:
    explicit Budget(std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()) : limit_(limit) {}

    void charge(std::uint64_t nodes = 1);
    std::uint64_t used() const { return used_.load(std::memory_order_relaxed); }
    std::uint64_t limit() const { return limit_; }

private:
    std::uint64_t limit_;
    std::atomic<std::uint64_t> used_{0};
};

struct SearchContext {
    Budget* budget = nullptr;
    unsigned jobs = 1;

    void charge(std::uint64_t nodes = 1) const {
        if (budget) budget->charge(nodes);
    }
};

// Runs body(i) for i in [0, count).  With jobs > 1 the indices are split
// round-robin over worker threads; the first exception (lowest index) is rethrown.
void parallel_for(unsigned jobs, std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fraisse
