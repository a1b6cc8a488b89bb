#pragma once

#include <cstdint>
#include <string>

#include "fraisse/json_io.hpp"

namespace fraisse {

// Verified means verified up to `bound`, never outright.
enum class Verdict { Verified, Refuted, RefutedWithinCap, Inconclusive };

const char* verdict_name(Verdict v);

struct VerificationReport {
    std::string check;
    Verdict verdict = Verdict::Verified;
    int bound = 0;
    std::uint64_t instances = 0;
    json witness;  // refutation witness, or per-pattern witnesses for fully relational checks
    std::string message;

    bool verified() const { return verdict == Verdict::Verified; }
    json to_json() const;
};

}  // namespace fraisse
