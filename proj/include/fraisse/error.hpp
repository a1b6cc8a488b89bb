#pragma once

#include <stdexcept>
#include <string>

namespace fraisse {

enum class ErrorCode {
    SignatureMismatch,
    SignatureOverlap,
    OutOfRange,
    NotBijective,
    BoundExceeded,
    UnknownRelation,
    TransitivityOnNonBinary,
    NonBinarySignature,
    NotAmalgamation,
    NotParameterFree,
    NotReductive,
    CapacityExceeded,
    UnderCertifiedTarget,
    HypothesisUnmet,
    WitnessMissing,
    Overflow,
    Parse,
    Usage,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fraisse
