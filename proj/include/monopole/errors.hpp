#pragma once

#include <stdexcept>
#include <string>

namespace monopole {

/// Failure categories raised by the solver library.
enum class ErrorKind {
    ParameterDomain,
    SingularPoint,
    Domain,
    HandoffDomain,
    ContractionDomain,
    Stiffness,
    NoEvent,
    Integrity,
    BracketingFailure,
    Precondition,
    GraftDomain,
    AuditDomain,
    FitDomain,
    SturmDomain,
    TooFewSamples,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace monopole
