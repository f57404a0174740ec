#include "monopole/errors.hpp"

namespace monopole {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ParameterDomain: return "parameter-domain";
        case ErrorKind::SingularPoint: return "singular-point";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::HandoffDomain: return "handoff-domain";
        case ErrorKind::ContractionDomain: return "contraction-domain";
        case ErrorKind::Stiffness: return "stiffness";
        case ErrorKind::NoEvent: return "no-event";
        case ErrorKind::Integrity: return "integrity";
        case ErrorKind::BracketingFailure: return "bracketing-failure";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::GraftDomain: return "graft-domain";
        case ErrorKind::AuditDomain: return "audit-domain";
        case ErrorKind::FitDomain: return "fit-domain";
        case ErrorKind::SturmDomain: return "sturm-domain";
        case ErrorKind::TooFewSamples: return "too-few-samples";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace monopole
