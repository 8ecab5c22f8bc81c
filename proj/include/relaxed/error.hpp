#pragma once

#include <stdexcept>
#include <string>

namespace relaxed {

enum class ErrorKind {
  invalid_scale,
  invalid_parameter,
  out_of_domain,
  construction_failure,
  shape,
  unsupported,
  empty_expert_set,
  invalid_loss,
  realizability_violation,
  infeasible_margin,
  resource,
  domain,
  usage,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_scale: return "invalid-scale";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::out_of_domain: return "out-of-domain";
    case ErrorKind::construction_failure: return "construction-failure";
    case ErrorKind::shape: return "shape";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::empty_expert_set: return "empty-expert-set";
    case ErrorKind::invalid_loss: return "invalid-loss";
    case ErrorKind::realizability_violation: return "realizability-violation";
    case ErrorKind::infeasible_margin: return "infeasible-margin";
    case ErrorKind::resource: return "resource";
    case ErrorKind::domain: return "domain";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code and tests can assert on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace relaxed
