#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pradic {

/// A single validation or parse finding. Diagnostics are data, not control
/// flow: validation returns them in a deterministic order and never throws.
struct Diagnostic {
  enum class Severity { kError, kWarning };

  Severity severity = Severity::kError;
  std::string entity;  // id/name of the offending entity ("" for file-level)
  std::string rule;    // short rule token, e.g. "cycle", "k-exceeds-n"
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

/// Stable ordering for reproducible reports: entity, then rule, then message.
void sort_diagnostics(std::vector<Diagnostic>& diagnostics);

/// One machine-parsable line per diagnostic: "severity|entity|rule|message".
std::string to_line(const Diagnostic& d);

/// Domain error thrown by engine operations on contract violations
/// ("inconsistent betas", "probability overflow", resource caps, ...).
class Error : public std::runtime_error {
 public:
  Error(std::string rule, const std::string& message)
      : std::runtime_error(message), rule_(std::move(rule)) {}

  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

}  // namespace pradic
