#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace coopsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Placeholder left unbound when rendering a prompt template.
struct TemplateError : std::runtime_error {
  explicit TemplateError(std::string name)
      : std::runtime_error("unbound template placeholder: " + name), placeholder(std::move(name)) {}
  std::string placeholder;
};

// Model output carried no usable value.
struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model output carried a value outside the legal range.
struct RangeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BackendUnavailable : std::runtime_error {
  BackendUnavailable(const std::string& what, int attempts)
      : std::runtime_error(what), attempts(attempts) {}
  int attempts;
};

struct ReplayRefused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Event log is missing rounds or was flagged incomplete.
struct IncompleteLog : std::runtime_error {
  IncompleteLog(const std::string& what, std::vector<int> missing)
      : std::runtime_error(what), missing_rounds(std::move(missing)) {}
  std::vector<int> missing_rounds;
};

// A run stopped early because a backend failed; the partial log is kept.
struct RunAborted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace coopsim
