#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spfl {

// Configuration file problems (bad key, bad value, failed invariant on load).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Filesystem-level failures (missing file, unwritable path).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed CSV input; carries the 1-based line number of the offending row.
struct CsvParseError : std::invalid_argument {
  CsvParseError(std::size_t line_number, const std::string& what)
      : std::invalid_argument("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  std::size_t line;
};

// Bracketed root search called with no sign change on the bracket.
struct RootNotBracketed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Switching condition has no solution (beta2 = 0 or L1 = L2).
struct NoSwitchingPossible : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A TwoPhotonState whose amplitudes are not normalized.
struct InvalidState : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace spfl
