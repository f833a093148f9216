#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "wellcheck/analysis.hpp"

namespace wellcheck::cli {

enum class Command { Analyze, SwlCheck, Counterexample, Diagram };
enum class Format { Json, Csv };

/// Input token that selects the built-in shift counterexample.
inline constexpr const char* kBuiltinCounterexample = "builtin:counterexample";

struct RunConfig {
  Command command = Command::Analyze;
  std::string input;   // file path or kBuiltinCounterexample; empty for `counterexample`
  std::string output;  // file (json) or prefix (csv); empty writes to stdout
  Format format = Format::Json;
  std::optional<FamilyKind> family;
  std::optional<RadiiSpec> radii;
  bool fail_on_violation = false;
  bool oracle_crosscheck = false;
  double lattice_resolution = 0.05;
  bool all_pairs = false;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int violation = 1;
inline constexpr int invalid_input = 2;
inline constexpr int internal = 3;
}  // namespace exit_code

/// Parses "--radii" text: "auto" or a comma-separated list of radii.
RadiiSpec parse_radii(const std::string& text);

/// Executes one command. Reports go to `out` (or files), diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace wellcheck::cli
