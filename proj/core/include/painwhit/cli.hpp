#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "painwhit/painleve.hpp"

namespace painwhit::cli {

enum class Mode {
  PiIntegrate,
  PiWhitham,
  PviIntegrate,
  PviLaxVerify,
  PviCurve,
  PviModulate,
  PviTheorem2,
  Degeneracy,
};

const char* mode_name(Mode m);

struct RunConfig {
  Mode mode = Mode::PiIntegrate;
  painleve::ThetaParams params;  // derived fields populated

  // initial data / ranges (mode-dependent)
  double x0 = 0, y0 = 0, dy0 = 0, x_end = 0;
  std::optional<double> frozen_X;       // pi-integrate: hold X constant
  double X0 = 0, F0 = 0, X_end = 0;     // modulation runs
  bool family_start = false;            // pvi-modulate: F0 = -2 k1 k2 X0
  double F6 = 0;                        // pvi-curve
  std::vector<double> X_list;           // degeneracy
  std::vector<double> offsets;          // theorem2 initial-data family
  double lax_threshold = 1e-5;          // pvi-lax-verify flag threshold

  double rtol = 1e-10;
  double atol = 1e-12;
  std::uint64_t seed = 0;
  std::string out_path;  // defaulted per mode when empty
  std::string format = "csv";
};

struct ParseResult {
  int exit_code = 0;       // 0 ok, 2 config error
  std::string error;       // single line, machine parsable
  bool handled = false;    // help/version printed, nothing to run
  std::optional<RunConfig> config;
};

/// Parse argv-style arguments (no program name). Flags override config-file
/// values; contradictory theta/k specifications are rejected.
ParseResult parse_config(const std::vector<std::string>& args);

/// Dispatch a parsed config: writes the mode's artifact file and a summary
/// JSON to `summary_out`. Returns 0 on success, 1 on a tagged numerical
/// stop (the reason lands in the summary), 2 on invalid configuration.
int run(const RunConfig& cfg, std::ostream& summary_out);

/// main() glue: parse, run, map errors to exit codes.
int main_entry(int argc, char** argv);

}  // namespace painwhit::cli
