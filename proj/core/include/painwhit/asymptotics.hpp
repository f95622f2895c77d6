#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "painwhit/ode.hpp"
#include "painwhit/painleve.hpp"

namespace painwhit::asymptotics {

using painleve::OdeState;
using painleve::ThetaParams;

/// Discriminant of the genus-one constraint in the rescaled variables
/// y = X xi, slope X xi' — normalized so the xi^4 coefficient is exactly
/// (k2 - k1)^2. Own transcription, kept independent of whitham::build_curve
/// (the cross-module identity test guards both).
double xi_discriminant(double xi, double X, double F6, const ThetaParams& p);

struct DegeneracyEntry {
  double X = 0;
  double deviation = 0;  // max |D(xi) - xi^2 (xi-1)^2 (k2-k1)^2| on the grid
  /// near-double root pairs (location, gap) in xi units
  std::vector<std::pair<double, double>> root_pairs;
};

struct DegeneracyReport {
  std::vector<DegeneracyEntry> entries;
  double slope = 0;  // fitted decay exponent of deviation vs X
  bool slope_in_range = false;  // within [-1.5, -0.5]
  bool double_roots_found = false;
  bool fully_degenerate = false;  // k1 == k2: limit polynomial vanishes
  std::string note;
};

/// Measures the approach of the xi-discriminant to its strong-degeneracy
/// limit xi^2 (xi-1)^2 (k2-k1)^2 along F6 = -2 k1 k2 X. Requires thetax = 0.
/// Grid: 401 uniform points on [-0.5, 1.5].
DegeneracyReport degeneracy_report(std::span<const double> X_list, const ThetaParams& p);

std::string degeneracy_report_json(const DegeneracyReport& rep);

struct Theorem2Window {
  double x = 0;
  double ratio = 0;      // y/x
  double remainder = 0;  // y - x
};

struct Theorem2Member {
  double offset = 0;  // initial y - x at x0
  bool completed = false;
  std::string stop_reason;
  double ratio_end = 0;
  double c_fit = 0;  // max over windows of |y/x - 1| x / log x
  bool pass = false;
  std::vector<Theorem2Window> windows;
};

struct Theorem2Report {
  std::vector<Theorem2Member> members;
  bool pass = false;          // at least one member tracks y = x
  bool inconclusive = false;  // every member hit a singularity early
};

/// Desk-scale verification of the y = x + o(x) asymptotics: integrates PVI
/// from x0 with y = x0 + c, y' = 1 for each offset c, and checks
/// |y/x - 1| <= C log(x)/x with fitted C plus y/x within 1% at x_end.
Theorem2Report theorem2_verify(const ThetaParams& p, double x0, double x_end,
                               std::span<const double> offsets, const ode::Options& opts = {});

std::string theorem2_report_json(const Theorem2Report& rep);

}  // namespace painwhit::asymptotics
