#pragma once

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "painwhit/elliptic.hpp"
#include "painwhit/ode.hpp"
#include "painwhit/painleve.hpp"

namespace painwhit::whitham {

using painleve::ThetaParams;

/// Slow pair (X, F) evolving under the modulation ODE.
struct ModulationState {
  double bigX = 0, F = 0;
};

class NoCycleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ImplicitDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// D_X F1 for PI: -2 ybar with ybar the period average of y = 2 wp on the
/// curve g2 = -X, g3 = -F1/4. The sign convention is validated against a
/// period-quadrature oracle once per process.
double pi_modulation_rhs(const ModulationState& s);

/// Cycle quantities of the PI oscillation (quadrature route, independent
/// of the E/K closed form): time-average of y and y^2, and the x-period.
struct PiCycle {
  double ybar = 0, y2bar = 0, period = 0;
};
PiCycle pi_cycle_quadrature(double g2, double g3);

struct ModulationPoint {
  double X = 0, F = 0;
  double ybar = 0, y2bar = 0, period = 0;
};

struct ModulationRun {
  std::vector<ModulationPoint> points;
  ode::StopReason stop = ode::StopReason::Completed;
  std::string stop_detail;
};

struct PiWhithamOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  /// Test hook: integrate this right-hand side instead of pi_modulation_rhs.
  std::function<double(const ModulationState&)> rhs_override;
};

ModulationRun solve_pi_whitham(const ModulationState& initial, double X_end,
                               const PiWhithamOptions& opts = {});

/// Coefficients of the genus-one constraint at frozen (X, F6), viewed as
/// a p^2 + b(y) p + c(y) = 0 with p = y'. `disc` holds the branch-point
/// quartic Dtilde(y) = (b^2 - 4 a c)/(4 a) = y^2 (y-1)^2 - c(y).
struct QuarticCurve {
  double X = 0, F6 = 0;
  ThetaParams params;
  double a = 0;                 // X^2 (X-1)^2
  std::array<double, 5> c{};    // ascending coefficients of c(y)
  std::array<double, 5> disc{}; // ascending; leading (k1-k2)^2

  double b_at(double y) const { return -2.0 * X * (X - 1.0) * y * (y - 1.0); }
  double c_at(double y) const;
  double disc_at(double y) const;
};

QuarticCurve build_curve(double X, double F6, const ThetaParams& p);

/// Real roots of the branch-point quartic, ascending, plus the positive
/// intervals ("ovals") they bound.
struct BranchPoints {
  std::vector<double> roots;
  std::vector<std::complex<double>> all_roots;
  std::vector<std::pair<double, double>> ovals;
};

BranchPoints branch_points(const QuarticCurve& curve);

struct CycleAverages {
  double ybar = 0, y2bar = 0;
  double period = 0;  // cycle integral of dy / sqrt(Dtilde)
  bool degenerate = false;
};

/// Averages over one oval with the dy/sqrt(Dtilde) measure; substitution
/// y = ylo + (yhi - ylo) sin^2(phi) kills the endpoint singularities.
CycleAverages cycle_averages(const QuarticCurve& curve, std::pair<double, double> oval,
                             const BranchPoints& bp);

/// Oval choice: the one containing `contains_y` when set, else rightmost.
struct OvalSelection {
  std::optional<double> contains_y;
};

/// Averages on the selected oval of the (X, F6) curve; throws NoCycleError.
CycleAverages averages_on_curve(double X, double F6, const ThetaParams& p,
                                const OvalSelection& sel = {},
                                std::pair<double, double>* oval_out = nullptr);

struct PviRhsDiagnostics {
  double ybar = 0, y2bar = 0;
  double dybar_dX = 0, dybar_dF6 = 0;
  double denom = 0, q_explicit = 0;
  std::pair<double, double> oval{0, 0};
};

/// The PVI modulation equation, implicit in F6' through D_X ybar; the
/// scalar linear equation is resolved with central finite-difference
/// partials of the cycle average.
double pvi_modulation_rhs(const ModulationState& s, const ThetaParams& p,
                          const OvalSelection& sel = {}, PviRhsDiagnostics* diag = nullptr);

struct PviWhithamOptions {
  double rtol = 1e-8;
  double atol = 1e-8;
  double hmax = 0;  // 0: no cap
};

ModulationRun solve_pvi_whitham(const ModulationState& initial, const ThetaParams& p,
                                double X_end, const PviWhithamOptions& opts = {});

/// CSV: X,F,ybar,y2bar,period,stop_reason with the reason on the final row.
void write_modulation_csv(std::ostream& os, const ModulationRun& run);

}  // namespace painwhit::whitham
