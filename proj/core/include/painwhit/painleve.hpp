#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "painwhit/ode.hpp"

namespace painwhit::painleve {

/// A point (x, y, y') on a Painleve trajectory.
struct OdeState {
  double x = 0, y = 0, dy = 0;
};

class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// PVI constants theta_0, theta_1, theta_x, theta_inf with the derived
/// k_1, k_2 and (alpha, beta, gamma, delta):
///   k1 + k2 = -(theta0 + theta1 + thetax),  k1 - k2 = thetainf,
///   alpha = (thetainf-1)^2/2, beta = -theta0^2/2,
///   gamma = theta1^2/2,       delta = (1 - thetax^2)/2.
struct ThetaParams {
  double theta0 = 0, theta1 = 0, thetax = 0, thetainf = 0;
  double k1 = 0, k2 = 0;
  double alpha = 0, beta = 0, gamma = 0, delta = 0;

  static ThetaParams from_thetas(double theta0, double theta1, double thetax, double thetainf);
};

/// |x| scale guard below which y, y-1, y-x (and x, x-1) count as singular.
double sing_guard(double x);

/// PI pole threshold: integration stops once |y| reaches this.
inline constexpr double pole_threshold = 1e8;

/// y'' for the paper's PI normalization  y'' = 3 y^2 + X
/// (not the common 6 y^2 + x form).
double pi_rhs(const OdeState& s, double bigX);

/// F1 = (y')^2 - 2 y^3 - 2 y X, conserved along frozen-X PI arcs.
double pi_first_integral(const OdeState& s, double bigX);

/// Full PVI right-hand side, throws SingularityError inside the guard.
double pvi_rhs(const OdeState& s, const ThetaParams& p);

enum class RhsKind {
  PiFrozen,  // y'' = 3 y^2 + X, X held constant
  PiDriven,  // y'' = 3 y^2 + x
  Pvi,
};

class Trajectory {
 public:
  Trajectory(ode::Solution sol);

  ode::StopReason stop() const { return sol_.stop(); }
  const std::string& stop_detail() const { return sol_.stop_detail(); }

  std::size_t size() const { return sol_.size(); }
  OdeState point(std::size_t i) const;
  OdeState front() const { return point(0); }
  OdeState back() const { return point(size() - 1); }

  double x_begin() const { return sol_.x_begin(); }
  double x_end() const { return sol_.x_end(); }

  /// Dense-output state at arbitrary x inside the run.
  OdeState at(double x) const;

  const ode::Solution& solution() const { return sol_; }

 private:
  ode::Solution sol_;
};

/// Adaptive integration with pole / singularity guards and dense output.
/// `params` is ignored for the PI kinds; `bigX` only matters for PiFrozen.
Trajectory integrate(RhsKind kind, const OdeState& initial, const ThetaParams& params,
                     double bigX, double x_end, const ode::Options& opts = {});

/// CSV export: header "x,y,dy", one row per accepted step, '.' decimal.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace painwhit::painleve
