#include "painwhit/painleve.hpp"

#include <array>
#include <cmath>
#include <ostream>

namespace painwhit::painleve {

ThetaParams ThetaParams::from_thetas(double theta0, double theta1, double thetax,
                                     double thetainf) {
  ThetaParams p;
  p.theta0 = theta0;
  p.theta1 = theta1;
  p.thetax = thetax;
  p.thetainf = thetainf;
  const double s = -(theta0 + theta1 + thetax);
  p.k1 = 0.5 * (s + thetainf);
  p.k2 = 0.5 * (s - thetainf);
  p.alpha = 0.5 * (thetainf - 1.0) * (thetainf - 1.0);
  p.beta = -0.5 * theta0 * theta0;
  p.gamma = 0.5 * theta1 * theta1;
  p.delta = 0.5 * (1.0 - thetax * thetax);
  return p;
}

double sing_guard(double x) { return 1e-8 * std::max(1.0, std::abs(x)); }

double pi_rhs(const OdeState& s, double bigX) { return 3.0 * s.y * s.y + bigX; }

double pi_first_integral(const OdeState& s, double bigX) {
  return s.dy * s.dy - 2.0 * s.y * s.y * s.y - 2.0 * s.y * bigX;
}

double pvi_rhs(const OdeState& s, const ThetaParams& p) {
  const double x = s.x, y = s.y, dy = s.dy;
  const double g = sing_guard(x);
  if (std::min({std::abs(y), std::abs(y - 1.0), std::abs(y - x)}) < g ||
      std::min(std::abs(x), std::abs(x - 1.0)) < g) {
    throw SingularityError("pvi_rhs: state within singularity guard");
  }
  const double q = 0.5 * (1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - x)) * dy * dy;
  const double l = (1.0 / x + 1.0 / (x - 1.0) + 1.0 / (y - x)) * dy;
  const double pref = y * (y - 1.0) * (y - x) / (x * x * (x - 1.0) * (x - 1.0));
  const double bracket = p.alpha + p.beta * x / (y * y) +
                         p.gamma * (x - 1.0) / ((y - 1.0) * (y - 1.0)) +
                         p.delta * x * (x - 1.0) / ((y - x) * (y - x));
  return q - l + pref * bracket;
}

Trajectory::Trajectory(ode::Solution sol) : sol_(std::move(sol)) {}

OdeState Trajectory::point(std::size_t i) const {
  const auto st = sol_.state(i);
  return {sol_.xs()[i], st[0], st[1]};
}

OdeState Trajectory::at(double x) const {
  std::array<double, 2> buf{};
  sol_.eval(x, buf);
  return {x, buf[0], buf[1]};
}

Trajectory integrate(RhsKind kind, const OdeState& initial, const ThetaParams& params,
                     double bigX, double x_end, const ode::Options& opts) {
  ode::Rhs rhs;
  ode::Guard guard;
  switch (kind) {
    case RhsKind::PiFrozen:
      rhs = [bigX](double, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = 3.0 * y[0] * y[0] + bigX;
      };
      break;
    case RhsKind::PiDriven:
      rhs = [](double x, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = 3.0 * y[0] * y[0] + x;
      };
      break;
    case RhsKind::Pvi:
      rhs = [params](double x, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = pvi_rhs({x, y[0], y[1]}, params);
      };
      break;
  }
  if (kind == RhsKind::Pvi) {
    guard = [](double x, std::span<const double> y) -> std::optional<ode::StopReason> {
      const double g = sing_guard(x);
      if (std::min({std::abs(y[0]), std::abs(y[0] - 1.0), std::abs(y[0] - x)}) < g ||
          std::min(std::abs(x), std::abs(x - 1.0)) < g) {
        return ode::StopReason::SingularityProximity;
      }
      if (!std::isfinite(y[0]) || !std::isfinite(y[1])) return ode::StopReason::PoleDetected;
      return std::nullopt;
    };
  } else {
    guard = [](double, std::span<const double> y) -> std::optional<ode::StopReason> {
      if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || std::abs(y[0]) >= pole_threshold) {
        return ode::StopReason::PoleDetected;
      }
      return std::nullopt;
    };
  }
  const std::array<double, 2> y0{initial.y, initial.dy};
  return Trajectory(ode::integrate(rhs, initial.x, y0, x_end, opts, guard));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "x,y,dy\n";
  char buf[128];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const OdeState s = tr.point(i);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.x, s.y, s.dy);
    os << buf;
  }
}

}  // namespace painwhit::painleve
