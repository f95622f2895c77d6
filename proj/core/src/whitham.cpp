#include "painwhit/whitham.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>

#include "painwhit/polyroots.hpp"

namespace painwhit::whitham {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

struct GaussLegendre {
  std::vector<double> x, w;  // nodes/weights on (0, pi/2)
};

// fixed 96-node Gauss-Legendre rule mapped to (0, pi/2); deterministic
const GaussLegendre& phi_rule() {
  static const GaussLegendre rule = [] {
    const int n = 96;
    GaussLegendre r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.x[i] = 0.25 * kPi * (x + 1.0);              // map (-1,1) -> (0, pi/2)
      r.w[i] = 0.25 * kPi * 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

}  // namespace

PiCycle pi_cycle_quadrature(double g2, double g3) {
  const elliptic::WeierstrassData wd = elliptic::weierstrass_data(g2, g3);
  const double ylo = 2.0 * wd.e3, yhi = 2.0 * wd.e2;
  PiCycle out;
  if (yhi - ylo < 1e-12 * std::max({1.0, std::abs(ylo), std::abs(yhi)})) {
    out.ybar = yhi;
    out.y2bar = yhi * yhi;
    out.period = std::numeric_limits<double>::infinity();
    return out;
  }
  // (y')^2 = (y - ylo)(yhi - y) * 4 (e1 - y/2) on the bounded branch;
  // y = ylo + (yhi-ylo) sin^2(phi) turns dy/|y'| into dphi / sqrt(e1 - y/2)
  const auto& q = phi_rule();
  double s0 = 0, s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    const double sn = std::sin(q.x[i]);
    const double y = ylo + (yhi - ylo) * sn * sn;
    const double g = std::sqrt(wd.e1 - 0.5 * y);
    const double w = q.w[i] / g;
    s0 += w;
    s1 += w * y;
    s2 += w * y * y;
  }
  out.ybar = s1 / s0;
  out.y2bar = s2 / s0;
  out.period = 2.0 * s0;  // x-length of one full cycle
  return out;
}

double pi_modulation_rhs(const ModulationState& s) {
  // one-time sign validation of the closed form against the quadrature route
  static const bool validated = [] {
    const double m = elliptic::mean_wp(4.0, 0.5);
    const double q = pi_cycle_quadrature(4.0, 0.5).ybar;
    if (std::abs(m - q) > 1e-8 * std::max(1.0, std::abs(q))) {
      throw std::logic_error("pi_modulation_rhs: closed-form/quadrature sign validation failed");
    }
    return true;
  }();
  (void)validated;
  return -2.0 * elliptic::mean_wp(-s.bigX, -s.F / 4.0);
}

ModulationRun solve_pi_whitham(const ModulationState& initial, double X_end,
                               const PiWhithamOptions& opts) {
  auto rhs_fn = [&](const ModulationState& st) {
    return opts.rhs_override ? opts.rhs_override(st) : pi_modulation_rhs(st);
  };
  ode::Rhs rhs = [&](double X, std::span<const double> y, std::span<double> d) {
    d[0] = rhs_fn({X, y[0]});
  };
  ode::Guard guard = [](double X, std::span<const double> y) -> std::optional<ode::StopReason> {
    const double g2 = -X, g3 = -y[0] / 4.0;
    const double disc = g2 * g2 * g2 - 27.0 * g3 * g3;
    const double scale = std::max({1.0, std::abs(g2 * g2 * g2), 27.0 * g3 * g3});
    if (disc <= 1e-10 * scale) return ode::StopReason::RegimeExit;
    return std::nullopt;
  };
  ode::Options oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  const std::array<double, 1> y0{initial.F};
  const ode::Solution sol = ode::integrate(rhs, initial.bigX, y0, X_end, oo, guard);

  ModulationRun run;
  run.stop = sol.stop();
  run.stop_detail = sol.stop_detail();
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const double X = sol.xs()[i];
    const double F = sol.state(i)[0];
    ModulationPoint pt;
    pt.X = X;
    pt.F = F;
    try {
      const PiCycle c = pi_cycle_quadrature(-X, -F / 4.0);
      pt.ybar = elliptic::mean_wp(-X, -F / 4.0);
      pt.y2bar = c.y2bar;
      pt.period = c.period;
    } catch (const elliptic::UnsupportedRegimeError&) {
      pt.ybar = pt.y2bar = pt.period = std::numeric_limits<double>::quiet_NaN();
    }
    run.points.push_back(pt);
  }
  return run;
}

double QuarticCurve::c_at(double y) const { return polyroots::horner(c, y); }
double QuarticCurve::disc_at(double y) const { return polyroots::horner(disc, y); }

QuarticCurve build_curve(double X, double F6, const ThetaParams& p) {
  QuarticCurve q;
  q.X = X;
  q.F6 = F6;
  q.params = p;
  q.a = X * X * (X - 1.0) * (X - 1.0);
  const double k1 = p.k1, k2 = p.k2;
  const double d = k1 - k2, s = k1 + k2;
  const double C = (X + 1.0) * s + X * p.thetax + p.theta1;
  const double S = C * C - 1.0 - 2.0 * X * p.theta0 * s + 4.0 * k1 * k2 * (X * X + X + 1.0) +
                   4.0 * X * (X + 1.0) * (1.0 - k2) * p.thetax + 4.0 * (X + 1.0) * F6;
  q.c[4] = 1.0 - d * d;
  q.c[3] = 2.0 * (s * C - 1.0 + 2.0 * X * p.thetax * (1.0 - k2) + 2.0 * F6);
  q.c[2] = -S;
  q.c[1] = 2.0 * X * (2.0 * k1 * k2 * (X + 1.0) + 2.0 * X * p.thetax * (1.0 - k2) + 2.0 * F6 -
                      p.theta0 * C);
  q.c[0] = -X * X * p.theta0 * p.theta0;
  // Dtilde = y^2 (y-1)^2 - c(y)
  q.disc = {-q.c[0], -q.c[1], 1.0 - q.c[2], -2.0 - q.c[3], 1.0 - q.c[4]};
  return q;
}

BranchPoints branch_points(const QuarticCurve& curve) {
  BranchPoints bp;
  bp.roots = polyroots::real_roots(curve.disc, &bp.all_roots);
  for (std::size_t i = 0; i + 1 < bp.roots.size(); ++i) {
    const double mid = 0.5 * (bp.roots[i] + bp.roots[i + 1]);
    if (curve.disc_at(mid) > 0.0 && bp.roots[i + 1] > bp.roots[i]) {
      bp.ovals.emplace_back(bp.roots[i], bp.roots[i + 1]);
    }
  }
  if (bp.ovals.empty()) {
    throw NoCycleError("branch_points: discriminant bounds no positive oval");
  }
  return bp;
}

CycleAverages cycle_averages(const QuarticCurve& curve, std::pair<double, double> oval,
                             const BranchPoints& bp) {
  const double ylo = oval.first, yhi = oval.second;
  const double width = yhi - ylo;
  const double scale = std::max({1.0, std::abs(ylo), std::abs(yhi)});
  CycleAverages out;
  if (width < 1e-10 * scale) {
    out.ybar = yhi;
    out.y2bar = yhi * yhi;
    out.period = std::numeric_limits<double>::infinity();
    out.degenerate = true;
    return out;
  }

  // Dtilde(y) = (y - ylo)(yhi - y) G(y);  G from the remaining root factors
  double lead = curve.disc[4];
  std::vector<std::complex<double>> others = bp.all_roots;
  auto drop_nearest = [&](double target) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < others.size(); ++i) {
      const double dd = std::abs(others[i] - std::complex<double>(target, 0.0));
      if (dd < bd) {
        bd = dd;
        best = i;
      }
    }
    others.erase(others.begin() + best);
  };
  drop_nearest(ylo);
  drop_nearest(yhi);

  auto G = [&](double y) {
    std::complex<double> acc = -lead;
    for (const auto& r : others) acc *= (y - r);
    return acc.real();
  };

  const auto& q = phi_rule();
  double s0 = 0, s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    const double sn = std::sin(q.x[i]);
    const double y = ylo + width * sn * sn;
    const double g = G(y);
    if (!(g > 0.0)) {
      throw NoCycleError("cycle_averages: oval factorization not positive");
    }
    const double w = q.w[i] / std::sqrt(g);
    s0 += w;
    s1 += w * y;
    s2 += w * y * y;
  }
  out.ybar = s1 / s0;
  out.y2bar = s2 / s0;
  // cycle integral of dy / sqrt(b^2 - 4 a c) = (1/(2 sqrt(a))) * cycle dy/sqrt(Dtilde)
  out.period = 4.0 * s0 / (2.0 * std::sqrt(curve.a));
  return out;
}

CycleAverages averages_on_curve(double X, double F6, const ThetaParams& p,
                                const OvalSelection& sel, std::pair<double, double>* oval_out) {
  const QuarticCurve curve = build_curve(X, F6, p);
  const BranchPoints bp = branch_points(curve);
  std::pair<double, double> chosen = bp.ovals.back();
  if (sel.contains_y) {
    const double target = *sel.contains_y;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : bp.ovals) {
      const double center = 0.5 * (o.first + o.second);
      const double dist = (target >= o.first && target <= o.second)
                              ? 0.0
                              : std::abs(center - target);
      if (dist < best) {
        best = dist;
        chosen = o;
      }
    }
  }
  if (oval_out) *oval_out = chosen;
  return cycle_averages(curve, chosen, bp);
}

double pvi_modulation_rhs(const ModulationState& s, const ThetaParams& p,
                          const OvalSelection& sel, PviRhsDiagnostics* diag) {
  const double X = s.bigX, F6 = s.F;
  const double k1 = p.k1, k2 = p.k2;
  const double d = k1 - k2;

  std::pair<double, double> oval;
  const CycleAverages base = averages_on_curve(X, F6, p, sel, &oval);
  const double center = 0.5 * (oval.first + oval.second);
  const OvalSelection follow{center};

  const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  const double hX = cbrt_eps * std::max(1.0, std::abs(X));
  const double hF = cbrt_eps * std::max(1.0, std::abs(F6));
  const double ybXp = averages_on_curve(X + hX, F6, p, follow).ybar;
  const double ybXm = averages_on_curve(X - hX, F6, p, follow).ybar;
  const double ybFp = averages_on_curve(X, F6 + hF, p, follow).ybar;
  const double ybFm = averages_on_curve(X, F6 - hF, p, follow).ybar;
  const double dydX = (ybXp - ybXm) / (2.0 * hX);
  const double dydF = (ybFp - ybFm) / (2.0 * hF);

  // Whitham modulation equation for F6, S-bracket as printed
  const double S = 0.5 * (k2 - k1) * (X * (k2 - k1 - p.thetax) + p.theta0 + p.thetax + 1.0) -
                   X * (2.0 * k1 * k2 + p.thetax) - k2 * (k1 + k2 + p.theta1) - F6;
  const double Q = ((k2 - k1) * (k2 - k1 + 1.0) / (2.0 * X * (X - 1.0))) * base.y2bar +
                   (base.ybar / (X * (X - 1.0))) * S +
                   (1.0 / (2.0 * (X - 1.0))) *
                       (p.theta0 * (k2 - k1) + 2.0 * X * (2.0 * k1 * k2 + p.thetax) +
                        2.0 * k2 * (k1 + k2 + p.theta1) + 2.0 * F6) -
                   k2 * p.thetax - 2.0 * k1 * k2;

  const double denom = 1.0 - 0.5 * d * dydF;
  if (std::abs(denom) < 1e-6) {
    throw ImplicitDegeneracyError("pvi_modulation_rhs: implicit F6' solve is singular");
  }
  const double rhs = (0.5 * d * dydX + Q) / denom;
  if (diag) {
    diag->ybar = base.ybar;
    diag->y2bar = base.y2bar;
    diag->dybar_dX = dydX;
    diag->dybar_dF6 = dydF;
    diag->denom = denom;
    diag->q_explicit = Q;
    diag->oval = oval;
  }
  return rhs;
}

namespace {

class DomainErrorNoCycle : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace

ModulationRun solve_pvi_whitham(const ModulationState& initial, const ThetaParams& p,
                                double X_end, const PviWhithamOptions& opts) {
  // oval continuity across steps: remember the last accepted oval center
  auto center = std::make_shared<std::optional<double>>();
  auto last_stop = std::make_shared<std::optional<ode::StopReason>>();

  ode::Rhs rhs = [p, center, last_stop](double X, std::span<const double> y,
                                        std::span<double> d) {
    OvalSelection sel;
    sel.contains_y = *center;
    try {
      d[0] = pvi_modulation_rhs({X, y[0]}, p, sel);
    } catch (const NoCycleError& e) {
      *last_stop = ode::StopReason::RegimeExit;
      throw DomainErrorNoCycle(e.what());  // reject the step
    } catch (const ImplicitDegeneracyError& e) {
      *last_stop = ode::StopReason::ImplicitDegeneracy;
      throw DomainErrorNoCycle(e.what());
    }
  };

  ode::Guard guard = [p, center, last_stop](double X, std::span<const double> y)
      -> std::optional<ode::StopReason> {
    if (std::abs(X) < 1e-6 || std::abs(X - 1.0) < 1e-6) return ode::StopReason::DomainEdge;
    try {
      OvalSelection sel;
      sel.contains_y = *center;
      std::pair<double, double> oval;
      const CycleAverages av = averages_on_curve(X, y[0], p, sel, &oval);
      if (av.degenerate) return ode::StopReason::OvalCollapse;
      *center = 0.5 * (oval.first + oval.second);
    } catch (const NoCycleError&) {
      return ode::StopReason::RegimeExit;
    }
    return std::nullopt;
  };

  ode::Options oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  if (opts.hmax > 0) oo.hmax = opts.hmax;
  const std::array<double, 1> y0{initial.F};
  const ode::Solution sol = ode::integrate(rhs, initial.bigX, y0, X_end, oo, guard);

  ModulationRun run;
  run.stop = sol.stop();
  run.stop_detail = sol.stop_detail();
  if (sol.stop() == ode::StopReason::StepUnderflow && last_stop->has_value()) {
    run.stop = **last_stop;
    run.stop_detail = "modulation right-hand side stopped resolving";
  }
  std::optional<double> c2;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const double X = sol.xs()[i];
    const double F = sol.state(i)[0];
    ModulationPoint pt;
    pt.X = X;
    pt.F = F;
    try {
      OvalSelection sel;
      sel.contains_y = c2;
      std::pair<double, double> oval;
      const CycleAverages av = averages_on_curve(X, F, p, sel, &oval);
      pt.ybar = av.ybar;
      pt.y2bar = av.y2bar;
      pt.period = av.period;
      c2 = 0.5 * (oval.first + oval.second);
    } catch (const NoCycleError&) {
      pt.ybar = pt.y2bar = pt.period = std::numeric_limits<double>::quiet_NaN();
    }
    run.points.push_back(pt);
  }
  return run;
}

void write_modulation_csv(std::ostream& os, const ModulationRun& run) {
  os << "X,F,ybar,y2bar,period,stop_reason\n";
  char buf[192];
  for (std::size_t i = 0; i < run.points.size(); ++i) {
    const auto& pt = run.points[i];
    const bool last = (i + 1 == run.points.size());
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", pt.X, pt.F, pt.ybar,
                  pt.y2bar, pt.period, last ? ode::to_string(run.stop) : "");
    os << buf;
  }
}

}  // namespace painwhit::whitham
