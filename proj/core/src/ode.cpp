#include "painwhit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace painwhit::ode {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Completed: return "completed";
    case StopReason::PoleDetected: return "pole-detected";
    case StopReason::SingularityProximity: return "singularity-proximity";
    case StopReason::StepUnderflow: return "step-underflow";
    case StopReason::MaxSteps: return "max-steps";
    case StopReason::RegimeExit: return "regime-exit";
    case StopReason::OvalCollapse: return "oval-collapse";
    case StopReason::DomainEdge: return "domain-edge";
    case StopReason::ImplicitDegeneracy: return "implicit-degeneracy";
  }
  return "unknown";
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

std::span<const double> Solution::state(std::size_t i) const {
  return {states_.data() + i * dim_, dim_};
}

void Solution::eval(double x, std::span<double> out) const {
  if (steps_.empty()) {
    std::copy(states_.begin(), states_.begin() + dim_, out.begin());
    return;
  }
  // binary search for the covering step (steps stored in march order)
  const bool fwd = steps_.front().h > 0;
  std::size_t lo = 0, hi = steps_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const double x1 = steps_[mid].x0 + steps_[mid].h;
    if (fwd ? (x > x1) : (x < x1))
      lo = mid + 1;
    else
      hi = mid;
  }
  const DenseStep& s = steps_[lo];
  const double th = (x - s.x0) / s.h;
  const double th1 = 1.0 - th;
  const std::size_t n = dim_;
  const double* rc = s.rcont.data();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = rc[i] +
             th * (rc[n + i] + th1 * (rc[2 * n + i] + th * (rc[3 * n + i] + th1 * rc[4 * n + i])));
  }
}

double Solution::eval1(double x, std::size_t comp) const {
  std::vector<double> buf(dim_);
  eval(x, buf);
  return buf[comp];
}

Solution integrate(const Rhs& rhs, double x0, std::span<const double> y0, double x_end,
                   const Options& opts, const Guard& guard) {
  const std::size_t n = y0.size();
  Solution sol(n);
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  const double posneg = x_end >= x0 ? 1.0 : -1.0;
  double x = x0;

  auto record = [&](double xx, const std::vector<double>& yy) {
    sol.xs_.push_back(xx);
    sol.states_.insert(sol.states_.end(), yy.begin(), yy.end());
  };
  record(x, y);

  if (guard) {
    if (auto r = guard(x, y)) {
      sol.stop_ = *r;
      sol.stop_detail_ = "guard fired at initial point";
      return sol;
    }
  }
  if (x0 == x_end) return sol;

  auto eval_rhs = [&](double xx, const std::vector<double>& yy, std::vector<double>& out) -> bool {
    try {
      rhs(xx, yy, out);
    } catch (const std::domain_error&) {
      return false;
    }
    return all_finite(out);
  };

  if (!eval_rhs(x, y, k1)) {
    sol.stop_ = StopReason::SingularityProximity;
    sol.stop_detail_ = "right-hand side singular at initial point";
    return sol;
  }

  // initial step size
  double h;
  if (opts.fixed_step) {
    h = posneg * std::abs(opts.fixed_h);
  } else if (opts.h0 != 0.0) {
    h = posneg * std::abs(opts.h0);
  } else {
    double dny = 0, dnf = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = opts.atol + opts.rtol * std::abs(y[i]);
      dnf += (k1[i] / sk) * (k1[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = posneg * std::min({h, std::abs(x_end - x0), opts.hmax});
  }

  double facold = 1e-4;
  bool rejected = false;
  std::size_t nstep = 0;

  while (true) {
    if (++nstep > opts.max_steps) {
      sol.stop_ = StopReason::MaxSteps;
      sol.stop_detail_ = "step budget exhausted";
      return sol;
    }
    if (std::abs(h) < 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      sol.stop_ = StopReason::StepUnderflow;
      sol.stop_detail_ = "step size underflow (stiffness or pole)";
      return sol;
    }
    bool last = false;
    if ((x + 1.01 * h - x_end) * posneg > 0.0) {
      h = x_end - x;
      last = true;
    }

    // the six stages
    bool ok = true;
    auto stage = [&](double cc, std::vector<double>& dst,
                     std::initializer_list<std::pair<const std::vector<double>*, double>> terms) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0;
        for (const auto& [kv, aa] : terms) acc += aa * (*kv)[i];
        ytmp[i] = y[i] + h * acc;
      }
      if (!eval_rhs(x + cc * h, ytmp, dst)) ok = false;
    };
    stage(c2, k2, {{&k1, a21}});
    if (ok) stage(c3, k3, {{&k1, a31}, {&k2, a32}});
    if (ok) stage(c4, k4, {{&k1, a41}, {&k2, a42}, {&k3, a43}});
    if (ok) stage(c5, k5, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}});
    if (ok) stage(1.0, k6, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}});
    if (ok) {
      for (std::size_t i = 0; i < n; ++i) {
        ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      }
      if (!all_finite(ynew) || !eval_rhs(x + h, ynew, k7)) ok = false;
    }

    double err = std::numeric_limits<double>::infinity();
    if (ok) {
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double sk = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * k7[i]);
        acc += (ei / sk) * (ei / sk);
      }
      err = std::sqrt(acc / static_cast<double>(n));
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    }

    if (opts.fixed_step) {
      if (!ok) {
        sol.stop_ = StopReason::SingularityProximity;
        sol.stop_detail_ = "right-hand side failed inside fixed step";
        return sol;
      }
      err = 0.0;  // accept unconditionally
    }

    if (err <= 1.0) {
      // accept: build dense output
      DenseStep ds;
      ds.x0 = x;
      ds.h = h;
      ds.rcont.resize(5 * n);
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        ds.rcont[i] = y[i];
        ds.rcont[n + i] = ydiff;
        ds.rcont[2 * n + i] = bspl;
        ds.rcont[3 * n + i] = ydiff - h * k7[i] - bspl;
        ds.rcont[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                   d6 * k6[i] + d7 * k7[i]);
      }
      sol.steps_.push_back(std::move(ds));
      x += h;
      y = ynew;
      k1 = k7;  // FSAL
      record(x, y);

      if (guard) {
        if (auto r = guard(x, y)) {
          sol.stop_ = *r;
          sol.stop_detail_ = "guard fired during run";
          return sol;
        }
      }
      if (last) {
        sol.stop_ = StopReason::Completed;
        return sol;
      }
      if (!opts.fixed_step) {
        const double fac11 = std::pow(std::max(err, 1e-32), 0.2);
        double fac = fac11 / std::pow(facold, 0.04);  // PI step control, beta = 0.04
        fac = std::clamp(fac / 0.9, 0.1, 5.0);
        if (rejected) fac = std::max(fac, 1.0);  // no growth right after a rejection
        h = h / fac;
        if (std::abs(h) > opts.hmax) h = posneg * opts.hmax;
        facold = std::max(err, 1e-4);
      }
      rejected = false;
    } else {
      // reject
      rejected = true;
      if (!ok) {
        h *= 0.25;
      } else {
        const double fac11 = std::pow(err, 0.2);
        h = h / std::min(5.0, fac11 / 0.9);
      }
    }
  }
}

}  // namespace painwhit::ode
