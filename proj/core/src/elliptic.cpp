#include "painwhit/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace painwhit::elliptic {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double cubic_value(double g2, double g3, double t) {
  return ((4.0 * t * t - g2) * t) - g3;
}

double cubic_newton(double g2, double g3, double t) {
  // one or two corrector steps; the trig solution is already close
  for (int i = 0; i < 2; ++i) {
    double f = cubic_value(g2, g3, t);
    double df = 12.0 * t * t - g2;
    if (df == 0.0) break;
    t -= f / df;
  }
  return t;
}

}  // namespace

CubicRoots solve_depressed_cubic(double g2, double g3) {
  if (g2 == 0.0 && g3 == 0.0) {
    return {true, 0.0, 0.0, 0.0};
  }
  const double disc = g2 * g2 * g2 - 27.0 * g3 * g3;
  if (disc >= 0.0 && g2 > 0.0) {
    // three real roots: 4t^3 - g2 t = g3 with t = sqrt(g2/3) cos(phi)
    const double r = std::sqrt(g2 / 3.0);
    double chi = g3 / (r * r * r);
    chi = std::clamp(chi, -1.0, 1.0);
    const double phi = std::acos(chi) / 3.0;
    std::array<double, 3> roots{
        r * std::cos(phi),
        r * std::cos(phi - 2.0 * kPi / 3.0),
        r * std::cos(phi - 4.0 * kPi / 3.0),
    };
    for (auto& t : roots) t = cubic_newton(g2, g3, t);
    std::sort(roots.begin(), roots.end(), std::greater<>());
    return {true, roots[0], roots[1], roots[2]};
  }
  // single real root via the cbrt form of the cubic formula on
  // t^3 + p t + q = 0 with p = -g2/4, q = -g3/4
  const double p = -g2 / 4.0;
  const double q = -g3 / 4.0;
  const double inner = q * q / 4.0 + p * p * p / 27.0;  // > 0 here
  const double s = std::sqrt(std::max(inner, 0.0));
  const double u = std::cbrt(-q / 2.0 + s);
  const double v = std::cbrt(-q / 2.0 - s);
  const double t = cubic_newton(g2, g3, u + v);
  // deflate: 4t^3 - g2 t - g3 = 4 (w - t)(w^2 + t w + (t^2 - g2/4)),
  // complex pair -t/2 +/- i sqrt(3t^2/4 - g2/4)
  const double imag2 = 0.75 * t * t - 0.25 * g2;
  return {false, t, -t / 2.0, std::sqrt(std::max(imag2, 0.0))};
}

double complete_K(double ksq) {
  if (!(ksq >= 0.0) || ksq >= 1.0) {
    throw std::domain_error("complete_K: ksq must lie in [0, 1)");
  }
  long double a = 1.0L;
  long double b = std::sqrt(1.0L - static_cast<long double>(ksq));
  while (std::abs(static_cast<double>(a - b)) >
         static_cast<double>(a) * std::numeric_limits<double>::epsilon()) {
    const long double an = 0.5L * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return static_cast<double>(kPi / (a + b));
}

double complete_E(double ksq) {
  if (!(ksq >= 0.0) || ksq > 1.0) {
    throw std::domain_error("complete_E: ksq must lie in [0, 1]");
  }
  if (ksq == 1.0) return 1.0;
  long double a = 1.0L;
  long double b = std::sqrt(1.0L - static_cast<long double>(ksq));
  long double csum = static_cast<long double>(ksq);  // 2^0 * c_0^2, c_0 = k
  long double two_n = 1.0L;
  while (std::abs(static_cast<double>(a - b)) >
         static_cast<double>(a) * std::numeric_limits<double>::epsilon()) {
    const long double c = 0.5L * (a - b);
    const long double an = 0.5L * (a + b);
    b = std::sqrt(a * b);
    a = an;
    two_n *= 2.0L;
    csum += two_n * c * c;
  }
  const long double K = kPi / (a + b);
  return static_cast<double>(K * (1.0L - 0.5L * csum));
}

WeierstrassData weierstrass_data(double g2, double g3) {
  const CubicRoots roots = solve_depressed_cubic(g2, g3);
  if (!roots.all_real) {
    throw UnsupportedRegimeError(
        "weierstrass_data: invariant cubic has a complex pair (oscillatory "
        "ansatz needs three real roots)");
  }
  WeierstrassData wd;
  wd.g2 = g2;
  wd.g3 = g3;
  wd.e1 = roots.r1;
  wd.e2 = roots.r2;
  wd.e3 = roots.r3;
  const double span = wd.e1 - wd.e3;
  wd.ksq = span > 0.0 ? std::clamp((wd.e2 - wd.e3) / span, 0.0, 1.0) : 0.0;
  if (span == 0.0) {
    throw UnsupportedRegimeError("weierstrass_data: fully degenerate lattice (e1 == e3)");
  }
  wd.bigK = complete_K(wd.ksq);  // throws at ksq == 1 (e1 == e2)
  wd.bigE = complete_E(wd.ksq);
  return wd;
}

double WeierstrassData::real_period() const {
  return 2.0 * bigK / std::sqrt(e1 - e3);
}

namespace {

// Laurent coefficients c_k of wp(z) = z^-2 + sum_{k>=2} c_k z^{2k-2}.
struct WpSeries {
  std::array<double, 40> c{};
  int n = 0;
};

WpSeries wp_series(double g2, double g3) {
  WpSeries s;
  s.c[2] = g2 / 20.0;
  s.c[3] = g3 / 28.0;
  int k = 3;
  while (k + 1 < static_cast<int>(s.c.size())) {
    ++k;
    double acc = 0.0;
    for (int m = 2; m <= k - 2; ++m) acc += s.c[m] * s.c[k - m];
    s.c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3));
  }
  s.n = k;
  return s;
}

struct WpPair {
  double p, dp;
};

WpPair wp_series_eval(const WpSeries& s, double t) {
  const double t2 = t * t;
  double p = 1.0 / t2;
  double dp = -2.0 / (t2 * t);
  double pw = 1.0;   // t^(2k-2) accumulator
  for (int k = 2; k <= s.n; ++k) {
    pw *= t2;
    const double term = s.c[k] * pw;
    p += term;
    dp += (2 * k - 2) * s.c[k] * pw / t;
    if (std::abs(term) < 1e-17 * std::abs(p)) break;
  }
  return {p, dp};
}

WpPair wp_duplicate(const WpPair& w, double g2) {
  // wp(2z) = A^2 - 2 wp,          A = wp'' / (2 wp')
  // wp'(2z) = A A' - wp',         A' = (12 wp wp'^2 - wp''^2) / (2 wp'^2)
  const double psi = 6.0 * w.p * w.p - 0.5 * g2;  // wp''
  const double A = psi / (2.0 * w.dp);
  const double Ap = (12.0 * w.p * w.dp * w.dp - psi * psi) / (2.0 * w.dp * w.dp);
  return {A * A - 2.0 * w.p, A * Ap - w.dp};
}

WpPair wp_eval(double tau, const WeierstrassData& wd) {
  const double period = wd.real_period();       // 2 omega1
  const double omega1 = 0.5 * period;
  // reduce to [-omega1, omega1]
  double t = tau - std::round(tau / period) * period;
  const double guard = pole_guard_fraction * period;
  if (std::abs(t) < guard) {
    throw PoleProximityError("weierstrass_p: argument within pole guard of a lattice point",
                             std::abs(t));
  }
  const double sign = t < 0.0 ? -1.0 : 1.0;  // wp even, wp' odd
  t = std::abs(t);
  // series radius limited by the nearest pole off the real axis (2 omega3);
  // ksq == 0 (e2 == e3) has omega3 = inf, the real period is the only limit
  const double span = wd.e1 - wd.e3;
  const double kpsq = 1.0 - wd.ksq;
  const double omega3 =
      kpsq < 1.0 ? complete_K(kpsq) / std::sqrt(span) : std::numeric_limits<double>::infinity();
  const double lim = 0.4 * std::min(period, 2.0 * omega3);
  int ndup = 0;
  while (t > lim) {
    t *= 0.5;
    ++ndup;
  }
  const WpSeries series = wp_series(wd.g2, wd.g3);
  WpPair w = wp_series_eval(series, t);
  for (int i = 0; i < ndup; ++i) w = wp_duplicate(w, wd.g2);
  w.dp *= sign;
  return w;
}

}  // namespace

double weierstrass_p(double tau, const WeierstrassData& wd) { return wp_eval(tau, wd).p; }

double weierstrass_p(double tau, double g2, double g3) {
  return weierstrass_p(tau, weierstrass_data(g2, g3));
}

double weierstrass_p_prime(double tau, const WeierstrassData& wd) { return wp_eval(tau, wd).dp; }

double weierstrass_p_prime(double tau, double g2, double g3) {
  return weierstrass_p_prime(tau, weierstrass_data(g2, g3));
}

double mean_wp(const WeierstrassData& wd) {
  return 2.0 * wd.e1 + 2.0 * (wd.e3 - wd.e1) * wd.bigE / wd.bigK;
}

double mean_wp(double g2, double g3) { return mean_wp(weierstrass_data(g2, g3)); }

}  // namespace painwhit::elliptic
