#include "painwhit/laxpair.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace painwhit::laxpair {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_nonsingular(const OdeState& s) {
  const double g = painleve::sing_guard(s.x);
  if (std::min({std::abs(s.y), std::abs(s.y - 1.0), std::abs(s.y - s.x)}) < g ||
      std::min(std::abs(s.x), std::abs(s.x - 1.0)) < g) {
    throw painleve::SingularityError("laxpair: state within singularity guard");
  }
}

double big_r(double y, double x) { return y * (y - 1.0) * (y - x); }

}  // namespace

double u_from_slope(const OdeState& s, const ThetaParams& p) {
  check_nonsingular(s);
  const double R = big_r(s.y, s.x);
  return 0.5 * (s.x * (s.x - 1.0) * s.dy / R + p.theta0 / s.y + p.theta1 / (s.y - 1.0) +
                (p.thetax - 1.0) / (s.y - s.x));
}

double slope_from_u(double u, const OdeState& s, const ThetaParams& p) {
  check_nonsingular(s);
  const double R = big_r(s.y, s.x);
  return R / (s.x * (s.x - 1.0)) *
         (2.0 * u - p.theta0 / s.y - p.theta1 / (s.y - 1.0) - (p.thetax - 1.0) / (s.y - s.x));
}

PViAuxiliary build_auxiliary(const OdeState& s, const ThetaParams& p, double kgauge) {
  check_nonsingular(s);
  if (p.thetainf == 0.0) {
    throw std::invalid_argument("build_auxiliary: thetainf = 0 is unsupported");
  }
  const double x = s.x, y = s.y;
  const double R = big_r(y, x);
  PViAuxiliary a;
  a.kgauge = kgauge;
  a.u = u_from_slope(s, p);
  a.uhat = a.u - p.theta0 / y - p.theta1 / (y - 1.0) - p.thetax / (y - x);

  const double uh = a.uhat;
  const double k2 = p.k2;
  // the three bracket expressions, kept verbatim and separate
  const double s1_first = R * uh * uh +
                          (p.theta1 * (y - x) + x * p.thetax * (y - 1.0) -
                           2.0 * k2 * (y - 1.0) * (y - x)) *
                              uh +
                          k2 * k2 * (y - x - 1.0) - k2 * (p.theta1 + x * p.thetax);
  const double s1_second = R * uh * uh +
                           ((p.theta1 + p.thetainf) * (y - x) + x * p.thetax * (y - 1.0) -
                            2.0 * k2 * (y - 1.0) * (y - x)) *
                               uh +
                           k2 * k2 * (y - x) - k2 * (p.theta1 + x * p.thetax) - p.k1 * k2;
  const double s_inf = R * uh * uh +
                       (p.theta1 * (y - x) + x * (p.thetax + p.thetainf) * (y - 1.0) -
                        2.0 * k2 * (y - 1.0) * (y - x)) *
                           uh +
                       k2 * k2 * (y - 1.0) - k2 * (p.theta1 + x * p.thetax) - x * p.k1 * k2;

  a.u0 = y / (x * p.thetainf) * s1_first;
  a.u1 = -(y - 1.0) / ((x - 1.0) * p.thetainf) * s1_second;
  a.ux = (y - x) / (x * (x - 1.0) * p.thetainf) * s_inf;

  const double uscale = std::max({1.0, std::abs(a.u0), std::abs(a.u1), std::abs(a.ux)});
  if (std::min({std::abs(a.u0), std::abs(a.u1), std::abs(a.ux)}) < 1e-13 * uscale) {
    throw GaugeDegenerateError("build_auxiliary: vanishing residue parameter u_i");
  }

  a.w0 = kgauge * y / (x * a.u0);
  a.w1 = -kgauge * (y - 1.0) / ((x - 1.0) * a.u1);
  a.wx = kgauge * (y - x) / (x * (x - 1.0) * a.ux);

  // the paper's own consistency relations; discrepancies are reported, not patched
  const double r_sum = a.u0 + a.u1 + a.ux - k2;
  const double r_wu = a.w0 * a.u0 + a.w1 * a.u1 + a.wx * a.ux;
  const double r_quot = (a.u0 + p.theta0) / a.w0 + (a.u1 + p.theta1) / a.w1 +
                        (a.ux + p.thetax) / a.wx;
  const double r_k = (x + 1.0) * a.w0 * a.u0 + x * a.w1 * a.u1 + a.wx * a.ux - kgauge;
  const double wscale =
      std::max({1.0, std::abs(a.w0 * a.u0), std::abs(a.w1 * a.u1), std::abs(a.wx * a.ux)});
  if (std::abs(r_sum) > 1e-6 * uscale || std::abs(r_wu) > 1e-6 * wscale ||
      std::abs(r_quot) > 1e-6 * uscale || std::abs(r_k) > 1e-6 * wscale) {
    std::ostringstream msg;
    msg << "build_auxiliary: residue constraints violated (sum=" << r_sum << ", wu=" << r_wu
        << ", quot=" << r_quot << ", k=" << r_k << ")";
    throw InconsistentMatricesError(msg.str());
  }
  return a;
}

namespace {

Mat2 residue_matrix(double u, double w, double theta) {
  return Mat2{{{u + theta, -w * u}, {(u + theta) / w, -u}}};
}

CMat2 cdiv(const Mat2& m, std::complex<double> z) {
  CMat2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = m[i][j] / z;
  return out;
}

}  // namespace

CMat2 LaxMatrices::a6(std::complex<double> z) const {
  const CMat2 t0 = cdiv(A0, z), t1 = cdiv(A1, z - 1.0), tx = cdiv(Ax, z - x);
  CMat2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = t0[i][j] + t1[i][j] + tx[i][j];
  return out;
}

CMat2 LaxMatrices::l6(std::complex<double> z) const { return cdiv(Ax, -(z - x)); }

LaxMatrices assemble_a6_l6(const PViAuxiliary& aux, const ThetaParams& p, double x) {
  LaxMatrices m;
  m.x = x;
  m.k1 = p.k1;
  m.k2 = p.k2;
  m.A0 = residue_matrix(aux.u0, aux.w0, p.theta0);
  m.A1 = residue_matrix(aux.u1, aux.w1, p.theta1);
  m.Ax = residue_matrix(aux.ux, aux.wx, p.thetax);

  double scale = 1.0;
  for (const Mat2* a : {&m.A0, &m.A1, &m.Ax})
    for (const auto& row : *a)
      for (double v : row) scale = std::max(scale, std::abs(v));
  const Mat2 ainf{{{-p.k1, 0.0}, {0.0, -p.k2}}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double sum = m.A0[i][j] + m.A1[i][j] + m.Ax[i][j] - ainf[i][j];
      if (std::abs(sum) > 1e-6 * scale) {
        throw InconsistentMatricesError("assemble_a6_l6: residue sum does not match -A_inf");
      }
    }
  }
  return m;
}

namespace {

std::complex<double> det2(const CMat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

}  // namespace

double extract_f6(const LaxMatrices& m, double x, const ThetaParams& p, std::uint64_t seed) {
  const double r = 3.0 * std::max(1.0, std::abs(x));
  std::mt19937_64 gen(seed);
  const double phi0 =
      std::uniform_real_distribution<double>(0.0, 2.0 * kPi / 9.0)(gen);

  std::array<std::complex<double>, 9> zs, vals;
  double scale = 0.0;
  for (int j = 0; j < 9; ++j) {
    const double ang = phi0 + 2.0 * kPi * j / 9.0;
    const std::complex<double> z = r * std::exp(std::complex<double>(0.0, ang));
    zs[j] = z;
    const std::complex<double> R = z * (z - 1.0) * (z - x);
    vals[j] = det2(m.a6(z)) * R * R;
    scale = std::max(scale, std::abs(vals[j]));
  }

  // 9-point scaled-DFT inversion: exact least squares for degree <= 8
  std::array<std::complex<double>, 9> coeff{};
  for (int k = 0; k < 9; ++k) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < 9; ++j) {
      const double ang = -(phi0 + 2.0 * kPi * j / 9.0) * k;
      acc += vals[j] * std::exp(std::complex<double>(0.0, ang));
    }
    coeff[k] = acc / (9.0 * std::pow(r, k));
  }

  double resid = 0.0;
  for (int k = 5; k < 9; ++k) resid = std::max(resid, std::abs(coeff[k]) * std::pow(r, k));
  for (int k = 0; k < 5; ++k) resid = std::max(resid, std::abs(coeff[k].imag()) * std::pow(r, k));
  if (resid > 1e-8 * std::max(1.0, scale)) {
    throw InconsistentMatricesError("extract_f6: polynomial fit residual too large");
  }
  const double lead = coeff[4].real();
  if (std::abs(lead - p.k1 * p.k2) > 1e-8 * std::max(1.0, std::abs(p.k1 * p.k2))) {
    throw InconsistentMatricesError("extract_f6: leading coefficient does not equal k1 k2");
  }
  // the raw z^3 coefficient exceeds the closed-form convention by x thetax (1 - k2)
  return coeff[3].real() - x * p.thetax * (1.0 - p.k2);
}

double f6_closed_form(const PViAuxiliary& aux, const ThetaParams& p, double x) {
  return (p.k1 - p.k2) * (aux.u1 + x * aux.ux) - x * (2.0 * p.k1 * p.k2 + p.thetax) -
         2.0 * p.k1 * p.k2 - p.k2 * p.theta1;
}

namespace {

struct Eq17Terms {
  std::array<double, 7> t{};
  double residual() const {
    double acc = 0;
    for (double v : t) acc += v;
    return acc;
  }
  double scale() const {
    double m = 0;
    for (double v : t) m = std::max(m, std::abs(v));
    return m;
  }
};

Eq17Terms eq17_terms(const OdeState& s, const ThetaParams& p, double F6) {
  const double x = s.x, y = s.y, dy = s.dy;
  const double k1 = p.k1, k2 = p.k2;
  const double C = (x + 1.0) * (k1 + k2) + x * p.thetax + p.theta1;
  const double S = C * C - 1.0 - 2.0 * x * p.theta0 * (k1 + k2) +
                   4.0 * k1 * k2 * (x * x + x + 1.0) +
                   4.0 * x * (x + 1.0) * (1.0 - k2) * p.thetax + 4.0 * (x + 1.0) * F6;
  Eq17Terms out;
  out.t[0] = x * x * (x - 1.0) * (x - 1.0) * dy * dy;
  out.t[1] = -2.0 * dy * x * (x - 1.0) * y * (y - 1.0);
  out.t[2] = y * y * y * y * (1.0 - (k1 - k2) * (k1 - k2));
  out.t[3] = 2.0 * y * y * y *
             ((k1 + k2) * C - 1.0 + 2.0 * x * p.thetax * (1.0 - k2) + 2.0 * F6);
  out.t[4] = -y * y * S;
  out.t[5] = 2.0 * y * x *
             (2.0 * k1 * k2 * (x + 1.0) + 2.0 * x * p.thetax * (1.0 - k2) + 2.0 * F6 -
              p.theta0 * C);
  out.t[6] = -x * x * p.theta0 * p.theta0;
  return out;
}

}  // namespace

double curve_residual_eq17(const OdeState& s, const ThetaParams& p, double F6) {
  return eq17_terms(s, p, F6).residual();
}

double curve_scale_eq17(const OdeState& s, const ThetaParams& p, double F6) {
  return eq17_terms(s, p, F6).scale();
}

namespace {

// adaptive Simpson for the gauge-flow increment
double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double fm, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, fa, b, fb, fm, whole, tol, 40);
}

CMat2 commutator(const CMat2& a, const CMat2& b) {
  CMat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::complex<double> ab = 0, ba = 0;
      for (int l = 0; l < 2; ++l) {
        ab += a[i][l] * b[l][j];
        ba += b[i][l] * a[l][j];
      }
      out[i][j] = ab - ba;
    }
  return out;
}

}  // namespace

ZeroCurvatureReport zero_curvature_residual_pvi(const painleve::Trajectory& tr,
                                                const ThetaParams& p,
                                                std::span<const double> x_samples,
                                                std::span<const std::complex<double>> z_samples,
                                                double fd_step) {
  ZeroCurvatureReport rep;
  const double lo = std::min(tr.x_begin(), tr.x_end());
  const double hi = std::max(tr.x_begin(), tr.x_end());

  auto gauge_rate = [&](double x) {
    const OdeState st = tr.at(x);
    return (p.thetainf - 1.0) * (st.y - x) / (x * (x - 1.0));
  };

  for (double x0 : x_samples) {
    double h = fd_step;
    if (h == 0.0) {
      h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x0));
    }
    if (x0 - h < lo || x0 + h > hi) continue;
    rep.fd_step = h;

    auto matrices_at = [&](double x) {
      const OdeState st = tr.at(x);
      // local gauge increment relative to the stencil center
      const double logk = integrate_simpson(gauge_rate, x0, x, 1e-14);
      const PViAuxiliary aux = build_auxiliary(st, p, std::exp(logk));
      return assemble_a6_l6(aux, p, x);
    };

    const LaxMatrices mp = matrices_at(x0 + h);
    const LaxMatrices mm = matrices_at(x0 - h);
    const LaxMatrices mc = matrices_at(x0);

    for (const auto& z : z_samples) {
      const CMat2 ap = mp.a6(z), am = mm.a6(z);
      CMat2 dA;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) dA[i][j] = (ap[i][j] - am[i][j]) / (2.0 * h);

      // D_z L6 = Ax/(z-x)^2
      const std::complex<double> dz = z - x0;
      CMat2 dL;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) dL[i][j] = mc.Ax[i][j] / (dz * dz);

      const CMat2 comm = commutator(mc.a6(z), mc.l6(z));
      double resid = 0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          resid = std::max(resid, std::abs(dA[i][j] - dL[i][j] + comm[i][j]));
      rep.samples.push_back({x0, z, resid});
      rep.max_residual = std::max(rep.max_residual, resid);
    }
  }
  return rep;
}

Mat2 pi_a1(const OdeState& s, double bigX, double z) {
  return Mat2{{{-s.dy, 2.0 * s.y + 4.0 * z},
               {-bigX - s.y * s.y + 2.0 * s.y * z - 4.0 * z * z, s.dy}}};
}

double det_a1_check(const OdeState& s, double bigX, std::span<const double> z_samples) {
  const double f1 = painleve::pi_first_integral(s, bigX);
  double worst = 0.0;
  for (double z : z_samples) {
    const Mat2 a = pi_a1(s, bigX, z);
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    const double target = 16.0 * z * z * z + 4.0 * bigX * z - f1;
    worst = std::max(worst, std::abs(det - target));
  }
  return worst;
}

}  // namespace painwhit::laxpair
