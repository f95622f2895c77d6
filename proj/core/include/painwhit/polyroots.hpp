#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace painwhit::polyroots {

inline std::complex<double> horner(std::span<const double> coeffs, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
  return acc;
}

inline double horner(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

/// All complex roots of sum_i coeffs[i] x^i (ascending order) by
/// Durand-Kerner iteration. Trailing near-zero leading coefficients are
/// dropped relative to the largest coefficient.
inline std::vector<std::complex<double>> all_roots(std::span<const double> coeffs) {
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  int deg = static_cast<int>(coeffs.size()) - 1;
  while (deg > 0 && std::abs(coeffs[deg]) < 1e-14 * scale) --deg;
  std::vector<std::complex<double>> roots;
  if (deg <= 0 || scale == 0.0) return roots;

  std::vector<double> c(coeffs.begin(), coeffs.begin() + deg + 1);
  const double lead = c[deg];
  for (auto& v : c) v /= lead;

  // Cauchy bound for the starting circle
  double bound = 0.0;
  for (int i = 0; i < deg; ++i) bound = std::max(bound, std::abs(c[i]));
  bound += 1.0;

  roots.resize(deg);
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> w = 1.0;
  for (int i = 0; i < deg; ++i) {
    w *= seed;
    roots[i] = bound * w / std::abs(w) * (0.3 + 0.7 * (i + 1.0) / deg);
  }

  for (int iter = 0; iter < 400; ++iter) {
    double delta = 0.0;
    for (int i = 0; i < deg; ++i) {
      std::complex<double> denom = 1.0;
      for (int j = 0; j < deg; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      if (denom == 0.0) {
        roots[i] += 1e-8 * bound * seed;
        continue;
      }
      const std::complex<double> corr = horner(std::span<const double>(c), roots[i]) / denom;
      roots[i] -= corr;
      delta = std::max(delta, std::abs(corr));
    }
    if (delta < 1e-14 * bound) break;
  }
  return roots;
}

/// Real roots (ascending), classified by |Im| <= imag_tol * (1 + |Re|) and
/// polished on the real line by Newton steps.
inline std::vector<double> real_roots(std::span<const double> coeffs,
                                      std::vector<std::complex<double>>* all = nullptr,
                                      double imag_tol = 1e-7) {
  auto rts = all_roots(coeffs);
  std::vector<double> deriv;
  if (coeffs.size() > 1) {
    deriv.resize(coeffs.size() - 1);
    for (std::size_t i = 1; i < coeffs.size(); ++i) deriv[i - 1] = coeffs[i] * double(i);
  }
  std::vector<double> out;
  for (auto& r : rts) {
    if (std::abs(r.imag()) <= imag_tol * (1.0 + std::abs(r.real()))) {
      double x = r.real();
      for (int i = 0; i < 3; ++i) {
        const double f = horner(coeffs, x);
        const double df = horner(std::span<const double>(deriv), x);
        if (df == 0.0) break;
        const double step = f / df;
        if (!std::isfinite(step)) break;
        x -= step;
      }
      r = x;  // report the polished value in `all` too
      out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  if (all) *all = std::move(rts);
  return out;
}

}  // namespace painwhit::polyroots
