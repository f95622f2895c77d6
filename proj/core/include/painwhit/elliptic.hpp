#pragma once

#include <stdexcept>
#include <string>

namespace painwhit::elliptic {

/// Thrown when an argument lands in a regime the real-valued kernels do not
/// cover (complex root pair of the invariant cubic, collapsed lattice, ...).
class UnsupportedRegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown by the Weierstrass evaluator when the argument is closer to a
/// lattice point than the pole guard allows. Carries the offending distance.
class PoleProximityError : public std::domain_error {
 public:
  PoleProximityError(const std::string& what, double distance)
      : std::domain_error(what), distance_(distance) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

/// Roots of 4t^3 - g2 t - g3.
///
/// all_real: r1 >= r2 >= r3. Otherwise r1 is the single real root and the
/// complex pair is r2 +/- i r3 (r3 > 0).
struct CubicRoots {
  bool all_real;
  double r1, r2, r3;
};

CubicRoots solve_depressed_cubic(double g2, double g3);

/// Complete elliptic integral K(k^2), arithmetic-geometric mean.
/// Domain 0 <= ksq < 1 (the integral diverges at ksq = 1).
double complete_K(double ksq);

/// Complete elliptic integral E(k^2) by the AGM-family recurrence.
/// Domain 0 <= ksq <= 1, E(1) = 1.
double complete_E(double ksq);

/// Invariants, ordered real roots, modulus and period integrals of the
/// curve w^2 = 4t^3 - g2 t - g3 in the three-real-roots regime.
struct WeierstrassData {
  double g2 = 0, g3 = 0;
  double e1 = 0, e2 = 0, e3 = 0;  // descending
  double ksq = 0;                 // (e2 - e3)/(e1 - e3)
  double bigK = 0, bigE = 0;

  /// Real period 2K/sqrt(e1 - e3) of wp along the real axis.
  double real_period() const;
};

/// Build WeierstrassData from (g2, g3). Throws UnsupportedRegimeError when
/// the cubic has a complex pair, or (via complete_K) when e1 == e2.
WeierstrassData weierstrass_data(double g2, double g3);

/// Fraction of the real period below which weierstrass_p refuses to
/// approach a lattice point.
inline constexpr double pole_guard_fraction = 1e-6;

/// Weierstrass wp(tau; g2, g3) on the real axis, three-real-roots regime.
/// Truncated Laurent series near zero plus the duplication formula.
double weierstrass_p(double tau, const WeierstrassData& wd);
double weierstrass_p(double tau, double g2, double g3);

/// d/dtau wp, computed through the same series/duplication path (kept
/// independent of the cubic identity so the identity stays a real test).
double weierstrass_p_prime(double tau, const WeierstrassData& wd);
double weierstrass_p_prime(double tau, double g2, double g3);

/// Period average of 2*wp along the real oscillation (the bounded branch
/// between 2 e3 and 2 e2):  m = 2 e1 + 2 (e3 - e1) E/K.
double mean_wp(double g2, double g3);
double mean_wp(const WeierstrassData& wd);

}  // namespace painwhit::elliptic
