#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace painwhit::ode {

enum class StopReason {
  Completed,
  PoleDetected,
  SingularityProximity,
  StepUnderflow,
  MaxSteps,
  RegimeExit,
  OvalCollapse,
  DomainEdge,
  ImplicitDegeneracy,
};

const char* to_string(StopReason r);

/// dy/dx = f(x, y); f writes the derivative into dydx.
using Rhs = std::function<void(double x, std::span<const double> y, std::span<double> dydx)>;

/// Checked at every accepted point; returning a reason stops the run there.
using Guard = std::function<std::optional<StopReason>(double x, std::span<const double> y)>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h0 = 0.0;  // 0: choose automatically
  double hmax = std::numeric_limits<double>::infinity();
  bool fixed_step = false;
  double fixed_h = 1e-2;
  std::size_t max_steps = 10'000'000;
};

/// One accepted Dormand-Prince step with its order-4 continuous extension.
struct DenseStep {
  double x0 = 0, h = 0;
  std::vector<double> rcont;  // 5*n interpolation coefficients
};

class Solution {
 public:
  Solution(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  StopReason stop() const { return stop_; }
  const std::string& stop_detail() const { return stop_detail_; }

  const std::vector<double>& xs() const { return xs_; }
  /// State at accepted point i (size dim).
  std::span<const double> state(std::size_t i) const;
  std::size_t size() const { return xs_.size(); }

  double x_begin() const { return xs_.front(); }
  double x_end() const { return xs_.back(); }

  /// Dense-output evaluation; x must lie inside the covered interval.
  void eval(double x, std::span<double> out) const;
  double eval1(double x, std::size_t comp = 0) const;

 private:
  friend Solution integrate(const Rhs&, double, std::span<const double>, double, const Options&,
                            const Guard&);
  std::size_t dim_;
  std::vector<double> xs_;
  std::vector<double> states_;  // row-major, dim per point
  std::vector<DenseStep> steps_;
  StopReason stop_ = StopReason::Completed;
  std::string stop_detail_;
};

/// Adaptive (or fixed-step) Dormand-Prince 5(4) with dense output.
/// Integrates from x0 to x_end (either direction).
Solution integrate(const Rhs& rhs, double x0, std::span<const double> y0, double x_end,
                   const Options& opts = {}, const Guard& guard = {});

}  // namespace painwhit::ode
