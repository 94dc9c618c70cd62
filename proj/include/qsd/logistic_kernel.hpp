#pragma once

#include <functional>
#include <span>

#include "qsd/grid.hpp"

namespace qsd {

/// Noise range [a,b] of the random logistic map y -> w y (1-y), w ~ Unif[a,b].
class LogisticParams {
 public:
  /// Throws ArgumentError unless 0 < a < 4 < b, both finite.
  LogisticParams(double a, double b);

  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] double width() const { return b_ - a_; }
  /// a/4: beyond this point the lower band edge leaves the inner hole.
  [[nodiscard]] double kink() const { return a_ / 4.0; }
  /// (4a^2 - a^3)/16, left end of the interval where g is expected to be monotone.
  [[nodiscard]] double monotone_breakpoint() const { return (4.0 * a_ * a_ - a_ * a_ * a_) / 16.0; }

 private:
  double a_;
  double b_;
};

struct BoundaryMaps {
  UnitPoint alpha_minus;
  UnitPoint alpha_plus;
  UnitPoint beta_minus;
  UnitPoint beta_plus;
};

/// Preimage boundaries of x under y -> b y(1-y) (alpha) and y -> a y(1-y) evaluated at
/// min(x, a/4) (beta). x must lie in [0,1].
[[nodiscard]] BoundaryMaps boundary_maps(const LogisticParams& p, double x);

/// Integral of dy/(y(1-y)) over [lo, hi]; zero when the interval is empty.
[[nodiscard]] double log_weight(UnitPoint lo, UnitPoint hi);

/// Transition density from x in (0,1) to y in [0,1]. Throws DomainError at x in {0,1}.
[[nodiscard]] double kernel_density(const LogisticParams& p, double x, double y);

/// Probability of staying in [0,1] after one step from x.
[[nodiscard]] double survival_probability(const LogisticParams& p, double x);

using RealFunction = std::function<double(double)>;

/// Forward kernel applied to a callable (adaptive Gauss-Kronrod).
[[nodiscard]] double apply_forward(const LogisticParams& p, const RealFunction& f, double x);
/// Forward kernel applied to a piecewise-constant density (exact).
[[nodiscard]] double apply_forward(const LogisticParams& p, const Density& f, double x);

/// Transfer operator applied to a callable. Quadrature runs in t = ln(y/(1-y)), where the
/// weight becomes dt. At x = 0 returns the continuous extension ln(b/a)/(b-a) (g(0)+g(1)).
[[nodiscard]] double apply_transfer(const LogisticParams& p, const RealFunction& g, double x);
/// Transfer operator applied to a piecewise-constant density (exact log antiderivative).
[[nodiscard]] double apply_transfer(const LogisticParams& p, const Density& g, double x);

/// Closed form of the transfer operator applied to the constant 1. x in [0,1]; x = 0 gives
/// the continuous extension 2 ln(b/a)/(b-a).
[[nodiscard]] double transfer_of_one(const LogisticParams& p, double x);

/// sup_x of transfer_of_one, attained at x = a/4.
[[nodiscard]] double transfer_sup(const LogisticParams& p);

/// Row of the forward matrix at point x in (0,1): out[k] = |cell_k n band n clip| / ((b-a)u).
void forward_cell_weights(const LogisticParams& p, const Grid& grid, double x,
                          const UnitInterval& clip, std::span<double> out);

/// Row of the transfer matrix at point x in (0,1]: integral of dy/((b-a)y(1-y)) over
/// cell_k n clip n ([alpha-, beta-] u [beta+, alpha+]).
void transfer_cell_weights(const LogisticParams& p, const Grid& grid, double x,
                           const UnitInterval& clip, std::span<double> out);

}  // namespace qsd
