#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qsd {

/// A point of [0,1] stored together with its distance to 1, so that both y and 1-y
/// keep full relative precision near the endpoints.
struct UnitPoint {
  double value = 0.0;
  double complement = 1.0;

  static UnitPoint from(double y) { return {y, 1.0 - y}; }
};

struct UnitInterval {
  UnitPoint lo{0.0, 1.0};
  UnitPoint hi{1.0, 0.0};

  [[nodiscard]] bool empty() const { return !(hi.value > lo.value); }
};

/// Uniform open midpoint grid on [0,1]: n cells of width 1/n, nodes at (j+1/2)/n.
class Grid {
 public:
  explicit Grid(std::size_t n_cells);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] double weight() const { return 1.0 / static_cast<double>(n_); }
  [[nodiscard]] double node(std::size_t j) const {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(n_);
  }
  [[nodiscard]] double edge(std::size_t k) const {
    return static_cast<double>(k) / static_cast<double>(n_);
  }
  [[nodiscard]] UnitPoint edge_point(std::size_t k) const {
    return {edge(k), static_cast<double>(n_ - k) / static_cast<double>(n_)};
  }
  /// Index of the cell containing x; x = 1 maps to the last cell.
  [[nodiscard]] std::size_t cell_of(double x) const;
  [[nodiscard]] std::vector<double> nodes() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_;
};

/// Throws ArgumentError when n_cells < 2.
[[nodiscard]] Grid build_grid(std::size_t n_cells);

/// Nonnegative piecewise-constant function on a Grid (value j on cell j).
class Density {
 public:
  Density(Grid grid, std::vector<double> values);

  static Density uniform(const Grid& grid);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double operator[](std::size_t j) const { return values_[j]; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  /// L1 norm with respect to Lebesgue measure.
  [[nodiscard]] double mass() const;
  [[nodiscard]] Density normalized() const;
  /// Piecewise-constant evaluation at x in [0,1].
  [[nodiscard]] double at(double x) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Weighted sum sum_j u_j v_j w over a grid.
[[nodiscard]] double grid_inner(const Grid& grid, std::span<const double> u,
                                std::span<const double> v);

/// Discrete CDF at the right edge of each cell.
[[nodiscard]] std::vector<double> cumulative(const Density& density);

/// sup_j |F_1(j) - F_2(j)| over cell edges; both densities must share a grid.
[[nodiscard]] double cdf_sup_distance(const Density& lhs, const Density& rhs);

}  // namespace qsd
