#include "qsd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsd/errors.hpp"

namespace qsd {

Grid::Grid(std::size_t n_cells) : n_(n_cells) {
  if (n_cells < 2) {
    throw ArgumentError("grid needs at least 2 cells, got " + std::to_string(n_cells));
  }
}

std::size_t Grid::cell_of(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ArgumentError("point outside [0,1]");
  }
  const auto j = static_cast<std::size_t>(x * static_cast<double>(n_));
  return std::min(j, n_ - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = node(j);
  return out;
}

Grid build_grid(std::size_t n_cells) { return Grid(n_cells); }

Density::Density(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ArgumentError("density size does not match grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ArgumentError("density values must be finite and nonnegative");
    }
  }
}

Density Density::uniform(const Grid& grid) {
  return Density(grid, std::vector<double>(grid.size(), 1.0));
}

double Density::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.weight();
}

Density Density::normalized() const {
  const double m = mass();
  if (!(m > 0.0)) throw ArgumentError("cannot normalize a density with zero mass");
  std::vector<double> out(values_);
  for (double& v : out) v /= m;
  return Density(grid_, std::move(out));
}

double Density::at(double x) const { return values_[grid_.cell_of(x)]; }

double grid_inner(const Grid& grid, std::span<const double> u, std::span<const double> v) {
  if (u.size() != grid.size() || v.size() != grid.size()) {
    throw ArgumentError("vector size does not match grid");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * v[j];
  return s * grid.weight();
}

std::vector<double> cumulative(const Density& density) {
  std::vector<double> out(density.size());
  double s = 0.0;
  for (std::size_t j = 0; j < density.size(); ++j) {
    s += density[j] * density.grid().weight();
    out[j] = s;
  }
  return out;
}

double cdf_sup_distance(const Density& lhs, const Density& rhs) {
  if (!(lhs.grid() == rhs.grid())) throw ArgumentError("cdf distance: grid mismatch");
  const auto fl = cumulative(lhs);
  const auto fr = cumulative(rhs);
  double d = 0.0;
  for (std::size_t j = 0; j < fl.size(); ++j) d = std::max(d, std::abs(fl[j] - fr[j]));
  return d;
}

}  // namespace qsd
