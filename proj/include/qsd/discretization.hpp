#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsd/grid.hpp"
#include "qsd/logistic_kernel.hpp"

namespace qsd {

enum class OperatorKind { forward, transfer };

[[nodiscard]] std::string to_string(OperatorKind kind);

/// Dense nonnegative n x n matrix acting on grid value-vectors, stored row-major.
class DiscreteOperator {
 public:
  DiscreteOperator(Grid grid, OperatorKind kind, std::vector<double> entries);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] OperatorKind kind() const { return kind_; }
  [[nodiscard]] std::size_t size() const { return grid_.size(); }
  [[nodiscard]] double operator()(std::size_t j, std::size_t k) const {
    return entries_[j * size() + k];
  }
  [[nodiscard]] std::span<const double> row(std::size_t j) const {
    return {entries_.data() + j * size(), size()};
  }
  [[nodiscard]] std::span<const double> entries() const { return entries_; }
  [[nodiscard]] double row_sum(std::size_t j) const;

  /// out = A v (row-parallel, each row reduced sequentially).
  void apply(std::span<const double> v, std::span<double> out) const;
  [[nodiscard]] std::vector<double> apply(std::span<const double> v) const;

  /// A * A, same kind and grid.
  [[nodiscard]] DiscreteOperator squared() const;

 private:
  Grid grid_;
  OperatorKind kind_;
  std::vector<double> entries_;
};

/// Optional restriction to a subinterval D: rows whose node lies outside D are zero and
/// every row is integrated over D only, i.e. the matrix of 1_D A(1_D f).
struct Restriction {
  UnitInterval domain;
};

[[nodiscard]] DiscreteOperator assemble_forward(const LogisticParams& p, const Grid& grid,
                                                const std::optional<Restriction>& r = {});
[[nodiscard]] DiscreteOperator assemble_transfer(const LogisticParams& p, const Grid& grid,
                                                 const std::optional<Restriction>& r = {});

/// |<P f, g> - <f, L g>| with grid-weighted inner products.
[[nodiscard]] double duality_residual(const DiscreteOperator& forward,
                                      const DiscreteOperator& transfer, const Density& f,
                                      const Density& g);

/// Block operator mapping [0,1/2) onto [1/2,1) and back, uniform within blocks, row sums 0.9.
[[nodiscard]] DiscreteOperator synthetic_period2_operator(const Grid& grid);

/// CSV: header "node,weight,c0,...,c{n-1}", one line per row.
void write_operator_csv(const DiscreteOperator& op, const std::filesystem::path& path);

/// Binary cache: "QSDOP001", a, b (f64), n (u64), kind (u8), then n*n f64 row-major,
/// little-endian host order.
void write_operator_cache(const DiscreteOperator& op, const LogisticParams& p,
                          const std::filesystem::path& path);
/// Returns nullopt when the file is missing or keyed by different (a, b, n, kind).
[[nodiscard]] std::optional<DiscreteOperator> read_operator_cache(
    const LogisticParams& p, const Grid& grid, OperatorKind kind,
    const std::filesystem::path& path);

}  // namespace qsd
