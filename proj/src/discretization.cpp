#include "qsd/discretization.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qsd/errors.hpp"
#include "qsd/io.hpp"

namespace qsd {

namespace {

constexpr char kCacheMagic[8] = {'Q', 'S', 'D', 'O', 'P', '0', '0', '1'};

using RowFn = void (*)(const LogisticParams&, const Grid&, double, const UnitInterval&,
                       std::span<double>);

DiscreteOperator assemble(const LogisticParams& p, const Grid& grid,
                          const std::optional<Restriction>& r, OperatorKind kind, RowFn fill) {
  const std::size_t n = grid.size();
  const UnitInterval clip = r ? r->domain : UnitInterval{};
  std::vector<double> entries(n * n, 0.0);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < rows; ++j) {
    const double x = grid.node(static_cast<std::size_t>(j));
    if (r && (x < clip.lo.value || x > clip.hi.value)) continue;
    fill(p, grid, x, clip, std::span<double>(entries.data() + j * rows, n));
  }
  return DiscreteOperator(grid, kind, std::move(entries));
}

}  // namespace

std::string to_string(OperatorKind kind) {
  return kind == OperatorKind::forward ? "forward" : "transfer";
}

DiscreteOperator::DiscreteOperator(Grid grid, OperatorKind kind, std::vector<double> entries)
    : grid_(grid), kind_(kind), entries_(std::move(entries)) {
  if (entries_.size() != grid_.size() * grid_.size()) {
    throw ArgumentError("operator entries do not form an n x n matrix");
  }
  for (double v : entries_) {
    if (!std::isfinite(v) || v < 0.0) throw ArgumentError("operator entries must be finite and >= 0");
  }
}

double DiscreteOperator::row_sum(std::size_t j) const {
  // Neumaier compensated sum
  double s = 0.0;
  double c = 0.0;
  for (double v : row(j)) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + c;
}

void DiscreteOperator::apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = size();
  if (v.size() != n || out.size() != n) throw ArgumentError("apply: vector size mismatch");
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < rows; ++j) {
    const double* a = entries_.data() + j * rows;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * v[k];
    out[static_cast<std::size_t>(j)] = s;
  }
}

std::vector<double> DiscreteOperator::apply(std::span<const double> v) const {
  std::vector<double> out(size());
  apply(v, out);
  return out;
}

DiscreteOperator DiscreteOperator::squared() const {
  const std::size_t n = size();
  std::vector<double> out(n * n, 0.0);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < rows; ++j) {
    double* o = out.data() + j * rows;
    const double* a = entries_.data() + j * rows;
    for (std::size_t m = 0; m < n; ++m) {
      if (a[m] == 0.0) continue;
      const double* b = entries_.data() + m * n;
      for (std::size_t k = 0; k < n; ++k) o[k] += a[m] * b[k];
    }
  }
  return DiscreteOperator(grid_, kind_, std::move(out));
}

DiscreteOperator assemble_forward(const LogisticParams& p, const Grid& grid,
                                  const std::optional<Restriction>& r) {
  return assemble(p, grid, r, OperatorKind::forward, &forward_cell_weights);
}

DiscreteOperator assemble_transfer(const LogisticParams& p, const Grid& grid,
                                   const std::optional<Restriction>& r) {
  return assemble(p, grid, r, OperatorKind::transfer, &transfer_cell_weights);
}

double duality_residual(const DiscreteOperator& forward, const DiscreteOperator& transfer,
                        const Density& f, const Density& g) {
  const Grid& grid = forward.grid();
  if (!(transfer.grid() == grid) || !(f.grid() == grid) || !(g.grid() == grid)) {
    throw ArgumentError("duality residual: grid mismatch");
  }
  const auto pf = forward.apply(f.values());
  const auto lg = transfer.apply(g.values());
  return std::abs(grid_inner(grid, pf, g.values()) - grid_inner(grid, f.values(), lg));
}

DiscreteOperator synthetic_period2_operator(const Grid& grid) {
  const std::size_t n = grid.size();
  if (n % 2 != 0) throw ArgumentError("period-2 fixture needs an even cell count");
  const std::size_t h = n / 2;
  const double v = 0.9 / static_cast<double>(h);
  std::vector<double> entries(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k0 = j < h ? h : 0;
    for (std::size_t k = k0; k < k0 + h; ++k) entries[j * n + k] = v;
  }
  return DiscreteOperator(grid, OperatorKind::forward, std::move(entries));
}

void write_operator_csv(const DiscreteOperator& op, const std::filesystem::path& path) {
  const std::size_t n = op.size();
  std::string s = "node,weight";
  for (std::size_t k = 0; k < n; ++k) s += ",c" + std::to_string(k);
  s += '\n';
  for (std::size_t j = 0; j < n; ++j) {
    s += format_double(op.grid().node(j)) + ',' + format_double(op.grid().weight());
    for (double v : op.row(j)) s += ',' + format_double(v);
    s += '\n';
  }
  write_text(path, s);
}

void write_operator_cache(const DiscreteOperator& op, const LogisticParams& p,
                          const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const double a = p.a();
  const double b = p.b();
  const std::uint64_t n = op.size();
  const std::uint8_t kind = op.kind() == OperatorKind::forward ? 0 : 1;
  out.write(kCacheMagic, sizeof kCacheMagic);
  out.write(reinterpret_cast<const char*>(&a), sizeof a);
  out.write(reinterpret_cast<const char*>(&b), sizeof b);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&kind), sizeof kind);
  const auto e = op.entries();
  out.write(reinterpret_cast<const char*>(e.data()),
            static_cast<std::streamsize>(e.size() * sizeof(double)));
  if (!out) throw Error("write failed: " + path.string());
}

std::optional<DiscreteOperator> read_operator_cache(const LogisticParams& p, const Grid& grid,
                                                    OperatorKind kind,
                                                    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  double a = 0.0;
  double b = 0.0;
  std::uint64_t n = 0;
  std::uint8_t k = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&a), sizeof a);
  in.read(reinterpret_cast<char*>(&b), sizeof b);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&k), sizeof k);
  if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) return std::nullopt;
  const std::uint8_t want = kind == OperatorKind::forward ? 0 : 1;
  if (a != p.a() || b != p.b() || n != grid.size() || k != want) return std::nullopt;
  std::vector<double> entries(n * n);
  in.read(reinterpret_cast<char*>(entries.data()),
          static_cast<std::streamsize>(entries.size() * sizeof(double)));
  if (!in) return std::nullopt;
  return DiscreteOperator(grid, kind, std::move(entries));
}

}  // namespace qsd
