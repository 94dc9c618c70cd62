#include "qsd/truncated.hpp"

#include <cmath>
#include <limits>

#include "qsd/errors.hpp"
#include "qsd/io.hpp"

namespace qsd {

TruncatedDomain::TruncatedDomain(double epsilon) : eps_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.375)) throw ArgumentError("epsilon must lie in (0, 3/8)");
  const double lo = 4.0 * epsilon * (1.0 - epsilon) * (1.0 - epsilon);
  interval_ = {UnitPoint::from(lo), {1.0 - epsilon, epsilon}};
}

DiscreteOperator assemble_truncated(const LogisticParams& p, const Grid& grid,
                                    const TruncatedDomain& domain, OperatorKind kind) {
  std::size_t inside = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) inside += domain.contains(grid.node(j)) ? 1 : 0;
  if (inside < 2) throw ArgumentError("truncated domain covers fewer than 2 cells");
  const Restriction r{domain.interval()};
  return kind == OperatorKind::forward ? assemble_forward(p, grid, r)
                                       : assemble_transfer(p, grid, r);
}

SweepResult epsilon_sweep(const LogisticParams& p, const Grid& grid,
                          const std::vector<double>& eps_list, const SolveOptions& opt,
                          const std::optional<EigenPair>& full_pair) {
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    (void)TruncatedDomain(eps_list[i]);
    if (i && !(eps_list[i] < eps_list[i - 1])) {
      throw ArgumentError("epsilon list must be strictly decreasing");
    }
  }
  const EigenPair full =
      full_pair ? *full_pair : leading_eigenpair(assemble_transfer(p, grid), opt.tol, opt.max_iter);
  if (!(full.vector.grid() == grid)) throw ArgumentError("sweep: reference grid mismatch");
  SweepResult out{full.lambda, full.vector, {}};
  out.entries.reserve(eps_list.size());
  const Density* prev = nullptr;
  for (double eps : eps_list) {
    SweepEntry e;
    e.epsilon = eps;
    const TruncatedDomain dom(eps);
    e.structure_applicable = dom.contains(p.monotone_breakpoint()) && dom.contains(p.kink());
    try {
      const auto op = assemble_truncated(p, grid, dom, OperatorKind::transfer);
      const EigenPair r = leading_eigenpair(op, opt.tol, opt.max_iter);
      e.ok = true;
      e.lambda = r.lambda;
      e.g = r.vector;
      e.residual = r.residual;
      e.iterations = r.iterations;
      e.cdf_to_full = cdf_sup_distance(*e.g, out.g_full);
      e.structure_violation = monotone_structure_violation(*e.g, p);
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.entries.push_back(std::move(e));
    SweepEntry& cur = out.entries.back();
    cur.cdf_to_previous = std::numeric_limits<double>::quiet_NaN();
    if (cur.ok) {
      if (prev) cur.cdf_to_previous = cdf_sup_distance(*cur.g, *prev);
      prev = &*cur.g;
    }
  }
  return out;
}

void write_sweep(const SweepResult& s, const std::filesystem::path& csv) {
  std::string text =
      "epsilon,lambda_eps,cdf_distance_to_full,cdf_distance_to_previous,structure_violation,status\n";
  for (const auto& e : s.entries) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    text += format_double(e.epsilon) + ',' + format_double(e.ok ? e.lambda : nan) + ',' +
            format_double(e.ok ? e.cdf_to_full : nan) + ',' + format_double(e.cdf_to_previous) +
            ',' + format_double(e.ok && e.structure_applicable ? e.structure_violation : nan) +
            ',' + (e.ok ? "ok" : "error") + '\n';
  }
  write_text(csv, text);
}

}  // namespace qsd
