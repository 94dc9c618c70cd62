#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsd/spectral.hpp"

namespace qsd {

/// M = [4 eps (1-eps)^2, 1 - eps] for eps in (0, 3/8).
class TruncatedDomain {
 public:
  explicit TruncatedDomain(double epsilon);

  [[nodiscard]] double epsilon() const { return eps_; }
  [[nodiscard]] double lower() const { return interval_.lo.value; }
  [[nodiscard]] double upper() const { return interval_.hi.value; }
  [[nodiscard]] const UnitInterval& interval() const { return interval_; }
  [[nodiscard]] bool contains(double x) const { return x >= lower() && x <= upper(); }

 private:
  double eps_;
  UnitInterval interval_;
};

/// Matrix of 1_M A(1_M f) for A the forward or transfer operator. ArgumentError when fewer
/// than 2 grid nodes fall inside M.
[[nodiscard]] DiscreteOperator assemble_truncated(const LogisticParams& p, const Grid& grid,
                                                  const TruncatedDomain& domain,
                                                  OperatorKind kind);

struct SweepEntry {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;  // set when the eigen-solve failed
  double lambda = 0.0;
  std::optional<Density> g;
  double residual = 0.0;
  int iterations = 0;
  double cdf_to_full = 0.0;
  double cdf_to_previous = 0.0;  // NaN for the first successful entry
  bool structure_applicable = false;  // [monotone_breakpoint, a/4] inside M
  double structure_violation = 0.0;
};

struct SweepResult {
  double lambda_full = 0.0;
  Density g_full;
  std::vector<SweepEntry> entries;
};

/// Leading transfer eigenpair for each truncation level in eps_list (strictly decreasing,
/// in (0, 3/8)). Per-entry solver failures are recorded, not thrown. The untruncated
/// transfer eigenpair is computed unless supplied.
[[nodiscard]] SweepResult epsilon_sweep(const LogisticParams& p, const Grid& grid,
                                        const std::vector<double>& eps_list,
                                        const SolveOptions& opt = {},
                                        const std::optional<EigenPair>& full = {});

void write_sweep(const SweepResult& s, const std::filesystem::path& csv);

}  // namespace qsd
