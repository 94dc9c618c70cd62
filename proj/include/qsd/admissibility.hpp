#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "qsd/logistic_kernel.hpp"

namespace qsd {

enum class Verdict {
  admissible_by_a_ge_2,
  admissible_by_inequalities,
  admissible_by_theorem_range,
  violated,
  inconclusive,
};

[[nodiscard]] std::string to_string(Verdict v);

struct AdmissibilityReport {
  LogisticParams params;
  Verdict verdict;
  bool theorem_range = false;  // 1 <= a < 4, where admissibility is known a priori
  double worst_margin_ineq1 = 0.0;
  double worst_margin_ineq2 = 0.0;
  int probe_count = 0;
  int domain_errors = 0;
};

// All x arguments must lie in [monotone_breakpoint, kink]; otherwise ArgumentError.
// Negative radicands or vanishing denominators raise DomainError.

/// min(L, a/4 - L) with L = 1/2 - 1/2 sqrt(1 - (2/b)(1 - sqrt(1 - 4x/a))).
[[nodiscard]] double ineq1_lhs(const LogisticParams& p, double x);
[[nodiscard]] double ineq1_margin(const LogisticParams& p, double x);

/// Right side minus left side of the second inequality (the atanh ratio against
/// sqrt(1-4x/b)/sqrt(1-4x/a)). On the last 1% of the interval it switches to F2 - F1,
/// and at x = a/4 to F2(breakpoint) - F1(a/4).
[[nodiscard]] double ineq2_margin(const LogisticParams& p, double x);

[[nodiscard]] double F1(const LogisticParams& p, double x);
[[nodiscard]] double F2(const LogisticParams& p, double x);
/// Rescaled F2 in the variable y = sqrt((b - 2 + 2 sqrt(1-4x/a))/b), so F2(x) = 2 F3(y).
/// y must lie in [sqrt((b-2)/b), sqrt((b-1)/b)]. Depends on a through ln(a/(4-a)).
[[nodiscard]] double F3(const LogisticParams& p, double y);

/// 4239 b^6 - 23868 b^5 + 31482 b^4 + 8964 b^3 - 40401 b^2 + 23424 b - 4096.
[[nodiscard]] double p_poly(double b);
/// Exact integer evaluation; NumericError if the value does not fit in 64 bits.
[[nodiscard]] std::int64_t p_poly_exact(std::int64_t b);
/// The same polynomial expanded around 4, evaluated at delta = b - 4.
[[nodiscard]] std::int64_t p_poly_shifted_exact(std::int64_t delta);

/// Probe sweep of both inequalities (probes >= 2). Throws ConsistencyError if the sweep
/// finds a violation for a in [1,4).
[[nodiscard]] AdmissibilityReport is_admissible(const LogisticParams& p, int probes = 512,
                                                double tolerance = 1e-12);

void write_admissibility(const AdmissibilityReport& r, const std::filesystem::path& json);

}  // namespace qsd
