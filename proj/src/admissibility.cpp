#include "qsd/admissibility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/io.hpp"

namespace qsd {

namespace {

constexpr std::array<std::int64_t, 7> kP{-4096, 23424, -40401, 8964, 31482, -23868, 4239};
constexpr std::array<std::int64_t, 7> kShifted{998384, 3683256, 4091679, 2119716,
                                               571482, 77868,   4239};

double root(double v, const char* what) {
  if (!(v >= 0.0)) throw DomainError(std::string("negative radicand in ") + what);
  return std::sqrt(v);
}

double atanh_checked(double v, const char* what) {
  if (!(v >= 0.0 && v < 1.0)) throw DomainError(std::string("atanh argument out of range in ") + what);
  return std::atanh(v);
}

void require_interval(const LogisticParams& p, double x) {
  const double lo = p.monotone_breakpoint();
  const double hi = p.kink();
  const double slack = 4 * std::numeric_limits<double>::epsilon() * hi;
  if (!(x >= lo - slack && x <= hi + slack)) {
    throw ArgumentError("x outside [(4a^2-a^3)/16, a/4]");
  }
}

double clamp_sqrt_term(double v) { return std::max(0.0, v); }

double numerator1(const LogisticParams& p, double x) {
  const double a = p.a();
  const double b = p.b();
  const double sb = root(1 - 4 * x / b, "sqrt(1-4x/b)");
  const double u = atanh_checked(root((2 * sb + b - 2) / b, "F1"), "F1");
  const double v = atanh_checked(root((a + 2 * sb - 2) / a, "F1"), "F1");
  return 2 * (u - v);
}

double numerator2(const LogisticParams& p, double x) {
  const double a = p.a();
  const double b = p.b();
  const double sa = root(clamp_sqrt_term(1 - 4 * x / a), "sqrt(1-4x/a)");
  return 2 * atanh_checked(root((2 * sa + b - 2) / b, "F2"), "F2") + std::log(a / (4 - a));
}

template <class T>
T horner(const std::array<std::int64_t, 7>& c, T x) {
  T s = 0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * x + static_cast<T>(c[i]);
  return s;
}

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw NumericError("polynomial value exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::admissible_by_a_ge_2: return "admissible-by-a>=2";
    case Verdict::admissible_by_inequalities: return "admissible-by-inequalities";
    case Verdict::admissible_by_theorem_range: return "admissible-by-theorem-range";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

double ineq1_lhs(const LogisticParams& p, double x) {
  require_interval(p, x);
  const double sa = root(clamp_sqrt_term(1 - 4 * x / p.a()), "sqrt(1-4x/a)");
  return 0.5 - 0.5 * root(1 - 2 / p.b() * (1 - sa), "ineq1");
}

double ineq1_margin(const LogisticParams& p, double x) {
  const double l = ineq1_lhs(p, x);
  return std::min(l, p.kink() - l);
}

double F1(const LogisticParams& p, double x) {
  require_interval(p, x);
  return numerator1(p, x) / std::sqrt(1 - 4 * x / p.b());
}

double F2(const LogisticParams& p, double x) {
  require_interval(p, x);
  const double sa = std::sqrt(clamp_sqrt_term(1 - 4 * x / p.a()));
  if (!(sa > 0.0)) throw DomainError("F2 is singular at x = a/4");
  return numerator2(p, x) / sa;
}

double F3(const LogisticParams& p, double y) {
  const double b = p.b();
  const double lo = std::sqrt((b - 2) / b);
  const double hi = std::sqrt((b - 1) / b);
  if (!(y >= lo * (1 - 1e-15) && y <= hi * (1 + 1e-15))) {
    throw ArgumentError("y outside [sqrt((b-2)/b), sqrt((b-1)/b)]");
  }
  const double den = b * y * y - b + 2;
  if (!(den > 0.0)) throw DomainError("F3 denominator vanishes");
  return (std::log((1 + y) / (1 - y)) + std::log(p.a() / (4 - p.a()))) / den;
}

double ineq2_margin(const LogisticParams& p, double x) {
  require_interval(p, x);
  const double lo = p.monotone_breakpoint();
  const double hi = p.kink();
  if (x >= hi) return F2(p, lo) - F1(p, hi);
  if (x >= lo + 0.99 * (hi - lo)) return F2(p, x) - F1(p, x);
  const double i2 = numerator2(p, x);
  if (!(i2 > 0.0)) throw DomainError("ineq2 denominator is not positive");
  const double sb = std::sqrt(1 - 4 * x / p.b());
  const double sa = std::sqrt(clamp_sqrt_term(1 - 4 * x / p.a()));
  return sb / sa - numerator1(p, x) / i2;
}

double p_poly(double b) { return horner(kP, b); }

std::int64_t p_poly_exact(std::int64_t b) { return narrow(horner<__int128>(kP, b)); }

std::int64_t p_poly_shifted_exact(std::int64_t delta) {
  return narrow(horner<__int128>(kShifted, delta));
}

AdmissibilityReport is_admissible(const LogisticParams& p, int probes, double tolerance) {
  if (probes < 2) throw ArgumentError("need at least 2 probes");
  if (!(tolerance >= 0.0)) throw ArgumentError("tolerance must be nonnegative");
  const bool theorem = p.a() >= 1.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (p.a() >= 2.0) return {p, Verdict::admissible_by_a_ge_2, theorem, nan, nan, 0, 0};

  const double lo = p.monotone_breakpoint();
  const double hi = p.kink();
  const int count = hi > lo ? probes : 1;
  std::vector<double> m1(count), m2(count);
  std::vector<char> bad(count, 0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? lo : (i + 1 == count ? hi : lo + (hi - lo) * i / (count - 1));
    try {
      m1[i] = ineq1_margin(p, x);
      m2[i] = ineq2_margin(p, x);
    } catch (const DomainError&) {
      bad[i] = 1;
    }
  }
  double w1 = HUGE_VAL;
  double w2 = HUGE_VAL;
  int errors = 0;
  for (int i = 0; i < count; ++i) {
    if (bad[i]) {
      ++errors;
      continue;
    }
    w1 = std::min(w1, m1[i]);
    w2 = std::min(w2, m2[i]);
  }
  Verdict v = Verdict::admissible_by_inequalities;
  if (w1 < -tolerance || w2 < -tolerance) {
    v = Verdict::violated;
  } else if (errors > 0) {
    v = theorem ? Verdict::admissible_by_theorem_range : Verdict::inconclusive;
  }
  if (theorem && v == Verdict::violated) {
    throw ConsistencyError("probe sweep contradicts the known admissible range a in [1,4)");
  }
  return {p, v, theorem, errors == count ? nan : w1, errors == count ? nan : w2, count, errors};
}

void write_admissibility(const AdmissibilityReport& r, const std::filesystem::path& json) {
  JsonWriter()
      .add("a", r.params.a())
      .add("b", r.params.b())
      .add("verdict", to_string(r.verdict))
      .add("theorem_range", r.theorem_range)
      .add("worst_margin_ineq1", r.worst_margin_ineq1)
      .add("worst_margin_ineq2", r.worst_margin_ineq2)
      .add("probe_count", r.probe_count)
      .add("domain_errors", r.domain_errors)
      .write(json);
}

}  // namespace qsd
