#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "qsd/errors.hpp"
#include "qsd/spectral.hpp"

using namespace qsd;

namespace {

const LogisticParams k15(1.0, 5.0);

Eigen::MatrixXd dense(const DiscreteOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) m(j, k) = op(j, k);
  return m;
}

// Leading eigenvalue (largest real part) and its eigenvector, via the general solver.
std::pair<double, Eigen::VectorXd> dense_leading(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < m.rows(); ++i) {
    if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
  }
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  if (v.sum() < 0) v = -v;
  return {es.eigenvalues()[best].real(), v};
}

DiscreteOperator from_dense(const Grid& grid, const Eigen::MatrixXd& m,
                            OperatorKind kind = OperatorKind::forward) {
  std::vector<double> e(grid.size() * grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (std::size_t k = 0; k < grid.size(); ++k) e[j * grid.size() + k] = m(j, k);
  return DiscreteOperator(grid, kind, e);
}

// gcd of cycle lengths through node 0 up to length 3n, by boolean matrix powers.
int boolean_period(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  Eigen::MatrixXi a = (m.array() > 0).cast<int>();
  Eigen::MatrixXi p = a;
  int g = 0;
  for (int k = 1; k <= 3 * n; ++k) {
    if (p(0, 0) > 0) g = std::gcd(g, k);
    p = ((p * a).array() > 0).cast<int>();
  }
  return g;
}

}  // namespace

TEST_CASE("diagonal operator") {
  const Grid grid(8);
  const auto op = from_dense(grid, Eigen::MatrixXd::Identity(8, 8) * 0.5);
  const auto r = leading_eigenpair(op);
  CHECK(r.lambda == doctest::Approx(0.5).epsilon(1e-15));
  for (double v : r.vector.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.residual < 1e-10);
}

TEST_CASE("leading eigenpair against dense eigensolver, n=200") {
  const Grid grid(200);
  for (const auto& op : {assemble_transfer(k15, grid), assemble_forward(k15, grid)}) {
    const auto r = leading_eigenpair(op);
    const auto [lam, vec] = dense_leading(dense(op));
    CHECK(r.lambda == doctest::Approx(lam).epsilon(1e-10));
    const Eigen::VectorXd ref = vec / (vec.sum() * grid.weight());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK(r.vector[j] == doctest::Approx(ref(static_cast<Eigen::Index>(j))).epsilon(1e-8));
    }
    CHECK(r.residual < 1e-10);
    CHECK(r.vector.mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("period-2 fixture oscillates; its square converges") {
  const Grid grid(20);
  const auto s = synthetic_period2_operator(grid);
  std::vector<double> init(20, 1.0);
  for (std::size_t j = 0; j < 10; ++j) init[j] = 3.0;
  CHECK_THROWS_AS((void)leading_eigenpair(s, 1e-10, 500, std::span<const double>(init)),
                  ConvergenceError);
  try {
    (void)leading_eigenpair(s, 1e-10, 500, std::span<const double>(init));
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 500);
    CHECK(e.residual() > 0.1);
  }
  const auto r2 = leading_eigenpair(s.squared(), 1e-10, 500, std::span<const double>(init));
  CHECK(r2.lambda == doctest::Approx(0.81).epsilon(1e-12));
}

TEST_CASE("zero operator is degenerate") {
  const Grid grid(4);
  const DiscreteOperator z(grid, OperatorKind::forward, std::vector<double>(16, 0.0));
  CHECK_THROWS_AS((void)leading_eigenpair(z), DegenerateOperatorError);
  CHECK_THROWS_AS((void)period_and_classes(z), DegenerateOperatorError);
}

TEST_CASE("compute_eta on a rank-one kernel") {
  const Grid grid(16);
  oracle::Gen gen(41);
  auto q = gen.nonneg_vector(16);
  const double qs = std::accumulate(q.begin(), q.end(), 0.0);
  const double lambda = 0.8;
  Eigen::MatrixXd m(16, 16);
  for (int j = 0; j < 16; ++j)
    for (int k = 0; k < 16; ++k) m(j, k) = lambda * q[k] / qs;
  const auto op = from_dense(grid, m);
  const Density g = Density(grid, gen.nonneg_vector(16)).normalized();
  const auto eta = compute_eta(op, lambda, g);
  for (double v : eta.eta.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eta.residual < 1e-10);
}

TEST_CASE("compute_eta rejects a vanishing eigenfunction") {
  // node 2 maps nowhere, so the right eigenvector vanishes there
  const Grid grid(3);
  Eigen::MatrixXd m(3, 3);
  m << 0.4, 0.4, 0.0, 0.4, 0.4, 0.0, 0.0, 0.0, 0.0;
  const Density g(grid, {1.0, 1.0, 1.0});
  CHECK_THROWS_AS((void)compute_eta(from_dense(grid, m), 0.8, g), PositivityError);
}

TEST_CASE("period detection") {
  const Grid grid(200);
  const auto c = period_and_classes(assemble_forward(k15, grid));
  CHECK(c.period == 1);
  const auto s = period_and_classes(synthetic_period2_operator(Grid(20)));
  CHECK(s.period == 2);
  for (int j = 0; j < 20; ++j) CHECK(s.class_of[j] == (j < 10 ? s.class_of[0] : 1 - s.class_of[0]));
  oracle::Gen gen(43);
  Eigen::MatrixXd pos(12, 12);
  for (int j = 0; j < 12; ++j)
    for (int k = 0; k < 12; ++k) pos(j, k) = gen.uniform(0.01, 1.0);
  CHECK(period_and_classes(from_dense(Grid(12), pos)).period == 1);
}

TEST_CASE("period detection against boolean-power oracle on random cyclic graphs") {
  oracle::Gen gen(47);
  for (int t = 0; t < 40; ++t) {
    const int n = 12;
    const int m = 1 + static_cast<int>(gen.index(4));
    std::vector<int> cls(n);
    for (int j = 0; j < n; ++j) cls[j] = j % m;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) a(j, (j + 1) % n) = 1.0;  // Hamiltonian cycle keeps it irreducible
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (gen.uniform(0, 1) < 0.2 && (n % m == 0 ? cls[k] == (cls[j] + 1) % m : true)) a(j, k) = 1.0;
    const auto op = from_dense(Grid(n), a);
    const auto c = period_and_classes(op);
    CHECK(c.period == boolean_period(a));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (a(j, k) > 0) CHECK(c.class_of[k] == (c.class_of[j] + 1) % c.period);
  }
}

TEST_CASE("nodes outside the core follow the documented convention") {
  // 0 <-> 1 is the core (period 2); 2 -> 0 feeds it; 1 -> 3 drains it
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 1) = a(1, 0) = 1.0;
  a(2, 0) = 1.0;
  a(1, 3) = 1.0;
  const auto c = period_and_classes(from_dense(Grid(4), a));
  CHECK(c.period == 2);
  CHECK(c.in_core == std::vector<bool>{true, true, false, false});
  CHECK(c.class_of[2] == (c.class_of[0] + 1) % 2);
  CHECK(c.class_of[3] == (c.class_of[1] + 1) % 2);
}

TEST_CASE("conditioned time average: trivial cases and brute-force oracle") {
  const Grid grid(40);
  const auto P = assemble_forward(k15, grid);
  const double lambda = leading_eigenpair(P).lambda;
  std::vector<double> one(40, 1.0), h(40);
  for (std::size_t j = 0; j < 40; ++j) h[j] = std::sin(5 * grid.node(j));
  for (int n : {1, 3, 17}) {
    CHECK(conditioned_time_average(P, lambda, one, n, 0.3) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(conditioned_time_average(P, lambda, h, 1, 0.61) == h[grid.cell_of(0.61)]);
  const Eigen::MatrixXd m = dense(P);
  const Eigen::Map<const Eigen::VectorXd> hv(h.data(), 40);
  for (int n : {2, 5, 12}) {
    Eigen::VectorXd num = Eigen::VectorXd::Zero(40);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd r = Eigen::VectorXd::Ones(40);
      for (int k = 0; k < n - i; ++k) r = m * r / lambda;
      Eigen::VectorXd t = hv.cwiseProduct(r);
      for (int k = 0; k < i; ++k) t = m * t / lambda;
      num += t;
    }
    Eigen::VectorXd den = Eigen::VectorXd::Ones(40);
    for (int k = 0; k < n; ++k) den = m * den / lambda;
    for (double x : {0.05, 0.3, 0.5, 0.93}) {
      const auto j = static_cast<Eigen::Index>(grid.cell_of(x));
      CHECK(conditioned_time_average(P, lambda, h, n, x) ==
            doctest::Approx(num(j) / (n * den(j))).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS((void)conditioned_time_average(P, lambda, h, 0, 0.3), ArgumentError);
  CHECK_THROWS_AS((void)conditioned_time_average(P, lambda, h, 3, 1.0), ArgumentError);
}

TEST_CASE("yaglom ratio: trivial cases and matrix-power oracle") {
  const Grid grid(40);
  const auto P = assemble_forward(k15, grid);
  std::vector<double> one(40, 1.0), h(40);
  for (std::size_t j = 0; j < 40; ++j) h[j] = grid.node(j) * grid.node(j);
  CHECK(yaglom_ratio(P, h, 0, 0.3) == h[grid.cell_of(0.3)]);
  CHECK(yaglom_ratio(P, one, 25, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
  const Eigen::MatrixXd m = dense(P);
  const Eigen::Map<const Eigen::VectorXd> hv(h.data(), 40);
  for (int n : {1, 4, 30}) {
    Eigen::VectorXd a = hv, b = Eigen::VectorXd::Ones(40);
    for (int k = 0; k < n; ++k) {
      a = m * a;
      b = m * b;
    }
    const auto j = static_cast<Eigen::Index>(grid.cell_of(0.7));
    CHECK(yaglom_ratio(P, h, n, 0.7) == doctest::Approx(a(j) / b(j)).epsilon(1e-12));
  }
}

TEST_CASE("solve: invariants at n=400") {
  const Grid grid(400);
  const auto s = solve(k15, grid);
  CHECK(s.lambda > 0.75);
  CHECK(s.lambda < 1.0);
  CHECK(s.period == 1);
  CHECK(s.g.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(grid_inner(grid, s.eta.values(), s.g.values()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.nu.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.residual_g < 1e-10);
  CHECK(s.residual_eta < 1e-10);
  for (double v : s.eta.values()) CHECK(v > 0.0);
  for (double v : s.g.values()) CHECK(v > 0.0);
  CHECK(s.gap_ratio > 0.0);
  CHECK(s.gap_ratio < 1.0);
  // the two discretizations share their leading eigenvalue up to discretization error
  CHECK(std::abs(s.lambda - s.lambda_forward) < 1e-3);
}

TEST_CASE("profiles") {
  const Grid grid(300);
  const auto P = assemble_forward(k15, grid);
  const auto s = solve(P, assemble_transfer(k15, grid));
  const std::vector<int> ns{0, 10, 5, 40};
  std::vector<double> eta(s.eta.values().begin(), s.eta.values().end());
  for (double d : power_convergence_profile(P, s, eta, ns)) {
    CHECK(d < 1e-2);
  }
  std::vector<double> alt(300);
  for (std::size_t j = 0; j < 300; ++j) alt[j] = j % 2 ? 1.0 : -1.0;
  const auto pa = power_convergence_profile(P, s, alt, std::vector<int>{1, 30});
  CHECK(pa[1] < pa[0]);
  CHECK(pa[1] < 1e-3);
  std::vector<double> one(300, 1.0);
  const auto ce = cesaro_profile(P, s, one, std::vector<int>{50, 100, 200, 400});
  for (std::size_t i = 1; i < ce.size(); ++i) CHECK(ce[i] < ce[i - 1]);
  auto bad = s;
  bad.period = 2;
  CHECK_THROWS_AS((void)power_convergence_profile(P, bad, one, ns), ArgumentError);
}

TEST_CASE("empirical gap ratio tracks the dense second eigenvalue") {
  const Grid grid(200);
  const auto L = assemble_transfer(k15, grid);
  const auto s = solve(assemble_forward(k15, grid), L);
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense(L), false);
  std::vector<double> mods;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
  std::sort(mods.rbegin(), mods.rend());
  CHECK(s.gap_ratio == doctest::Approx(mods[1] / mods[0]).epsilon(0.2));
}
