#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qsd/discretization.hpp"

namespace qsd {

struct EigenPair {
  double lambda = 0.0;
  Density vector;  // normalized to unit Lebesgue mass
  int iterations = 0;
  double residual = 0.0;  // ||A v - lambda v||_1 for the returned v
};

/// Power iteration with L1 normalization. Stops when both the residual and the relative
/// change of the iterate fall below tol. init defaults to the constant vector.
[[nodiscard]] EigenPair leading_eigenpair(const DiscreteOperator& op, double tol = 1e-10,
                                          int max_iter = 100000,
                                          std::optional<std::span<const double>> init = {});

struct EtaResult {
  Density eta;  // normalized so that sum eta g w = 1
  int iterations = 0;
  double residual = 0.0;  // ||P eta - lambda eta||_{L1(g)}
};

/// Right eigenvector of a forward operator for the given eigenvalue, by v <- P v / lambda.
/// Throws PositivityError if the converged vector has a nonpositive entry.
[[nodiscard]] EtaResult compute_eta(const DiscreteOperator& forward, double lambda,
                                    const Density& g, double tol = 1e-10,
                                    int max_iter = 100000);

struct CyclicDecomposition {
  int period = 1;
  std::vector<int> class_of;
  std::vector<bool> in_core;  // membership in the largest strongly connected component
};

/// Period and cyclic classes of the support graph (edge j -> k when A(j,k) > threshold),
/// computed on its largest strongly connected component. Nodes outside that component take
/// (class(c) - d) mod m from the nearest core node c they reach in d steps; nodes that
/// reach no core node take (class(c) + d) mod m from the nearest core node reaching them;
/// any remaining node gets class 0.
[[nodiscard]] CyclicDecomposition period_and_classes(const DiscreteOperator& op,
                                                     double support_threshold = 0.0);

struct SpectralResult {
  double lambda = 0.0;          // leading eigenvalue of the transfer matrix
  double lambda_forward = 0.0;  // leading eigenvalue of the forward matrix
  Density g;
  Density eta;
  Density nu;
  int iterations = 0;
  double residual = 0.0;  // max of residual_g and residual_eta
  double residual_g = 0.0;
  double residual_eta = 0.0;
  double gap_ratio = 0.0;  // empirical |lambda_2| / lambda of the transfer matrix
  int period = 1;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  double support_threshold = 0.0;
};

[[nodiscard]] SpectralResult solve(const DiscreteOperator& forward,
                                   const DiscreteOperator& transfer,
                                   const SolveOptions& opt = {});
[[nodiscard]] SpectralResult solve(const LogisticParams& p, const Grid& grid,
                                   const SolveOptions& opt = {});

/// (1/n) E_x[sum_{i<n} h(X_i) | tau > n] on the grid, evaluated at the cell containing x.
[[nodiscard]] double conditioned_time_average(const DiscreteOperator& forward, double lambda,
                                              std::span<const double> h, int n, double x);

/// (P^n h)(x) / (P^n 1)(x) at the cell containing x.
[[nodiscard]] double yaglom_ratio(const DiscreteOperator& forward, std::span<const double> h,
                                  int n, double x);

/// ||lambda^-n P^n h - eta <h, g>||_{L1(g)} for each n in n_list (any order).
/// Throws ArgumentError unless s.period == 1. Uses s.lambda_forward.
[[nodiscard]] std::vector<double> power_convergence_profile(const DiscreteOperator& forward,
                                                            const SpectralResult& s,
                                                            std::span<const double> h,
                                                            std::span<const int> n_list);

/// Same distance for the Cesaro mean (1/n) sum_{i<n} lambda^-i P^i h.
[[nodiscard]] std::vector<double> cesaro_profile(const DiscreteOperator& forward,
                                                 const SpectralResult& s,
                                                 std::span<const double> h,
                                                 std::span<const int> n_list);

/// Largest breach, relative to max(g), of "g non-decreasing on nodes <= monotone_breakpoint
/// and non-increasing on nodes >= a/4" over adjacent node pairs. Zero when the shape holds.
[[nodiscard]] double monotone_structure_violation(const Density& g, const LogisticParams& p);

/// L1(g) norm: sum |v_j| g_j w.
[[nodiscard]] double weighted_l1(const Density& g, std::span<const double> v);

void write_spectral(const SpectralResult& s, const LogisticParams& p,
                    const std::filesystem::path& csv, const std::filesystem::path& json);

}  // namespace qsd
