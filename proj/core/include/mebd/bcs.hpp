#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "mebd/basis.hpp"

namespace mebd {

/// Real-valued lifting of an M x B complex system: the 2M x 2B block matrix
///   [[Re A', -Im A'], [Im A', Re A']]
/// with the data stacked as [Re d, Im d].
struct RealSystem {
  Eigen::MatrixXd matrix;  // 2M x 2B
  Eigen::VectorXd data;    // 2M
  int m = 0;
  int b = 0;
};

RealSystem realify(const Eigen::MatrixXcd& a_prime, const Eigen::VectorXcd& d);

/// [Re w, Im w] stacking and its exact inverse.
Eigen::VectorXd lift(const Eigen::VectorXcd& w);
Eigen::VectorXcd recombine(const Eigen::VectorXd& omega);

/// Noise variance eta and per-column precisions tau over the 2B lifted
/// unknowns; tau_b = +inf marks a pruned (inactive) basis function.
struct Hyperparameters {
  double eta = 1e-2;
  Eigen::VectorXd tau;
};

inline constexpr double kPruned = std::numeric_limits<double>::infinity();

struct BcsOptions {
  double eta0 = 1e-2;
  bool estimate_noise = true;   // re-estimate eta from the residual each iteration
  double tol_phi = 1e-8;        // stop when the best likelihood gain drops below this
  int max_iter = 1000;
  double zero_threshold = 1e-6; // relative threshold for counting non-null coefficients
};

/// Log marginal likelihood
///   Phi = -1/2 [ 2M log 2pi + log|Omega| + d^T Omega^-1 d ],
/// Omega = eta I + A diag(tau)^-1 A^T over the active (finite-tau) columns.
double marginal_likelihood(const RealSystem& sys, const Hyperparameters& hyper);

/// Posterior mean: solves [(A^T A)/eta + diag(tau)] w = A^T d / eta on the
/// active set; pruned entries are exactly zero.
Eigen::VectorXd posterior_mean(const RealSystem& sys, const Hyperparameters& hyper);

struct RvmResult {
  Hyperparameters hyper;
  std::vector<double> likelihood_trace;
  bool converged = false;
  int iterations = 0;
};

/// Fast sequential marginal-likelihood maximization (Tipping & Faul 2003):
/// starts from an empty model and repeatedly applies the single
/// add/delete/re-estimate action with the largest likelihood gain.
RvmResult rvm_optimize(const RealSystem& sys, double eta0, const BcsOptions& opts);

struct BcsSolution {
  Eigen::VectorXd omega;               // 2B posterior mean
  Eigen::VectorXcd w;                  // B complex coefficients, w_b = omega_b + j omega_{b+B}
  Hyperparameters hyper;
  std::vector<double> likelihood_trace;
  std::vector<int> active_set;         // lifted indices with finite tau
  bool converged = true;
};

BcsSolution solve_bcs(const RestrictedBasis& basis, const Eigen::VectorXcd& data,
                      double eta0, const BcsOptions& opts = {});

namespace detail {

/// Sparsity/quality factors S_i, Q_i of every lifted column under the
/// current model, plus the posterior residual.
struct SparsityFactors {
  Eigen::VectorXd s;
  Eigen::VectorXd q;
  Eigen::VectorXd residual;
};
SparsityFactors sparsity_factors(const RealSystem& sys, const Hyperparameters& hyper);

/// Exact likelihood changes for the three candidate actions, in terms of the
/// with-model factors S_i, Q_i and the current precision tau_i.
double delta_add(double s_i, double q_i);
double delta_delete(double s_i, double q_i, double tau_i);
double delta_reestimate(double s_i, double q_i, double tau_i, double tau_new);

}  // namespace detail

}  // namespace mebd
