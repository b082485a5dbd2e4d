#pragma once

#include <vector>

#include <Eigen/Core>

#include "mebd/basis.hpp"

namespace mebd {

struct OmpOptions {
  int max_sparsity = 0;        // 0 -> half the dictionary size
  double residual_tol = 1e-3;  // relative to the data norm
};

struct OmpSolution {
  Eigen::VectorXcd w;                 // B complex coefficients, zero outside the active set
  std::vector<double> residual_trace; // starts at ||d||, one entry per selection
  std::vector<int> active_set;        // selection order
};

/// Orthogonal matching pursuit in the complex domain: greedy column
/// selection by normalized correlation with the residual, least-squares
/// re-fit over the active set after every pick.
OmpSolution solve_omp(const RestrictedBasis& basis, const Eigen::VectorXcd& data,
                      const OmpOptions& opts = {});

}  // namespace mebd
