#include "mebd/omp.hpp"

#include <algorithm>

#include <Eigen/QR>

namespace mebd {

OmpSolution solve_omp(const RestrictedBasis& basis, const Eigen::VectorXcd& data,
                      const OmpOptions& opts) {
  const Eigen::MatrixXcd& a = basis.matrix;
  if (data.size() != a.rows())
    throw std::invalid_argument("solve_omp: data length must equal the matrix row count");
  if (opts.max_sparsity < 0 || opts.residual_tol < 0.0)
    throw std::invalid_argument("solve_omp: invalid options");

  const int b = static_cast<int>(a.cols());
  const int budget = opts.max_sparsity > 0 ? std::min(opts.max_sparsity, b)
                                           : std::max(1, b / 2);

  OmpSolution sol;
  sol.w = Eigen::VectorXcd::Zero(b);
  const double norm_d = data.norm();
  sol.residual_trace.push_back(norm_d);
  if (norm_d == 0.0) return sol;

  Eigen::VectorXd col_norms(b);
  for (int i = 0; i < b; ++i) col_norms[i] = a.col(i).norm();

  Eigen::VectorXcd residual = data;
  Eigen::VectorXcd w_active;
  std::vector<char> in_model(b, 0);

  while (static_cast<int>(sol.active_set.size()) < budget) {
    int pick = -1;
    double best_score = 0.0;
    for (int i = 0; i < b; ++i) {
      if (in_model[i] || col_norms[i] == 0.0) continue;
      const double score = std::abs(a.col(i).dot(residual)) / col_norms[i];
      if (score > best_score) {
        best_score = score;
        pick = i;
      }
    }
    if (pick < 0) break;  // residual orthogonal to every remaining column

    sol.active_set.push_back(pick);
    in_model[pick] = 1;
    const int k = static_cast<int>(sol.active_set.size());
    Eigen::MatrixXcd sub(a.rows(), k);
    for (int j = 0; j < k; ++j) sub.col(j) = a.col(sol.active_set[j]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(sub);
    if (qr.rank() < k) {
      // newest column is numerically dependent on the active set
      sol.active_set.pop_back();
      break;
    }
    const Eigen::VectorXcd x = qr.solve(data);
    const Eigen::VectorXcd r_new = data - sub * x;
    if (r_new.norm() >= residual.norm()) {
      sol.active_set.pop_back();
      break;
    }
    residual = r_new;
    w_active = x;
    sol.residual_trace.push_back(residual.norm());
    if (residual.norm() <= opts.residual_tol * norm_d) break;
  }

  for (std::size_t j = 0; j < sol.active_set.size(); ++j)
    sol.w[sol.active_set[j]] = w_active[static_cast<int>(j)];
  return sol;
}

}  // namespace mebd
