#include "mebd/bcs.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "mebd/errors.hpp"

// Hyperparameter search follows the fast sequential algorithm of
// M. Tipping and A. Faul, "Fast marginal likelihood maximisation for sparse
// Bayesian models", AISTATS 2003: one basis function is added, deleted or
// re-estimated per iteration, always the action with the largest exact
// likelihood gain.

namespace mebd {

RealSystem realify(const Eigen::MatrixXcd& a_prime, const Eigen::VectorXcd& d) {
  if (d.size() != a_prime.rows())
    throw std::invalid_argument("realify: data length must equal the matrix row count");
  const int m = static_cast<int>(a_prime.rows());
  const int b = static_cast<int>(a_prime.cols());
  RealSystem sys;
  sys.m = m;
  sys.b = b;
  sys.matrix.resize(2 * m, 2 * b);
  sys.matrix.topLeftCorner(m, b) = a_prime.real();
  sys.matrix.topRightCorner(m, b) = -a_prime.imag();
  sys.matrix.bottomLeftCorner(m, b) = a_prime.imag();
  sys.matrix.bottomRightCorner(m, b) = a_prime.real();
  sys.data.resize(2 * m);
  sys.data.head(m) = d.real();
  sys.data.tail(m) = d.imag();
  return sys;
}

Eigen::VectorXd lift(const Eigen::VectorXcd& w) {
  Eigen::VectorXd out(2 * w.size());
  out.head(w.size()) = w.real();
  out.tail(w.size()) = w.imag();
  return out;
}

Eigen::VectorXcd recombine(const Eigen::VectorXd& omega) {
  if (omega.size() % 2 != 0)
    throw std::invalid_argument("recombine: lifted vector must have even length");
  const int b = static_cast<int>(omega.size()) / 2;
  Eigen::VectorXcd w(b);
  for (int i = 0; i < b; ++i) w[i] = Complex(omega[i], omega[i + b]);
  return w;
}

namespace {

void check_hyper(const RealSystem& sys, const Hyperparameters& hyper) {
  if (!(hyper.eta > 0.0)) throw std::invalid_argument("bcs: eta must be positive");
  if (hyper.tau.size() != sys.matrix.cols())
    throw std::invalid_argument("bcs: tau length must equal the lifted column count");
  for (int i = 0; i < hyper.tau.size(); ++i)
    if (!(hyper.tau[i] > 0.0)) throw std::invalid_argument("bcs: every tau must be positive");
}

std::vector<int> active_indices(const Hyperparameters& hyper) {
  std::vector<int> active;
  for (int i = 0; i < hyper.tau.size(); ++i)
    if (std::isfinite(hyper.tau[i])) active.push_back(i);
  return active;
}

struct PosteriorState {
  std::vector<int> active;
  Eigen::MatrixXd phi;            // columns of the lifted matrix in the model
  Eigen::LDLT<Eigen::MatrixXd> hess;
  Eigen::VectorXd mu;
  Eigen::VectorXd residual;
};

PosteriorState compute_posterior(const RealSystem& sys, const Hyperparameters& hyper) {
  PosteriorState st;
  st.active = active_indices(hyper);
  const int a = static_cast<int>(st.active.size());
  st.phi.resize(sys.matrix.rows(), a);
  Eigen::VectorXd tau_a(a);
  for (int k = 0; k < a; ++k) {
    st.phi.col(k) = sys.matrix.col(st.active[k]);
    tau_a[k] = hyper.tau[st.active[k]];
  }
  if (a == 0) {
    st.mu.resize(0);
    st.residual = sys.data;
    return st;
  }
  Eigen::MatrixXd hess = (st.phi.transpose() * st.phi) / hyper.eta;
  hess.diagonal() += tau_a;
  st.hess.compute(hess);
  if (st.hess.info() != Eigen::Success)
    throw ill_conditioned("bcs: posterior normal matrix is not factorizable");
  st.mu = st.hess.solve(st.phi.transpose() * sys.data / hyper.eta);
  st.residual = sys.data - st.phi * st.mu;
  return st;
}

}  // namespace

double marginal_likelihood(const RealSystem& sys, const Hyperparameters& hyper) {
  check_hyper(sys, hyper);
  const int n = static_cast<int>(sys.matrix.rows());
  Eigen::MatrixXd omega = hyper.eta * Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < hyper.tau.size(); ++i) {
    if (!std::isfinite(hyper.tau[i])) continue;
    omega.noalias() += (1.0 / hyper.tau[i]) * sys.matrix.col(i) * sys.matrix.col(i).transpose();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(omega);
  if (llt.info() != Eigen::Success)
    throw ill_conditioned("bcs: covariance matrix is numerically singular");
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += std::log(llt.matrixLLT()(i, i));
  log_det *= 2.0;
  const double quad = sys.data.dot(llt.solve(sys.data));
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det + quad);
}

Eigen::VectorXd posterior_mean(const RealSystem& sys, const Hyperparameters& hyper) {
  check_hyper(sys, hyper);
  const PosteriorState st = compute_posterior(sys, hyper);
  Eigen::VectorXd omega = Eigen::VectorXd::Zero(sys.matrix.cols());
  for (std::size_t k = 0; k < st.active.size(); ++k)
    omega[st.active[k]] = st.mu[static_cast<int>(k)];
  return omega;
}

namespace detail {

SparsityFactors sparsity_factors(const RealSystem& sys, const Hyperparameters& hyper) {
  check_hyper(sys, hyper);
  const PosteriorState st = compute_posterior(sys, hyper);
  const int p = static_cast<int>(sys.matrix.cols());
  const double beta = 1.0 / hyper.eta;
  SparsityFactors f;
  f.s.resize(p);
  f.q.resize(p);
  f.residual = st.residual;
  for (int i = 0; i < p; ++i) {
    const auto col = sys.matrix.col(i);
    double s = beta * col.squaredNorm();
    if (!st.active.empty()) {
      const Eigen::VectorXd h = st.phi.transpose() * col;
      s -= beta * beta * h.dot(st.hess.solve(h));
    }
    f.s[i] = s;
    f.q[i] = beta * col.dot(st.residual);
  }
  return f;
}

double delta_add(double s_i, double q_i) {
  const double ratio = q_i * q_i / s_i;
  return 0.5 * (ratio - 1.0 - std::log(ratio));
}

double delta_delete(double s_i, double q_i, double tau_i) {
  return 0.5 * (q_i * q_i / (s_i - tau_i) - std::log1p(-s_i / tau_i));
}

double delta_reestimate(double s_i, double q_i, double tau_i, double tau_new) {
  const double d = 1.0 / tau_new - 1.0 / tau_i;
  if (d == 0.0) return 0.0;
  return 0.5 * (q_i * q_i / (s_i + 1.0 / d) - std::log1p(s_i * d));
}

}  // namespace detail

RvmResult rvm_optimize(const RealSystem& sys, double eta0, const BcsOptions& opts) {
  if (!(eta0 > 0.0)) throw std::invalid_argument("rvm_optimize: eta0 must be positive");
  const int n = static_cast<int>(sys.matrix.rows());
  const int p = static_cast<int>(sys.matrix.cols());

  RvmResult res;
  res.hyper.eta = eta0;
  res.hyper.tau = Eigen::VectorXd::Constant(p, kPruned);
  const double eta_floor = std::max(sys.data.squaredNorm() / n * 1e-12, 1e-300);

  double phi = marginal_likelihood(sys, res.hyper);
  res.likelihood_trace.push_back(phi);

  enum class Action { none, add, remove, reestimate };
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // Noise re-estimation from the current residual, accepted only when it
    // does not lower the likelihood so the trace stays monotone.
    bool eta_updated = false;
    if (opts.estimate_noise) {
      const PosteriorState st = compute_posterior(sys, res.hyper);
      const double res2 = st.residual.squaredNorm();
      if (res2 > eta_floor * n) {
        const double eta_prop = res2 / n;
        if (eta_prop != res.hyper.eta) {
          const double eta_old = res.hyper.eta;
          res.hyper.eta = eta_prop;
          const double phi_prop = marginal_likelihood(sys, res.hyper);
          if (phi_prop >= phi) {
            phi = phi_prop;
            eta_updated = true;
          } else {
            res.hyper.eta = eta_old;
          }
        }
      }
    }

    const detail::SparsityFactors f = detail::sparsity_factors(sys, res.hyper);

    Action best = Action::none;
    int best_idx = -1;
    double best_delta = 0.0;
    double best_tau = kPruned;
    for (int i = 0; i < p; ++i) {
      const double si = f.s[i];
      const double qi = f.q[i];
      if (!(si > 0.0)) continue;  // column lies in the span already explained
      if (!std::isfinite(res.hyper.tau[i])) {
        const double theta = qi * qi - si;
        if (theta <= 0.0) continue;
        const double dl = detail::delta_add(si, qi);
        if (dl > best_delta) {
          best = Action::add;
          best_idx = i;
          best_delta = dl;
          best_tau = si * si / theta;
        }
      } else {
        const double tau = res.hyper.tau[i];
        double denom = tau - si;
        if (denom < tau * 1e-12) denom = tau * 1e-12;
        const double s = tau * si / denom;
        const double q = tau * qi / denom;
        const double theta = q * q - s;
        if (theta > 0.0) {
          const double tau_new = s * s / theta;
          const double dl = detail::delta_reestimate(si, qi, tau, tau_new);
          if (dl > best_delta) {
            best = Action::reestimate;
            best_idx = i;
            best_delta = dl;
            best_tau = tau_new;
          }
        } else {
          const double dl = detail::delta_delete(si, qi, tau);
          if (dl > best_delta) {
            best = Action::remove;
            best_idx = i;
            best_delta = dl;
            best_tau = kPruned;
          }
        }
      }
    }

    if (best == Action::none || best_delta < opts.tol_phi) {
      res.converged = true;
      if (eta_updated) res.likelihood_trace.push_back(phi);
      break;
    }

    const double old_tau = res.hyper.tau[best_idx];
    res.hyper.tau[best_idx] = best_tau;
    res.iterations = iter + 1;

    const double phi_new = marginal_likelihood(sys, res.hyper);
    if (phi_new < phi - 1e-9 * std::max(1.0, std::abs(phi))) {
      // numerical breakdown of the gain formulas; undo and stop
      res.hyper.tau[best_idx] = old_tau;
      res.iterations = iter;
      res.converged = true;
      if (eta_updated) res.likelihood_trace.push_back(phi);
      break;
    }

    phi = phi_new;
    res.likelihood_trace.push_back(phi);
  }

  if (res.iterations >= opts.max_iter) res.converged = false;
  return res;
}

BcsSolution solve_bcs(const RestrictedBasis& basis, const Eigen::VectorXcd& data,
                      double eta0, const BcsOptions& opts) {
  const RealSystem sys = realify(basis.matrix, data);
  const RvmResult rvm = rvm_optimize(sys, eta0, opts);
  BcsSolution sol;
  sol.hyper = rvm.hyper;
  sol.likelihood_trace = rvm.likelihood_trace;
  sol.converged = rvm.converged;
  sol.omega = posterior_mean(sys, rvm.hyper);
  sol.w = recombine(sol.omega);
  sol.active_set = active_indices(rvm.hyper);
  return sol;
}

}  // namespace mebd
