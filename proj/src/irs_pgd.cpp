#include "irsopt/irs_pgd.hpp"

#include <cmath>
#include <stdexcept>

#include "irsopt/precoder_admm.hpp"

namespace irsopt {

namespace {

// u_k = h_k .* (H f)^T, so that G_k = u_k * diag-entries of Theta
Eigen::MatrixXcd element_rows(const Eigen::MatrixXcd& h_rows, const Eigen::MatrixXcd& H,
                              const Eigen::VectorXcd& f) {
  const Eigen::VectorXcd hf = H * f;
  return h_rows.array().rowwise() * hf.transpose().array();
}

Eigen::VectorXd interference_sums(const Eigen::VectorXd& p) {
  Eigen::VectorXd s(p.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    s(k) = acc;
    acc += p(k);
  }
  return s;
}

Eigen::VectorXcd grad_from_elements(const Eigen::MatrixXcd& u_rows,
                                    const Eigen::VectorXcd& diag,
                                    const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& s) {
  Eigen::VectorXcd grad = Eigen::VectorXcd::Zero(diag.size());
  for (Eigen::Index k = 0; k < u_rows.rows(); ++k) {
    const std::complex<double> g_k = u_rows.row(k) * diag;
    const std::complex<double> factor =
        2.0 * q(k) * ((p(k) + s(k)) * g_k - std::sqrt(p(k)));
    grad += factor * u_rows.row(k).adjoint();
  }
  return grad;
}

}  // namespace

Eigen::VectorXcd grad_theta(const ReflectionState& theta, const Eigen::MatrixXcd& h_rows,
                            const Eigen::MatrixXcd& H, const Eigen::VectorXcd& f,
                            const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  if (h_rows.cols() != H.rows() || H.cols() != f.size() ||
      theta.phases.size() != H.rows()) {
    throw std::invalid_argument("grad_theta: dimension mismatch");
  }
  return grad_from_elements(element_rows(h_rows, H, f), theta.diagonal(), q, p,
                            interference_sums(p));
}

PgdStepResult pgd_step(const ReflectionState& theta, const Eigen::VectorXcd& grad,
                       double step, const StepChecker& checker) {
  if (step == 0.0 || grad.isZero(0.0)) {
    return {theta, false, 0.0, 0};
  }

  Eigen::VectorXd base_viol;
  if (checker.qos_violation) base_viol = checker.qos_violation(theta);
  double base_cost = 0.0;
  if (checker.surrogate) base_cost = checker.surrogate(theta);

  const Eigen::VectorXcd diag = theta.diagonal();
  double mu = step;
  for (int halvings = 0; halvings <= 20; ++halvings) {
    const Eigen::VectorXcd cand_diag = diag - mu * grad;
    Eigen::VectorXd cand_phases(cand_diag.size());
    for (Eigen::Index i = 0; i < cand_diag.size(); ++i) {
      cand_phases(i) = std::arg(cand_diag(i));
    }
    const ReflectionState cand =
        ReflectionState::from_phases(std::move(cand_phases), theta.amplitude);

    bool ok = true;
    if (checker.qos_violation) {
      const Eigen::VectorXd v = checker.qos_violation(cand);
      ok = ((v.array() - base_viol.array()) <= 1e-12).all();
    }
    if (ok && checker.surrogate) {
      ok = checker.surrogate(cand) <= base_cost + 1e-12 * std::max(1.0, std::abs(base_cost));
    }
    if (ok) return {cand, false, mu, halvings};
    mu *= 0.5;
  }
  return {theta, true, mu, 20};
}

ThetaResult optimize_theta(const ReflectionState& theta0, const Eigen::MatrixXcd& h_rows,
                           const Eigen::MatrixXcd& H, const Eigen::VectorXcd& f,
                           const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                           const SystemConfig& config) {
  constexpr int kMaxIters = 200;
  constexpr double kRelTol = 1e-5;

  const Eigen::MatrixXcd u_rows = element_rows(h_rows, H, f);
  const Eigen::VectorXd s = interference_sums(p);
  const double sigma2 = config.noise_power;
  const Eigen::VectorXd eps = QosSlack::from_q(q, config.rate_floor).epsilon;
  Eigen::VectorXd c(q.size());
  for (Eigen::Index k = 0; k < q.size(); ++k) c(k) = std::sqrt(q(k) * p(k));

  const auto gains_at = [&](const ReflectionState& st) -> Eigen::VectorXcd {
    return u_rows * st.diagonal();
  };

  StepChecker checker;
  checker.qos_violation = [&](const ReflectionState& st) {
    const Eigen::VectorXcd g = gains_at(st);
    Eigen::VectorXd v(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      v(k) = std::max(0.0, c5_value(c(k) * g(k), std::sqrt(q(k)), s(k)) - eps(k));
    }
    return v;
  };
  checker.surrogate = [&](const ReflectionState& st) {
    return weighted_mse(q, gains_at(st), p, sigma2);
  };

  ThetaResult result;
  result.theta = theta0;
  double cost = checker.surrogate(theta0);

  for (int iter = 1; iter <= kMaxIters; ++iter) {
    const Eigen::VectorXcd grad =
        grad_from_elements(u_rows, result.theta.diagonal(), q, p, s);
    const PgdStepResult step = pgd_step(result.theta, grad, config.pgd_step, checker);
    if (step.stalled) {
      result.trace.push_back({iter, cost, step.step_used, true});
      break;
    }
    result.theta = step.theta;
    const double new_cost = checker.surrogate(result.theta);
    result.trace.push_back({iter, new_cost, step.step_used, false});
    const double decrease = cost - new_cost;
    cost = new_cost;
    if (decrease < kRelTol * std::max(std::abs(cost), 1e-300)) break;
  }
  return result;
}

}  // namespace irsopt
