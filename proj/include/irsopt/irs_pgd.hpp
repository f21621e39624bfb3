#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "irsopt/channel.hpp"
#include "irsopt/metrics.hpp"

namespace irsopt {

// Gradient of the weighted-MSE surrogate with respect to the (conjugated)
// diagonal reflection entries, plus the finite-difference agreement filled in
// by the validation path.
struct GradientReport {
  Eigen::VectorXcd grad;
  double directional_check = 0.0;
  double step_used = 0.0;
};

// Gradient of sum_k q_k e_k in the diagonal entries of Theta, scaled so that
// its real/imaginary parts equal the derivatives with respect to the real
// coordinates (i.e. twice the Wirtinger derivative):
//   grad_i = 2 * sum_k q_k conj(u_{k,i}) ((p_k + s_k) G_k - sqrt(p_k)),
// with u_k = h_k .* (H f)^T, G_k = u_k * diag-entries, s_k = sum_{i<k} p_i.
// Inputs are in SIC order.
Eigen::VectorXcd grad_theta(const ReflectionState& theta, const Eigen::MatrixXcd& h_rows,
                            const Eigen::MatrixXcd& H, const Eigen::VectorXcd& f,
                            const Eigen::VectorXd& q, const Eigen::VectorXd& p);

// Feasibility/descent probes used by the backtracking step. Either callback
// may be empty, in which case the corresponding check is skipped.
struct StepChecker {
  // per-user max(0, C5 value - epsilon) at a candidate state
  std::function<Eigen::VectorXd(const ReflectionState&)> qos_violation;
  // surrogate cost sum_k q_k e_k at a candidate state
  std::function<double(const ReflectionState&)> surrogate;
};

struct PgdStepResult {
  ReflectionState theta;
  bool stalled = false;
  double step_used = 0.0;
  int halvings = 0;
};

// One projected-gradient step: candidate diag = theta - step * grad, phases
// restored to unit modulus by angle extraction. The step is halved (up to 20
// times) while the candidate worsens any user's QoS violation or increases
// the surrogate; exhausting the halvings returns the incumbent with the
// stalled flag set. step == 0 or grad == 0 return the incumbent unchanged.
PgdStepResult pgd_step(const ReflectionState& theta, const Eigen::VectorXcd& grad,
                       double step, const StepChecker& checker);

struct ThetaTracePoint {
  int iter = 0;
  double surrogate = 0.0;
  double step = 0.0;
  bool stalled = false;
};

struct ThetaResult {
  ReflectionState theta;
  std::vector<ThetaTracePoint> trace;
};

// Full phase optimization: gradient steps with QoS-aware backtracking until
// the relative surrogate decrease drops below 1e-5 or 200 iterations. The
// result satisfies the unit-modulus constraint exactly and never increases
// the surrogate relative to theta0. Inputs are in SIC order.
ThetaResult optimize_theta(const ReflectionState& theta0, const Eigen::MatrixXcd& h_rows,
                           const Eigen::MatrixXcd& H, const Eigen::VectorXcd& f,
                           const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                           const SystemConfig& config);

}  // namespace irsopt
