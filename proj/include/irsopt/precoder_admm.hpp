#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsopt/channel.hpp"
#include "irsopt/errors.hpp"
#include "irsopt/metrics.hpp"

namespace irsopt {

// Iterate of the two-layer relaxed ADMM. W duplicates F for the power ball
// (C4/C6); w_hat holds one equivalent scalar per user for the QoS set (C5/C7).
struct PrecoderState {
  Eigen::VectorXcd f;          // N_t
  Eigen::VectorXcd w;          // N_t
  Eigen::VectorXcd w_hat;      // K
  Eigen::VectorXcd lambda_p1;  // N_t
  Eigen::VectorXcd lambda_p2;  // K
  double penalty_p1 = 1.0;
  double penalty_p2 = 1.0;
};

// eps_k = ln2 * (log2 q_k - R_min); every entry must be positive for the QoS
// sets to make sense.
struct QosSlack {
  Eigen::VectorXd epsilon;
  static QosSlack from_q(const Eigen::VectorXd& q, double rate_floor);
};

// scalar C5 left-hand side |sqrt(q) - x|^2 + interference * |x|^2
double c5_value(std::complex<double> x, double sqrt_q, double interference);

// minimum of c5_value over x; the per-user C5 set is empty when epsilon is
// below this.
double c5_min_value(double q, double interference);

struct AdmmIterate {
  int iter = 0;
  double primal_residual_c6 = 0.0;      // ||F - W||_F^2
  double primal_residual_c7_max = 0.0;  // max_k |c_k g_k F - w_hat_k|^2
  double lagrangian_value = 0.0;        // augmented Lagrangian at the new F
  double delta_f = 0.0;                 // ||F^t - F^{t-1}||_F^2
  double lagrangian_before_f = 0.0;     // same aux variables, previous F
};

struct AdmmDiagnostics {
  std::vector<AdmmIterate> trace;
  bool converged = false;
  int outer_iters = 0;
  std::string to_text() const;  // one JSON object per line
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, AdmmDiagnostics diag)
      : std::runtime_error(what), diag_(std::move(diag)) {}
  const AdmmDiagnostics& diagnostics() const noexcept { return diag_; }

 private:
  AdmmDiagnostics diag_;
};

// W block of the inner layer: Euclidean projection of f + lambda/penalty onto
// the ball ||W||^2 <= P / sum(p). Vacuous (returns the point) when sum(p) = 0.
Eigen::VectorXcd update_w(const Eigen::VectorXcd& f, const Eigen::VectorXcd& lambda_p1,
                          double penalty_p1, const Eigen::VectorXd& p, double total_power);

// W-hat block, one scalar per user: minimizer of
//   |sqrt_q - x|^2 + interference*|x|^2 + (penalty/2)*|v - x|^2
// subject to c5_value(x) <= epsilon. The binding case is solved by bisection
// on the scalar dual multiplier (bracket [0, 1e6], residual tolerance 1e-10).
std::complex<double> update_w_hat(double sqrt_q, double interference, std::complex<double> v,
                                  double penalty, double epsilon);

// Outer F block: exact minimizer of the augmented Lagrangian, i.e. the unique
// solution of the Hermitian positive-definite normal equations. g_rows holds
// the cascaded rows h_k diag(theta) H in SIC order; q and p align with it.
Eigen::VectorXcd update_f(const PrecoderState& state, const Eigen::MatrixXcd& g_rows,
                          const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                          double* normal_residual = nullptr);

// lambda_p2_k += pen2 * (c_k g_k f - w_hat_k); lambda_p1 += pen1 * (f - w)
void update_multipliers(PrecoderState& state, const Eigen::MatrixXcd& g_rows,
                        const Eigen::VectorXd& q, const Eigen::VectorXd& p);

// augmented Lagrangian value at state.f (indicator terms excluded: W and
// w_hat are feasible by construction)
double augmented_lagrangian(const PrecoderState& state, const Eigen::MatrixXcd& g_rows,
                            const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                            double total_power);

struct PrecoderResult {
  Eigen::VectorXcd f;
  AdmmDiagnostics diagnostics;
};

// Full two-layer solve on prebuilt cascade rows (SIC order). Throws
// InfeasibleError when a user's QoS set is empty at the given q, and
// NonConvergenceError when the 500-outer-iteration cap is hit with residuals
// above 10x tol_admm.
PrecoderResult solve_precoder_rows(const Eigen::MatrixXcd& g_rows, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& p, const SystemConfig& config,
                                   const PrecoderState* warm_start = nullptr);

// Convenience wrapper building the rows from a channel realization and the
// ordering carried by the power allocation.
PrecoderResult solve_precoder(const ChannelRealization& ch, const ReflectionState& theta,
                              const Eigen::VectorXd& q, const PowerAllocation& p,
                              const SystemConfig& config,
                              const PrecoderState* warm_start = nullptr);

}  // namespace irsopt
