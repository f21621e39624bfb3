#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "irsopt/channel.hpp"
#include "irsopt/metrics.hpp"

namespace irsopt {

// How the auxiliary weights are refreshed. `inverse_mse` is the default
// q_k = 1/e_k maximizer; `paper_literal` takes the real part of
// 1/(1 - sqrt(p_k) G_k), exposed for comparison only.
enum class QUpdateMode { inverse_mse, paper_literal };

// Per-iteration snapshot of the alternating loop. p and q are in SIC order
// (the permutation lives in p.ordering).
struct SolutionRecord {
  int iter = 0;
  Eigen::VectorXcd f;
  ReflectionState theta;
  PowerAllocation p;
  Eigen::VectorXd q;
  double sum_rate = 0.0;
  double surrogate = 0.0;
  double c1_residual = 0.0;    // max(0, sum(p)||F||^2 - P)
  double c2_min_margin = 0.0;  // min_k (R_k - R_min)
  double c3_max_dev = 0.0;     // max_i ||theta_i| - 1|
};

struct Initialization {
  ReflectionState theta0;
  PowerAllocation p0;
  Eigen::VectorXd q0;
  Eigen::VectorXcd f0;
};

// Seeded starting point: random phases, uniform power on a matched provisional
// precoder (the dominant right singular direction of the stacked cascade),
// q = 1/e clamped so every QoS slack is positive.
Initialization initialize(const SystemConfig& config, const ChannelRealization& ch);

// q_k = 1/e_k (or the literal alternate form), clamped to 2^R_min (1 + 1e-3).
Eigen::VectorXd update_q(const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
                         double sigma2, double rate_floor,
                         QUpdateMode mode = QUpdateMode::inverse_mse);

// Raises (or lowers) auxiliary weights whose per-user C5 window is empty at
// the current interference level, keeping the precoder subproblem solvable.
// Throws InfeasibleError when no weight can open the window.
Eigen::VectorXd repair_q_for_c5(Eigen::VectorXd q, const Eigen::VectorXd& p,
                                double rate_floor);

struct RunResult {
  std::vector<SolutionRecord> records;
  bool aborted = false;
  std::string abort_reason;

  double final_sum_rate() const {
    return records.empty() ? 0.0 : records.back().sum_rate;
  }
};

// Which blocks of the alternating loop are active; disabled blocks keep their
// initialization value (precoder, phases) or fall back to uniform power.
struct BlockToggles {
  bool optimize_precoder = true;
  bool optimize_phases = true;
  bool dynamic_power = true;
};

// Algorithm: per outer iteration, in order - precoder ADMM, auxiliary weight
// refresh, IRS phase gradient-projection, KKT power allocation. Stops at
// max_outer_iters or when the sum rate stalls below tol_outer. Record 0 is
// the initialization. On infeasibility the partial record list is returned
// with the offending constraint named.
RunResult run(const SystemConfig& config, const ChannelRealization& ch);

RunResult run_with_toggles(const SystemConfig& config, const ChannelRealization& ch,
                           const BlockToggles& toggles);

// one JSON object per record, scalars plus full state vectors
std::string records_to_text(const std::vector<SolutionRecord>& records);

}  // namespace irsopt
