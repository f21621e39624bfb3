#pragma once

#include <Eigen/Dense>
#include <vector>

#include "irsopt/metrics.hpp"

namespace irsopt {

// Lagrange multiplier of the total-power budget and the budget gap at it.
struct DualState {
  double upsilon = 0.0;
  double power_gap = 0.0;  // sum(p)*||F||^2 - P at this upsilon
};

// Closed-form stationary power of the user at SIC position k:
//   p_k = (q_k Re(G_k) / sigma_k)^2,
//   sigma_k = q_k |G_k|^2 + sum_{j>k} q_j |G_j|^2 + upsilon,
// clipped to zero when Re(G_k) <= 0.
double closed_form_power(int k, const Eigen::VectorXcd& ordered_gains,
                         const Eigen::VectorXd& q, double upsilon);

struct PowerSolution {
  PowerAllocation alloc;
  DualState dual;
  bool qos_repaired = false;
};

// KKT power allocation: closed form at upsilon = 0, bisection on upsilon when
// the budget binds (each p_k is strictly decreasing in upsilon), then the
// linearized QoS floor C8 is enforced by raising violating users' powers,
// weakest-ordered first, repeating until stable. Throws InfeasibleError when
// the repair exceeds the budget. `ordering` is stamped into the result
// (identity when empty).
PowerSolution solve_power(const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& q,
                          const Eigen::VectorXcd& f, double total_power, double rate_floor,
                          double sigma2, const std::vector<int>& ordering = {});

// p_k = P / (K ||F||^2) for every user
PowerAllocation uniform_power(int n_users, const Eigen::VectorXcd& f, double total_power,
                              const std::vector<int>& ordering = {});

}  // namespace irsopt
