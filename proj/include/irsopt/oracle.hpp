#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "irsopt/metrics.hpp"

namespace irsopt {

struct OracleVerdict {
  std::string name;
  double max_rel_error = 0.0;
  bool passed = false;
  double threshold = 0.0;
};

// Central finite differences of a real objective over real coordinates.
// Complex variables are handled by the caller as paired real coordinates.
Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& objective,
                                     const Eigen::VectorXd& point, double h = 1e-5);

// Exhaustive power search on the feasible simplex (budget + C8) minimizing the
// weighted MSE. Refuses K > 3. Throws InfeasibleError when no grid point is
// feasible, matching the analytic solver's verdict.
PowerAllocation grid_power_search(const Eigen::VectorXcd& ordered_gains,
                                  const Eigen::VectorXd& q, const Eigen::VectorXcd& f,
                                  double total_power, double rate_floor, double sigma2,
                                  int resolution);

// Quantized exhaustive phase search minimizing the weighted MSE. Refuses
// levels^N_r > 1e6.
ReflectionState exhaustive_phase_search(const Eigen::MatrixXcd& h_rows,
                                        const Eigen::MatrixXcd& H, const Eigen::VectorXcd& f,
                                        const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                        int levels);

// First-order reference for the constrained precoder problem: projected
// gradient on the quadratic cost with Dykstra projection onto the
// intersection of the power ball and the per-user QoS disks. Independent of
// the ADMM implementation.
Eigen::VectorXcd pgd_precoder_reference(const Eigen::MatrixXcd& g_rows,
                                        const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                        double total_power, double rate_floor,
                                        double stationarity_tol = 1e-8);

// quadratic precoder cost C(F) evaluated directly (shared by tests)
double precoder_cost(const Eigen::MatrixXcd& g_rows, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& p, const Eigen::VectorXcd& f);

// The condensed validation suite behind the `validate` CLI subcommand.
std::vector<OracleVerdict> run_validation_suite(std::uint64_t seed);

}  // namespace irsopt
