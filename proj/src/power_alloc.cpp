#include "irsopt/power_alloc.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "irsopt/errors.hpp"

namespace irsopt {

namespace {

std::vector<int> identity_ordering(Eigen::Index n) {
  std::vector<int> o(n);
  std::iota(o.begin(), o.end(), 0);
  return o;
}

Eigen::VectorXd all_closed_form(const Eigen::VectorXcd& gains, const Eigen::VectorXd& q,
                                double upsilon) {
  Eigen::VectorXd p(gains.size());
  for (int k = 0; k < gains.size(); ++k) p(k) = closed_form_power(k, gains, q, upsilon);
  return p;
}

}  // namespace

double closed_form_power(int k, const Eigen::VectorXcd& ordered_gains,
                         const Eigen::VectorXd& q, double upsilon) {
  const double re_g = ordered_gains(k).real();
  if (re_g <= 0.0) return 0.0;
  double varsigma = q(k) * std::norm(ordered_gains(k)) + upsilon;
  for (int j = k + 1; j < ordered_gains.size(); ++j) {
    varsigma += q(j) * std::norm(ordered_gains(j));
  }
  const double root = q(k) * re_g / varsigma;
  return root * root;
}

PowerSolution solve_power(const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& q,
                          const Eigen::VectorXcd& f, double total_power, double rate_floor,
                          double sigma2, const std::vector<int>& ordering) {
  const double f2 = f.squaredNorm();
  if (!(f2 > 0.0)) throw std::invalid_argument("solve_power: ||F|| must be > 0");
  const int k_count = static_cast<int>(ordered_gains.size());
  const double budget = total_power / f2;  // cap on sum(p)

  PowerSolution sol;
  sol.alloc.ordering = ordering.empty() ? identity_ordering(k_count) : ordering;

  Eigen::VectorXd p = all_closed_form(ordered_gains, q, 0.0);
  if (p.sum() <= budget) {
    sol.dual = {0.0, p.sum() * f2 - total_power};
  } else {
    // each p_k strictly decreases in upsilon, so the gap is monotone
    double hi = 1.0;
    while (all_closed_form(ordered_gains, q, hi).sum() > budget) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gap = all_closed_form(ordered_gains, q, mid).sum() * f2 - total_power;
      if (std::abs(gap) <= 1e-8 * total_power) {
        hi = mid;
        break;
      }
      if (gap > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    p = all_closed_form(ordered_gains, q, hi);
    sol.dual = {hi, p.sum() * f2 - total_power};
  }

  // C8: |G_k|^2 p_k >= (2^Rmin - 1)(|G_k|^2 sum_{i<k} p_i + sigma^2).
  // Raising a power can re-violate weaker users, so sweep until stable.
  const double floor_factor = std::pow(2.0, rate_floor) - 1.0;
  if (floor_factor > 0.0) {
    for (int pass = 0; pass < k_count + 1; ++pass) {
      bool changed = false;
      for (int k = k_count - 1; k >= 0; --k) {
        const double g2 = std::norm(ordered_gains(k));
        const double interference = k > 0 ? p.head(k).sum() : 0.0;
        const double required_rx = floor_factor * (g2 * interference + sigma2);
        if (g2 * p(k) >= required_rx - 1e-15) continue;
        if (g2 <= 0.0) {
          throw InfeasibleError("c8", k, "zero gain cannot meet the rate floor");
        }
        p(k) = required_rx / g2;
        sol.qos_repaired = true;
        changed = true;
      }
      if (!changed) break;
    }
    if (p.sum() * f2 > total_power * (1.0 + 1e-8)) {
      // weakest user is the one whose floor forced the budget overrun
      throw InfeasibleError("c8", k_count - 1, "QoS repair exceeds the power budget");
    }
  }

  sol.alloc.p = std::move(p);
  return sol;
}

PowerAllocation uniform_power(int n_users, const Eigen::VectorXcd& f, double total_power,
                              const std::vector<int>& ordering) {
  const double f2 = f.squaredNorm();
  if (!(f2 > 0.0)) throw std::invalid_argument("uniform_power: ||F|| must be > 0");
  PowerAllocation alloc;
  alloc.p = Eigen::VectorXd::Constant(n_users, total_power / (n_users * f2));
  alloc.ordering = ordering.empty() ? identity_ordering(n_users) : ordering;
  return alloc;
}

}  // namespace irsopt
