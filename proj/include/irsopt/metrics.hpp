#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "irsopt/channel.hpp"

namespace irsopt {

// IRS reflection state. Only the phases are stored, so the modulus of each
// diagonal entry is `amplitude` by construction and the unit-modulus
// constraint is exact whenever amplitude == 1.
struct ReflectionState {
  Eigen::VectorXd phases;   // each in [-pi, pi)
  double amplitude = 1.0;   // beta

  // beta * exp(j*phi) per element
  Eigen::VectorXcd diagonal() const;

  double max_modulus_deviation() const { return std::abs(amplitude - 1.0); }

  // wraps arbitrary phase values into [-pi, pi)
  static ReflectionState from_phases(Eigen::VectorXd raw_phases, double amplitude = 1.0);
};

// Per-user transmit power coefficients in SIC order: p(i) belongs to the user
// at SIC position i, and ordering[i] is that user's original index. Position 0
// is the strongest user (decodes free of intra-cluster interference).
struct PowerAllocation {
  Eigen::VectorXd p;
  std::vector<int> ordering;
};

// h_k * diag(theta) * H * f, the effective scalar gain of one user.
std::complex<double> effective_gain(const Eigen::RowVectorXcd& h_k,
                                    const ReflectionState& theta,
                                    const Eigen::MatrixXcd& H,
                                    const Eigen::VectorXcd& f);

// Rows g_k = h_k * diag(theta) * H for the given user order (original order
// when `ordering` is empty).
Eigen::MatrixXcd cascade_rows(const Eigen::MatrixXcd& irs_user,
                              const ReflectionState& theta,
                              const Eigen::MatrixXcd& H,
                              const std::vector<int>& ordering = {});

// Gains of every user in original index order.
Eigen::VectorXcd cascade_gains(const ChannelRealization& ch,
                               const ReflectionState& theta,
                               const Eigen::VectorXcd& f);

// SIC decode order: descending |G_k|, ties by ascending original index.
// Returns ordering[i] = original index of the i-th strongest user.
std::vector<int> order_users(const Eigen::VectorXcd& gains);

// SINR of the user at SIC position k (0-based); interference comes from
// positions i < k only.
double sinr(int k, const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
            double sigma2);

// sum over users of log2(1 + sinr_k)
double sum_rate(const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
                double sigma2);

// e_k = |1 - sqrt(p_k) G_k|^2 + |G_k|^2 sum_{i<k} p_i + sigma^2
double mse(int k, const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
           double sigma2);

Eigen::VectorXd all_mse(const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
                        double sigma2);

// weighted MSE cost sum_k q_k e_k
double weighted_mse(const Eigen::VectorXd& q, const Eigen::VectorXcd& ordered_gains,
                    const Eigen::VectorXd& p, double sigma2);

// rate surrogate sum_k (log2 q_k - q_k e_k / ln 2); maximized at q = 1/e
double surrogate_value(const Eigen::VectorXd& q, const Eigen::VectorXd& e);

// high-SINR sum-rate approximation log2(P |g_max|^2 / sigma^2)
double high_sinr_rate(std::complex<double> g_max, double total_power, double sigma2);

}  // namespace irsopt
