#include "irsopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace irsopt {

namespace {
constexpr double kLn2 = 0.69314718055994530942;

double wrap_phase(double phi) {
  phi = std::remainder(phi, 2.0 * M_PI);  // (-pi, pi]
  if (phi >= M_PI) phi -= 2.0 * M_PI;
  return phi;
}
}  // namespace

Eigen::VectorXcd ReflectionState::diagonal() const {
  Eigen::VectorXcd d(phases.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    d(i) = std::polar(amplitude, phases(i));
  }
  return d;
}

ReflectionState ReflectionState::from_phases(Eigen::VectorXd raw_phases, double amplitude) {
  for (Eigen::Index i = 0; i < raw_phases.size(); ++i) {
    raw_phases(i) = wrap_phase(raw_phases(i));
  }
  return ReflectionState{std::move(raw_phases), amplitude};
}

std::complex<double> effective_gain(const Eigen::RowVectorXcd& h_k,
                                    const ReflectionState& theta,
                                    const Eigen::MatrixXcd& H,
                                    const Eigen::VectorXcd& f) {
  if (h_k.size() != H.rows() || H.cols() != f.size() || theta.phases.size() != H.rows()) {
    throw std::invalid_argument("effective_gain: dimension mismatch");
  }
  return (h_k.cwiseProduct(theta.diagonal().transpose()) * (H * f)).value();
}

Eigen::MatrixXcd cascade_rows(const Eigen::MatrixXcd& irs_user, const ReflectionState& theta,
                              const Eigen::MatrixXcd& H, const std::vector<int>& ordering) {
  const Eigen::VectorXcd d = theta.diagonal();
  const int k_count = static_cast<int>(irs_user.rows());
  Eigen::MatrixXcd rows(k_count, H.cols());
  for (int i = 0; i < k_count; ++i) {
    const int k = ordering.empty() ? i : ordering[i];
    rows.row(i) = irs_user.row(k).cwiseProduct(d.transpose()) * H;
  }
  return rows;
}

Eigen::VectorXcd cascade_gains(const ChannelRealization& ch, const ReflectionState& theta,
                               const Eigen::VectorXcd& f) {
  return cascade_rows(ch.irs_user, theta, ch.bs_irs) * f;
}

std::vector<int> order_users(const Eigen::VectorXcd& gains) {
  std::vector<int> idx(gains.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(gains(a)) > std::abs(gains(b));
  });
  return idx;
}

double sinr(int k, const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
            double sigma2) {
  const double g2 = std::norm(ordered_gains(k));
  const double interference = k > 0 ? p.head(k).sum() : 0.0;
  return g2 * p(k) / (g2 * interference + sigma2);
}

double sum_rate(const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
                double sigma2) {
  double rate = 0.0;
  for (int k = 0; k < ordered_gains.size(); ++k) {
    rate += std::log2(1.0 + sinr(k, ordered_gains, p, sigma2));
  }
  return rate;
}

double mse(int k, const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
           double sigma2) {
  const std::complex<double> g = ordered_gains(k);
  const double interference = k > 0 ? p.head(k).sum() : 0.0;
  return std::norm(1.0 - std::sqrt(p(k)) * g) + std::norm(g) * interference + sigma2;
}

Eigen::VectorXd all_mse(const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
                        double sigma2) {
  Eigen::VectorXd e(ordered_gains.size());
  for (int k = 0; k < ordered_gains.size(); ++k) e(k) = mse(k, ordered_gains, p, sigma2);
  return e;
}

double weighted_mse(const Eigen::VectorXd& q, const Eigen::VectorXcd& ordered_gains,
                    const Eigen::VectorXd& p, double sigma2) {
  return q.dot(all_mse(ordered_gains, p, sigma2));
}

double surrogate_value(const Eigen::VectorXd& q, const Eigen::VectorXd& e) {
  if ((q.array() <= 0).any() || (e.array() <= 0).any()) {
    throw std::domain_error("surrogate_value: q and e must be positive");
  }
  return (q.array().log() / kLn2 - q.array() * e.array() / kLn2).sum();
}

double high_sinr_rate(std::complex<double> g_max, double total_power, double sigma2) {
  const double g2 = std::norm(g_max);
  if (g2 <= 0.0) throw std::domain_error("high_sinr_rate: zero gain");
  return std::log2(total_power * g2 / sigma2);
}

}  // namespace irsopt
