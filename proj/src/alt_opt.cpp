#include "irsopt/alt_opt.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "irsopt/errors.hpp"
#include "irsopt/irs_pgd.hpp"
#include "irsopt/power_alloc.hpp"
#include "irsopt/precoder_admm.hpp"
#include "irsopt/rng.hpp"
#include "json.hpp"

namespace irsopt {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr std::uint64_t kInitSeedSalt = 0x9e3779b97f4a7c15ULL;

// Target for sum(p) at initialization. The QoS window of the C5 sets depends
// on the absolute scale of the power coefficients (not on p*||F||^2), so the
// precoder norm absorbs the budget and the coefficients stay at unit scale.
constexpr double kInitPowerCoeffSum = 0.3;

double q_floor(double rate_floor) {
  return std::pow(2.0, rate_floor) * (1.0 + 1e-3);
}

Eigen::MatrixXcd ordered_user_rows(const Eigen::MatrixXcd& irs_user,
                                   const std::vector<int>& ordering) {
  Eigen::MatrixXcd rows(irs_user.rows(), irs_user.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) rows.row(i) = irs_user.row(ordering[i]);
  return rows;
}

ReflectionState draw_theta0(const SystemConfig& cfg) {
  Rng rng(cfg.rng_seed ^ kInitSeedSalt);
  Eigen::VectorXd phases(cfg.n_irs());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = rng.uniform(-M_PI, M_PI);
  return ReflectionState::from_phases(std::move(phases));
}

Eigen::VectorXcd svd_direction(const Eigen::MatrixXcd& stacked_rows) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked_rows, Eigen::ComputeThinV);
  return svd.matrixV().col(0);
}

Eigen::VectorXcd matched_strongest(const Eigen::MatrixXcd& stacked_rows) {
  Eigen::Index best = 0;
  double best_norm = -1.0;
  for (Eigen::Index k = 0; k < stacked_rows.rows(); ++k) {
    const double n = stacked_rows.row(k).norm();
    if (n > best_norm) {
      best_norm = n;
      best = k;
    }
  }
  Eigen::VectorXcd dir = stacked_rows.row(best).adjoint();
  if (dir.norm() < 1e-300) return Eigen::VectorXcd::Unit(stacked_rows.cols(), 0);
  return dir.normalized();
}

Initialization initialize_impl(const SystemConfig& cfg, const ChannelRealization& ch,
                               bool matched_precoder) {
  cfg.validate();
  Initialization init;
  init.theta0 = draw_theta0(cfg);

  const Eigen::MatrixXcd stacked = cascade_rows(ch.irs_user, init.theta0, ch.bs_irs);
  Eigen::VectorXcd dir = matched_precoder ? matched_strongest(stacked) : svd_direction(stacked);
  init.f0 = std::sqrt(cfg.total_power / kInitPowerCoeffSum) * dir;

  const std::vector<int> ordering = order_users(stacked * init.f0);
  init.p0 = uniform_power(cfg.n_users, init.f0, cfg.total_power, ordering);

  Eigen::VectorXcd gains_ord(cfg.n_users);
  for (int i = 0; i < cfg.n_users; ++i) gains_ord(i) = (stacked.row(ordering[i]) * init.f0).value();
  init.q0 = update_q(gains_ord, init.p0.p, cfg.noise_power, cfg.rate_floor);
  return init;
}

SolutionRecord make_record(int iter, const Eigen::VectorXcd& f, const ReflectionState& theta,
                           const Eigen::VectorXd& p, const std::vector<int>& ordering,
                           const Eigen::VectorXd& q, const Eigen::VectorXcd& gains_ord,
                           const SystemConfig& cfg) {
  SolutionRecord rec;
  rec.iter = iter;
  rec.f = f;
  rec.theta = theta;
  rec.p = PowerAllocation{p, ordering};
  rec.q = q;
  rec.sum_rate = sum_rate(gains_ord, p, cfg.noise_power);
  rec.surrogate = surrogate_value(q, all_mse(gains_ord, p, cfg.noise_power));
  rec.c1_residual = std::max(0.0, p.sum() * f.squaredNorm() - cfg.total_power);
  double min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < gains_ord.size(); ++k) {
    const double rate_k = std::log2(1.0 + sinr(k, gains_ord, p, cfg.noise_power));
    min_margin = std::min(min_margin, rate_k - cfg.rate_floor);
  }
  rec.c2_min_margin = min_margin;
  rec.c3_max_dev = theta.max_modulus_deviation();
  return rec;
}

}  // namespace

Initialization initialize(const SystemConfig& cfg, const ChannelRealization& ch) {
  return initialize_impl(cfg, ch, /*matched_precoder=*/false);
}

Eigen::VectorXd update_q(const Eigen::VectorXcd& ordered_gains, const Eigen::VectorXd& p,
                         double sigma2, double rate_floor, QUpdateMode mode) {
  const double floor = q_floor(rate_floor);
  Eigen::VectorXd q(ordered_gains.size());
  for (int k = 0; k < ordered_gains.size(); ++k) {
    double value;
    if (mode == QUpdateMode::inverse_mse) {
      value = 1.0 / mse(k, ordered_gains, p, sigma2);
    } else {
      const std::complex<double> den = 1.0 - std::sqrt(p(k)) * ordered_gains(k);
      value = (1.0 / den).real();
    }
    q(k) = std::max(value, floor);
  }
  return q;
}

Eigen::VectorXd repair_q_for_c5(Eigen::VectorXd q, const Eigen::VectorXd& p,
                                double rate_floor) {
  const double c0 = kLn2 * rate_floor;
  const double floor = q_floor(rate_floor);
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const double s = k > 0 ? p.head(k).sum() : 0.0;
    const double a = s / (1.0 + s);
    q(k) = std::max(q(k), floor);
    if (a <= 0.0) continue;

    // slack of the C5 window: m(q) = ln q - c0 - a q, peaked at q* = 1/a.
    // A weight too close to a window edge leaves the ADMM a needle-thin
    // feasible disk, so repairs land at a healthy fraction of the peak slack.
    const auto margin = [&](double v) { return std::log(v) - c0 - a * v; };
    const double q_star = 1.0 / a;
    const double peak = margin(q_star);
    if (peak <= 1e-9) {
      throw InfeasibleError("c5_window", static_cast<int>(k),
                            "no auxiliary weight opens the QoS slack at this "
                            "interference level");
    }
    const double target = 0.25 * peak;
    if (margin(q(k)) >= std::min(0.1 * peak, target)) continue;

    // bisect m(q) = target on the side of the peak nearest the incumbent
    const bool from_below = q(k) <= q_star;
    double lo = from_below ? std::min(q(k), 1e-12) : q_star;
    double hi = from_below ? q_star : std::max(q(k), q_star * 2.0);
    while (!from_below && margin(hi) > target) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool above = margin(mid) >= target;
      if (from_below) {
        (above ? hi : lo) = mid;
      } else {
        (above ? lo : hi) = mid;
      }
    }
    q(k) = std::max(0.5 * (lo + hi), floor);
  }
  return q;
}

RunResult run(const SystemConfig& cfg, const ChannelRealization& ch) {
  return run_with_toggles(cfg, ch, BlockToggles{});
}

RunResult run_with_toggles(const SystemConfig& cfg, const ChannelRealization& ch,
                           const BlockToggles& toggles) {
  cfg.validate();
  const int K = cfg.n_users;
  const double sigma2 = cfg.noise_power;

  RunResult result;
  Initialization init = initialize_impl(cfg, ch, !toggles.optimize_precoder);
  ReflectionState theta = init.theta0;
  Eigen::VectorXcd f = init.f0;
  std::vector<int> ordering = init.p0.ordering;
  Eigen::VectorXd p = init.p0.p;
  Eigen::VectorXd q = init.q0;

  Eigen::MatrixXcd g_rows = cascade_rows(ch.irs_user, theta, ch.bs_irs, ordering);
  Eigen::VectorXcd gains_ord = g_rows * f;
  result.records.push_back(make_record(0, f, theta, p, ordering, q, gains_ord, cfg));

  try {
    for (int t = 1; t <= cfg.max_outer_iters; ++t) {
      // decode order refreshes from the incumbent (theta, F)
      const Eigen::VectorXcd gains_orig = cascade_gains(ch, theta, f);
      const std::vector<int> new_ordering = order_users(gains_orig);
      Eigen::VectorXd p_orig(K), q_orig(K);
      for (int i = 0; i < K; ++i) {
        p_orig(ordering[i]) = p(i);
        q_orig(ordering[i]) = q(i);
      }
      for (int i = 0; i < K; ++i) {
        p(i) = p_orig(new_ordering[i]);
        q(i) = q_orig(new_ordering[i]);
      }
      ordering = new_ordering;
      g_rows = cascade_rows(ch.irs_user, theta, ch.bs_irs, ordering);

      if (toggles.optimize_precoder) {
        q = repair_q_for_c5(std::move(q), p, cfg.rate_floor);
        f = solve_precoder_rows(g_rows, q, p, cfg).f;
      }
      gains_ord = g_rows * f;

      q = update_q(gains_ord, p, sigma2, cfg.rate_floor);

      if (toggles.optimize_phases) {
        const Eigen::MatrixXcd h_rows = ordered_user_rows(ch.irs_user, ordering);
        theta = optimize_theta(theta, h_rows, ch.bs_irs, f, q, p, cfg).theta;
        g_rows = cascade_rows(ch.irs_user, theta, ch.bs_irs, ordering);
        gains_ord = g_rows * f;
      }

      if (toggles.dynamic_power) {
        p = solve_power(gains_ord, q, f, cfg.total_power, cfg.rate_floor, sigma2, ordering)
                .alloc.p;
      } else {
        p = uniform_power(K, f, cfg.total_power, ordering).p;
      }

      result.records.push_back(make_record(t, f, theta, p, ordering, q, gains_ord, cfg));
      const auto n = result.records.size();
      if (std::abs(result.records[n - 1].sum_rate - result.records[n - 2].sum_rate) <
          cfg.tol_outer) {
        break;
      }
    }
  } catch (const InfeasibleError& ex) {
    result.aborted = true;
    result.abort_reason = ex.constraint() + ": " + ex.what();
  } catch (const NonConvergenceError& ex) {
    result.aborted = true;
    result.abort_reason = std::string("admm_convergence: ") + ex.what();
  }
  return result;
}

std::string records_to_text(const std::vector<SolutionRecord>& records) {
  std::ostringstream out;
  for (const auto& rec : records) {
    nlohmann::json j;
    j["iter"] = rec.iter;
    j["sum_rate"] = rec.sum_rate;
    j["surrogate"] = rec.surrogate;
    j["c1_residual"] = rec.c1_residual;
    j["c2_min_margin"] = rec.c2_min_margin;
    j["c3_max_dev"] = rec.c3_max_dev;
    nlohmann::json f = nlohmann::json::array();
    for (Eigen::Index i = 0; i < rec.f.size(); ++i) {
      f.push_back({rec.f(i).real(), rec.f(i).imag()});
    }
    j["f"] = f;
    j["theta_phases"] = std::vector<double>(rec.theta.phases.data(),
                                            rec.theta.phases.data() + rec.theta.phases.size());
    j["p"] = std::vector<double>(rec.p.p.data(), rec.p.p.data() + rec.p.p.size());
    j["ordering"] = rec.p.ordering;
    j["q"] = std::vector<double>(rec.q.data(), rec.q.data() + rec.q.size());
    out << j.dump() << "\n";
  }
  return out.str();
}

}  // namespace irsopt
