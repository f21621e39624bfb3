#include "irsopt/precoder_admm.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace irsopt {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr int kMaxOuter = 500;
constexpr int kMaxInnerSweeps = 50;

// prefix interference sums s_k = sum_{i<k} p_i
Eigen::VectorXd interference_sums(const Eigen::VectorXd& p) {
  Eigen::VectorXd s(p.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    s(k) = acc;
    acc += p(k);
  }
  return s;
}

}  // namespace

QosSlack QosSlack::from_q(const Eigen::VectorXd& q, double rate_floor) {
  QosSlack slack;
  slack.epsilon = q.array().log() - kLn2 * rate_floor;
  return slack;
}

double c5_value(std::complex<double> x, double sqrt_q, double interference) {
  return std::norm(sqrt_q - x) + interference * std::norm(x);
}

double c5_min_value(double q, double interference) {
  return q * interference / (1.0 + interference);
}

Eigen::VectorXcd update_w(const Eigen::VectorXcd& f, const Eigen::VectorXcd& lambda_p1,
                          double penalty_p1, const Eigen::VectorXd& p, double total_power) {
  Eigen::VectorXcd v = f + lambda_p1 / penalty_p1;
  const double sum_p = p.sum();
  if (sum_p <= 0.0) return v;  // C4 vacuous
  const double radius2 = total_power / sum_p;
  const double n2 = v.squaredNorm();
  if (n2 <= radius2) return v;
  return v * std::sqrt(radius2 / n2);
}

std::complex<double> update_w_hat(double sqrt_q, double interference, std::complex<double> v,
                                  double penalty, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw InfeasibleError("qos_slack", -1, "epsilon <= 0; caller must repair q");
  }
  const double q = sqrt_q * sqrt_q;
  if (epsilon < c5_min_value(q, interference) * (1.0 - 1e-12)) {
    throw InfeasibleError("c5", -1, "QoS set empty at current q");
  }

  const auto x_of = [&](double eta) {
    return ((1.0 + eta) * sqrt_q + 0.5 * penalty * v) /
           ((1.0 + eta) * (1.0 + interference) + 0.5 * penalty);
  };
  const auto residual = [&](double eta) {
    return c5_value(x_of(eta), sqrt_q, interference) - epsilon;
  };

  if (residual(0.0) <= 0.0) return x_of(0.0);  // constraint inactive

  double lo = 0.0, hi = 1e6;
  if (residual(hi) > 1e-10) {
    throw InfeasibleError("c5", -1, "dual bracket exhausted");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::abs(r) <= 1e-10) return x_of(mid);
    if (r > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return x_of(hi);  // feasible side
}

Eigen::VectorXcd update_f(const PrecoderState& state, const Eigen::MatrixXcd& g_rows,
                          const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                          double* normal_residual) {
  const Eigen::Index n_tx = g_rows.cols();
  const Eigen::Index k_count = g_rows.rows();
  const Eigen::VectorXd s = interference_sums(p);
  const double pen1 = state.penalty_p1;
  const double pen2 = state.penalty_p2;

  Eigen::MatrixXcd m = (0.5 * pen1) * Eigen::MatrixXcd::Identity(n_tx, n_tx);
  Eigen::VectorXcd rhs = (0.5 * pen1) * (state.w - state.lambda_p1 / pen1);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const double qp = q(k) * p(k);
    const double quad = qp * (1.0 + s(k)) + 0.5 * pen2 * qp;
    m.noalias() += quad * (g_rows.row(k).adjoint() * g_rows.row(k));
    const std::complex<double> t = state.w_hat(k) - state.lambda_p2(k) / pen2;
    const std::complex<double> lin =
        q(k) * std::sqrt(p(k)) + 0.5 * pen2 * std::sqrt(qp) * t;
    rhs.noalias() += lin * g_rows.row(k).adjoint();
  }

  Eigen::LDLT<Eigen::MatrixXcd> ldlt(m);
  Eigen::VectorXcd f = ldlt.solve(rhs);
  // one refinement step keeps the normal-equation residual at solver precision
  f += ldlt.solve(rhs - m * f);
  if (normal_residual != nullptr) {
    *normal_residual = (m * f - rhs).norm() / std::max(1.0, rhs.norm());
  }
  return f;
}

void update_multipliers(PrecoderState& state, const Eigen::MatrixXcd& g_rows,
                        const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  const Eigen::VectorXcd y = g_rows * state.f;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double c = std::sqrt(q(k) * p(k));
    state.lambda_p2(k) += state.penalty_p2 * (c * y(k) - state.w_hat(k));
  }
  state.lambda_p1 += state.penalty_p1 * (state.f - state.w);
}

double augmented_lagrangian(const PrecoderState& state, const Eigen::MatrixXcd& g_rows,
                            const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                            double /*total_power*/) {
  const Eigen::VectorXd s = interference_sums(p);
  const Eigen::VectorXcd y = g_rows * state.f;
  double value = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double c = std::sqrt(q(k) * p(k));
    value += std::norm(std::sqrt(q(k)) - c * y(k)) + c * c * std::norm(y(k)) * s(k);
    value += 0.5 * state.penalty_p2 *
             std::norm(c * y(k) + state.lambda_p2(k) / state.penalty_p2 - state.w_hat(k));
  }
  value += 0.5 * state.penalty_p1 *
           (state.f + state.lambda_p1 / state.penalty_p1 - state.w).squaredNorm();
  return value;
}

std::string AdmmDiagnostics::to_text() const {
  std::ostringstream out;
  for (const auto& it : trace) {
    nlohmann::json j{{"iter", it.iter},
                     {"primal_residual_c6", it.primal_residual_c6},
                     {"primal_residual_c7_max", it.primal_residual_c7_max},
                     {"lagrangian_value", it.lagrangian_value}};
    out << j.dump() << "\n";
  }
  return out.str();
}

PrecoderResult solve_precoder_rows(const Eigen::MatrixXcd& g_rows, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& p, const SystemConfig& config,
                                   const PrecoderState* warm_start) {
  const Eigen::Index n_tx = g_rows.cols();
  const Eigen::Index k_count = g_rows.rows();
  const double total_power = config.total_power;
  const double tol = config.tol_admm;
  const Eigen::VectorXd s = interference_sums(p);
  const Eigen::VectorXd sqrt_q = q.array().sqrt();
  Eigen::VectorXd c(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) c(k) = std::sqrt(q(k) * p(k));

  const QosSlack slack = QosSlack::from_q(q, config.rate_floor);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    if (!(slack.epsilon(k) > 0.0)) {
      throw InfeasibleError("qos_slack", static_cast<int>(k), "epsilon <= 0");
    }
    if (slack.epsilon(k) < c5_min_value(q(k), s(k)) * (1.0 - 1e-12)) {
      throw InfeasibleError("c5", static_cast<int>(k), "QoS set empty at current q");
    }
  }

  PrecoderState state;
  if (warm_start != nullptr) {
    state = *warm_start;
  } else {
    // matched direction of the strongest user, scaled just inside the C4 ball
    Eigen::VectorXcd dir = g_rows.row(0).adjoint();
    if (dir.norm() < 1e-300) dir = Eigen::VectorXcd::Unit(n_tx, 0);
    dir.normalize();
    const double sum_p = p.sum();
    const double norm0 = sum_p > 0.0 ? 0.95 * std::sqrt(total_power / sum_p) : 1.0;
    state.f = norm0 * dir;
    state.w = state.f;
    state.w_hat.resize(k_count);
    state.lambda_p1 = Eigen::VectorXcd::Zero(n_tx);
    state.lambda_p2 = Eigen::VectorXcd::Zero(k_count);
    state.penalty_p1 = config.admm_penalty_p1;
    state.penalty_p2 = config.admm_penalty_p2;
    const Eigen::VectorXcd y0 = g_rows * state.f;
    for (Eigen::Index k = 0; k < k_count; ++k) {
      state.w_hat(k) =
          update_w_hat(sqrt_q(k), s(k), c(k) * y0(k), state.penalty_p2, slack.epsilon(k));
    }
  }

  AdmmDiagnostics diag;
  Eigen::VectorXcd f_prev = state.f;
  double delta_f = 0.0, c6 = 0.0;

  for (int outer = 1; outer <= kMaxOuter; ++outer) {
    // inner layer: W, then the per-user w_hat block with its multiplier.
    // W and the cascade products depend only on quantities held fixed here,
    // so they are computed once per entry.
    state.w = update_w(state.f, state.lambda_p1, state.penalty_p1, p, total_power);
    const Eigen::VectorXcd y = g_rows * state.f;
    for (int sweep = 0; sweep < kMaxInnerSweeps; ++sweep) {
      double inner_res = 0.0;
      for (Eigen::Index k = 0; k < k_count; ++k) {
        const std::complex<double> target = c(k) * y(k);
        const std::complex<double> v = target + state.lambda_p2(k) / state.penalty_p2;
        state.w_hat(k) = update_w_hat(sqrt_q(k), s(k), v, state.penalty_p2, slack.epsilon(k));
        state.lambda_p2(k) += state.penalty_p2 * (target - state.w_hat(k));
        inner_res = std::max(inner_res, std::norm(target - state.w_hat(k)));
      }
      if (inner_res <= tol / 10.0) break;
    }

    const double lagr_before = augmented_lagrangian(state, g_rows, q, p, total_power);
    state.f = update_f(state, g_rows, q, p);
    const double lagr_after = augmented_lagrangian(state, g_rows, q, p, total_power);
    state.lambda_p1 += state.penalty_p1 * (state.f - state.w);

    delta_f = (state.f - f_prev).squaredNorm();
    c6 = (state.f - state.w).squaredNorm();
    double c7_max = 0.0;
    const Eigen::VectorXcd y_new = g_rows * state.f;
    for (Eigen::Index k = 0; k < k_count; ++k) {
      c7_max = std::max(c7_max, std::norm(c(k) * y_new(k) - state.w_hat(k)));
    }
    diag.trace.push_back({outer, c6, c7_max, lagr_after, delta_f, lagr_before});
    diag.outer_iters = outer;
    f_prev = state.f;

    if (delta_f <= tol && c6 <= tol) {
      diag.converged = true;
      break;
    }
  }

  if (!diag.converged && (delta_f > 10.0 * tol || c6 > 10.0 * tol)) {
    throw NonConvergenceError("ADMM iteration cap reached with residuals above 10x tol_admm",
                              diag);
  }

  // C4 safeguard on the returned point; W is feasible and F matches it to
  // within tol, so this is at most a small radial correction.
  const double sum_p = p.sum();
  if (sum_p > 0.0) {
    const double used = state.f.squaredNorm() * sum_p;
    if (used > total_power) state.f *= std::sqrt(total_power / used);
  }
  return {state.f, std::move(diag)};
}

PrecoderResult solve_precoder(const ChannelRealization& ch, const ReflectionState& theta,
                              const Eigen::VectorXd& q, const PowerAllocation& p,
                              const SystemConfig& config, const PrecoderState* warm_start) {
  const Eigen::MatrixXcd g_rows = cascade_rows(ch.irs_user, theta, ch.bs_irs, p.ordering);
  return solve_precoder_rows(g_rows, q, p.p, config, warm_start);
}

}  // namespace irsopt
