#include "irsopt/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "irsopt/errors.hpp"
#include "irsopt/irs_pgd.hpp"
#include "irsopt/power_alloc.hpp"
#include "irsopt/precoder_admm.hpp"
#include "irsopt/rng.hpp"

namespace irsopt {

namespace {

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

Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& objective,
                                     const Eigen::VectorXd& point, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be > 0");
  Eigen::VectorXd grad(point.size());
  Eigen::VectorXd x = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    x(i) = point(i) + h;
    const double up = objective(x);
    x(i) = point(i) - h;
    const double down = objective(x);
    x(i) = point(i);
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::domain_error("finite_diff_gradient: objective not finite near point");
    }
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

PowerAllocation grid_power_search(const Eigen::VectorXcd& ordered_gains,
                                  const Eigen::VectorXd& q, const Eigen::VectorXcd& f,
                                  double total_power, double rate_floor, double sigma2,
                                  int resolution) {
  const int k_count = static_cast<int>(ordered_gains.size());
  if (k_count > 3) {
    throw std::invalid_argument("grid_power_search: refusing K > 3 (cost grows as res^K)");
  }
  const double f2 = f.squaredNorm();
  const double p_max = total_power / f2;
  const double delta = p_max / resolution;
  const double floor_factor = std::pow(2.0, rate_floor) - 1.0;

  Eigen::VectorXd p(k_count), best_p(k_count);
  bool found = false;
  double best_cost = 0.0;

  const auto feasible = [&]() {
    for (int k = 0; k < k_count; ++k) {
      const double g2 = std::norm(ordered_gains(k));
      const double interference = k > 0 ? p.head(k).sum() : 0.0;
      if (g2 * p(k) - floor_factor * (g2 * interference + sigma2) < -1e-12) return false;
    }
    return true;
  };

  // enumerate the simplex sum(indices) <= resolution
  const std::function<void(int, int)> visit = [&](int k, int remaining) {
    if (k == k_count) {
      if (!feasible()) return;
      const double cost = weighted_mse(q, ordered_gains, p, sigma2);
      if (!found || cost < best_cost) {
        found = true;
        best_cost = cost;
        best_p = p;
      }
      return;
    }
    for (int i = 0; i <= remaining; ++i) {
      p(k) = i * delta;
      visit(k + 1, remaining - i);
    }
  };
  visit(0, resolution);

  if (!found) {
    throw InfeasibleError("c8", -1, "no feasible point on the power grid");
  }
  PowerAllocation alloc;
  alloc.p = best_p;
  alloc.ordering.resize(k_count);
  for (int k = 0; k < k_count; ++k) alloc.ordering[k] = k;
  return alloc;
}

ReflectionState exhaustive_phase_search(const Eigen::MatrixXcd& h_rows,
                                        const Eigen::MatrixXcd& H, const Eigen::VectorXcd& f,
                                        const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                        int levels) {
  const int n_r = static_cast<int>(h_rows.cols());
  double combos = 1.0;
  for (int i = 0; i < n_r; ++i) combos *= levels;
  if (combos > 1e6) {
    throw std::invalid_argument("exhaustive_phase_search: levels^N_r exceeds 1e6");
  }

  // gains computed by a plain loop, independent of the gradient module
  const Eigen::VectorXcd hf = H * f;
  const auto gains_at = [&](const Eigen::VectorXcd& diag) {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(h_rows.rows());
    for (Eigen::Index k = 0; k < h_rows.rows(); ++k) {
      for (int i = 0; i < n_r; ++i) g(k) += h_rows(k, i) * diag(i) * hf(i);
    }
    return g;
  };

  std::vector<int> digits(n_r, 0);
  Eigen::VectorXd phases(n_r);
  Eigen::VectorXd best_phases(n_r);
  const double noise_free = 1e-12;  // cost offset irrelevant to the argmin
  double best_cost = 0.0;
  bool first = true;

  while (true) {
    Eigen::VectorXcd diag(n_r);
    for (int i = 0; i < n_r; ++i) {
      phases(i) = -M_PI + 2.0 * M_PI * digits[i] / levels;
      diag(i) = std::polar(1.0, phases(i));
    }
    const double cost = weighted_mse(q, gains_at(diag), p, noise_free);
    if (first || cost < best_cost) {
      first = false;
      best_cost = cost;
      best_phases = phases;
    }
    int pos = n_r - 1;
    while (pos >= 0 && ++digits[pos] == levels) digits[pos--] = 0;
    if (pos < 0) break;
  }
  return ReflectionState::from_phases(best_phases);
}

double precoder_cost(const Eigen::MatrixXcd& g_rows, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& p, const Eigen::VectorXcd& f) {
  const Eigen::VectorXd s = interference_sums(p);
  const Eigen::VectorXcd y = g_rows * f;
  double cost = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double c = std::sqrt(q(k) * p(k));
    cost += std::norm(std::sqrt(q(k)) - c * y(k)) + c * c * std::norm(y(k)) * s(k);
  }
  return cost;
}

Eigen::VectorXcd pgd_precoder_reference(const Eigen::MatrixXcd& g_rows,
                                        const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                        double total_power, double rate_floor,
                                        double stationarity_tol) {
  const Eigen::Index n_tx = g_rows.cols();
  const Eigen::Index k_count = g_rows.rows();
  const Eigen::VectorXd s = interference_sums(p);
  const Eigen::VectorXd eps = QosSlack::from_q(q, rate_floor).epsilon;
  const double sum_p = p.sum();
  const double ball_r2 = sum_p > 0.0 ? total_power / sum_p : -1.0;

  // per-user QoS disk in z = c_k g_k F coordinates
  struct Disk {
    Eigen::Index user;
    double c;
    double center;
    double radius;
    double row_norm2;
  };
  std::vector<Disk> disks;
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const double c = std::sqrt(q(k) * p(k));
    if (c == 0.0) {
      if (q(k) > eps(k)) {
        throw InfeasibleError("c5", static_cast<int>(k), "zero-power user with empty QoS set");
      }
      continue;
    }
    const double rho2 = (eps(k) - c5_min_value(q(k), s(k))) / (1.0 + s(k));
    if (rho2 < 0.0) {
      throw InfeasibleError("c5", static_cast<int>(k), "QoS disk empty");
    }
    disks.push_back({k, c, std::sqrt(q(k)) / (1.0 + s(k)), std::sqrt(rho2),
                     g_rows.row(k).squaredNorm()});
  }

  const auto project_disk = [&](const Disk& d, const Eigen::VectorXcd& x) {
    const std::complex<double> z = d.c * (g_rows.row(d.user) * x).value();
    const std::complex<double> offset = z - d.center;
    const double dist = std::abs(offset);
    if (dist <= d.radius) return x;
    const std::complex<double> z_new = d.center + offset * (d.radius / dist);
    return Eigen::VectorXcd(x + g_rows.row(d.user).adjoint() * ((z_new - z) / d.c) / d.row_norm2);
  };
  const auto project_ball = [&](const Eigen::VectorXcd& x) {
    if (ball_r2 < 0.0) return x;
    const double n2 = x.squaredNorm();
    if (n2 <= ball_r2) return x;
    return Eigen::VectorXcd(x * std::sqrt(ball_r2 / n2));
  };

  // Dykstra's alternating projections onto the intersection
  const auto project_intersection = [&](Eigen::VectorXcd x) {
    const std::size_t n_sets = disks.size() + 1;
    std::vector<Eigen::VectorXcd> incr(n_sets, Eigen::VectorXcd::Zero(n_tx));
    for (int cycle = 0; cycle < 400; ++cycle) {
      const Eigen::VectorXcd before = x;
      for (std::size_t i = 0; i < n_sets; ++i) {
        const Eigen::VectorXcd y0 = x + incr[i];
        const Eigen::VectorXcd y1 = i == 0 ? project_ball(y0) : project_disk(disks[i - 1], y0);
        incr[i] = y0 - y1;
        x = y1;
      }
      if ((x - before).norm() <= 1e-13 * std::max(1.0, x.norm())) break;
    }
    return x;
  };

  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_tx, n_tx);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n_tx);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const double qp = q(k) * p(k);
    a.noalias() += qp * (1.0 + s(k)) * (g_rows.row(k).adjoint() * g_rows.row(k));
    b.noalias() += q(k) * std::sqrt(p(k)) * g_rows.row(k).adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a);
  const double lip = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lip;

  Eigen::VectorXcd f = project_intersection(Eigen::VectorXcd::Zero(n_tx));
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXcd grad = a * f - b;
    const Eigen::VectorXcd f_next = project_intersection(f - step * grad);
    const double move = (f_next - f).norm();
    f = f_next;
    if (move <= stationarity_tol * std::max(1.0, f.norm())) break;
  }
  return f;
}

std::vector<OracleVerdict> run_validation_suite(std::uint64_t seed) {
  std::vector<OracleVerdict> verdicts;
  Rng rng(seed);

  const auto random_cvec = [&](int n, double scale) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.complex_gaussian(scale * scale);
    return v;
  };
  const auto random_cmat = [&](int r, int c, double scale) {
    Eigen::MatrixXcd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = rng.complex_gaussian(scale * scale);
    return m;
  };

  // 1. analytic reflection gradient vs central differences
  {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const int n_r = 2 + static_cast<int>(rng.uniform() * 5);
      const int k_count = 1 + static_cast<int>(rng.uniform() * 3);
      const Eigen::MatrixXcd h_rows = random_cmat(k_count, n_r, 1.0);
      const Eigen::MatrixXcd big_h = random_cmat(n_r, 3, 0.6);
      const Eigen::VectorXcd f = random_cvec(3, 1.0);
      Eigen::VectorXd q(k_count), p(k_count);
      for (int k = 0; k < k_count; ++k) {
        q(k) = rng.uniform(0.5, 2.0);
        p(k) = rng.uniform(0.05, 0.5);
      }
      Eigen::VectorXd phases(n_r);
      for (int i = 0; i < n_r; ++i) phases(i) = rng.uniform(-M_PI, M_PI);
      const ReflectionState theta = ReflectionState::from_phases(phases);

      const Eigen::VectorXcd hf = big_h * f;
      const auto objective = [&](const Eigen::VectorXd& coords) {
        Eigen::VectorXcd gains = Eigen::VectorXcd::Zero(k_count);
        for (int k = 0; k < k_count; ++k) {
          for (int i = 0; i < n_r; ++i) {
            gains(k) += h_rows(k, i) * std::complex<double>(coords(2 * i), coords(2 * i + 1)) * hf(i);
          }
        }
        return weighted_mse(q, gains, p, 0.3);
      };
      Eigen::VectorXd point(2 * n_r);
      const Eigen::VectorXcd diag = theta.diagonal();
      for (int i = 0; i < n_r; ++i) {
        point(2 * i) = diag(i).real();
        point(2 * i + 1) = diag(i).imag();
      }
      const Eigen::VectorXd fd = finite_diff_gradient(objective, point);
      const Eigen::VectorXcd grad = grad_theta(theta, h_rows, big_h, f, q, p);
      Eigen::VectorXd analytic(2 * n_r);
      for (int i = 0; i < n_r; ++i) {
        analytic(2 * i) = grad(i).real();
        analytic(2 * i + 1) = grad(i).imag();
      }
      worst = std::max(worst, (fd - analytic).norm() / std::max(analytic.norm(), 1e-12));
    }
    verdicts.push_back({"grad_theta_vs_finite_diff", worst, worst <= 1e-5, 1e-5});
  }

  // 2. KKT power allocation vs exhaustive grid (sum-rate agreement)
  {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXcd gains = random_cvec(2, 1.0);
      std::sort(gains.data(), gains.data() + gains.size(),
                [](auto a, auto b) { return std::abs(a) > std::abs(b); });
      Eigen::VectorXd q(2);
      q << rng.uniform(0.8, 2.0), rng.uniform(0.8, 2.0);
      const Eigen::VectorXcd f = Eigen::VectorXcd::Ones(1);
      const double total_power = rng.uniform(0.05, 0.1);
      const double sigma2 = 1.0;
      try {
        const auto solved = solve_power(gains, q, f, total_power, 0.0, sigma2);
        const auto grid = grid_power_search(gains, q, f, total_power, 0.0, sigma2, 500);
        worst = std::max(worst, std::abs(sum_rate(gains, solved.alloc.p, sigma2) -
                                         sum_rate(gains, grid.p, sigma2)));
      } catch (const InfeasibleError&) {
        // both sides must agree on emptiness; reaching here alone is a failure
        worst = std::max(worst, 1.0);
      }
    }
    verdicts.push_back({"solve_power_vs_grid", worst, worst <= 1e-3, 1e-3});
  }

  // 3. phase optimizer vs quantized exhaustive search
  {
    double worst = 0.0;
    SystemConfig cfg = desk_preset();
    cfg.noise_power = 0.1;
    for (int trial = 0; trial < 3; ++trial) {
      const int n_r = 4;
      const Eigen::MatrixXcd h_rows = random_cmat(1, n_r, 1.0);
      const Eigen::MatrixXcd big_h = random_cmat(n_r, 3, 0.6);
      const Eigen::VectorXcd f = random_cvec(3, 0.7);
      Eigen::VectorXd q(1), p(1);
      q << rng.uniform(0.8, 1.5);
      p << rng.uniform(0.1, 0.5);
      Eigen::VectorXd phases(n_r);
      for (int i = 0; i < n_r; ++i) phases(i) = rng.uniform(-M_PI, M_PI);
      const ReflectionState theta0 = ReflectionState::from_phases(phases);

      const auto opt = optimize_theta(theta0, h_rows, big_h, f, q, p, cfg);
      const auto grid = exhaustive_phase_search(h_rows, big_h, f, q, p, 16);
      const Eigen::VectorXcd hf = big_h * f;
      const auto gains_of = [&](const ReflectionState& st) {
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(1);
        for (int i = 0; i < n_r; ++i) {
          g(0) += h_rows(0, i) * std::polar(1.0, st.phases(i)) * hf(i);
        }
        return g;
      };
      const double opt_cost = weighted_mse(q, gains_of(opt.theta), p, cfg.noise_power);
      const double grid_cost = weighted_mse(q, gains_of(grid), p, cfg.noise_power);
      worst = std::max(worst, (opt_cost - grid_cost) / std::max(grid_cost, 1e-12));
    }
    verdicts.push_back({"optimize_theta_vs_grid", worst, worst <= 0.02, 0.02});
  }

  // 4. ADMM precoder vs first-order reference (cost agreement)
  {
    double worst = 0.0;
    SystemConfig cfg = desk_preset();
    cfg.rate_floor = 0.01;
    for (int trial = 0; trial < 2; ++trial) {
      const Eigen::MatrixXcd g_rows = random_cmat(2, 4, 1.0);
      Eigen::VectorXd q(2), p(2);
      q << rng.uniform(1.2, 2.0), rng.uniform(1.2, 2.0);
      p << rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.2);
      cfg.total_power = 1.0;
      cfg.tol_admm = 1e-6;
      const auto admm = solve_precoder_rows(g_rows, q, p, cfg);
      const Eigen::VectorXcd ref =
          pgd_precoder_reference(g_rows, q, p, cfg.total_power, cfg.rate_floor);
      const double c_admm = precoder_cost(g_rows, q, p, admm.f);
      const double c_ref = precoder_cost(g_rows, q, p, ref);
      worst = std::max(worst, std::abs(c_admm - c_ref) / std::max(c_ref, 1e-12));
    }
    verdicts.push_back({"solve_precoder_vs_pgd_reference", worst, worst <= 0.01, 0.01});
  }

  return verdicts;
}

}  // namespace irsopt
