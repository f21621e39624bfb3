#include "irsopt/channel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "irsopt/rng.hpp"
#include "json.hpp"

namespace irsopt {

namespace {

constexpr double kHalfPi = M_PI / 2.0;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_angle(double a) {
  if (!(a >= -kHalfPi && a <= kHalfPi)) {
    throw std::domain_error("steering angle outside [-pi/2, pi/2]");
  }
}

}  // namespace

double SystemConfig::snr_db() const {
  return 10.0 * std::log10(total_power / noise_power);
}

void SystemConfig::validate() const {
  require(n_tx >= 1 && n_irs_x >= 1 && n_irs_y >= 1 && n_users >= 1,
          "antenna/element/user counts must be >= 1");
  require(n_paths_bi >= 1 && n_paths_iu >= 1, "path counts must be >= 1");
  require(total_power > 0 && noise_power > 0, "powers must be > 0");
  require(rate_floor >= 0, "rate_floor must be >= 0");
  require(irs_width > 0, "irs_width must be > 0");
  require(shadow_sigma >= 0, "shadow_sigma must be >= 0");
  require(max_outer_iters >= 0, "max_outer_iters must be >= 0");
  require(admm_penalty_p1 > 0 && admm_penalty_p2 > 0, "penalties must be > 0");
  require(pgd_step > 0, "pgd_step must be > 0");
  require(tol_admm > 0 && tol_outer > 0, "tolerances must be > 0");
}

SystemConfig desk_preset() { return SystemConfig{}; }

SystemConfig paper_scale_preset() {
  SystemConfig cfg;
  cfg.n_tx = 256;
  cfg.n_irs_x = 8;
  cfg.n_irs_y = 8;
  cfg.n_users = 16;
  return cfg;
}

Eigen::VectorXcd ula_response(int n_elements, double angle) {
  require(n_elements >= 1, "ula_response: n_elements must be >= 1");
  check_angle(angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_elements));
  const double step = M_PI * std::sin(angle);
  Eigen::VectorXcd v(n_elements);
  for (int m = 0; m < n_elements; ++m) {
    v(m) = std::polar(scale, step * m);
  }
  return v;
}

Eigen::VectorXcd ura_response(int nx, int ny, double azimuth, double elevation) {
  require(nx >= 1 && ny >= 1, "ura_response: grid sides must be >= 1");
  check_angle(azimuth);
  check_angle(elevation);
  const double scale = 1.0 / std::sqrt(static_cast<double>(nx) * ny);
  const double h_step = M_PI * std::sin(azimuth) * std::sin(elevation);
  const double v_step = M_PI * std::cos(elevation);
  Eigen::VectorXcd v(nx * ny);
  for (int m = 0; m < nx; ++m) {
    for (int n = 0; n < ny; ++n) {
      v(m * ny + n) = std::polar(scale, h_step * m + v_step * n);
    }
  }
  return v;
}

double path_gain_variance(double distance_m, double shadow_db) {
  if (!(distance_m > 0)) {
    throw std::domain_error("path_gain_variance: distance must be > 0");
  }
  const double loss_db = 61.4 + 20.0 * std::log10(distance_m) + shadow_db;
  return std::pow(10.0, -loss_db / 10.0);
}

namespace {

PathSet draw_path_set(Rng& rng, int n_paths, double variance) {
  PathSet ps;
  ps.gains.resize(n_paths);
  ps.aoa_azimuth.resize(n_paths);
  ps.aoa_elevation.resize(n_paths);
  ps.aod_azimuth.resize(n_paths);
  ps.aod_elevation.resize(n_paths);
  for (int n = 0; n < n_paths; ++n) {
    ps.aoa_azimuth(n) = rng.uniform(-kHalfPi, kHalfPi);
    ps.aoa_elevation(n) = rng.uniform(-kHalfPi, kHalfPi);
    ps.aod_azimuth(n) = rng.uniform(-kHalfPi, kHalfPi);
    ps.aod_elevation(n) = rng.uniform(-kHalfPi, kHalfPi);
    ps.gains(n) = rng.complex_gaussian(variance);
  }
  return ps;
}

}  // namespace

Eigen::MatrixXcd assemble_bs_irs(const PathSet& paths, int n_tx, int n_irs_x, int n_irs_y) {
  const int n_irs = n_irs_x * n_irs_y;
  const int n_paths = static_cast<int>(paths.gains.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n_irs, n_tx);
  for (int n = 0; n < n_paths; ++n) {
    const Eigen::VectorXcd a =
        ura_response(n_irs_x, n_irs_y, paths.aoa_azimuth(n), paths.aoa_elevation(n));
    const Eigen::VectorXcd b = ula_response(n_tx, paths.aod_azimuth(n));
    h.noalias() += paths.gains(n) * (a * b.adjoint());
  }
  h *= std::sqrt(static_cast<double>(n_tx) * n_irs / n_paths);
  return h;
}

Eigen::RowVectorXcd assemble_irs_user(const PathSet& paths, int n_irs_x, int n_irs_y) {
  const int n_irs = n_irs_x * n_irs_y;
  const int n_paths = static_cast<int>(paths.gains.size());
  Eigen::RowVectorXcd h = Eigen::RowVectorXcd::Zero(n_irs);
  for (int n = 0; n < n_paths; ++n) {
    const Eigen::VectorXcd a =
        ura_response(n_irs_x, n_irs_y, paths.aod_azimuth(n), paths.aod_elevation(n));
    h += paths.gains(n) * a.adjoint();
  }
  h *= std::sqrt(static_cast<double>(n_irs) / n_paths);
  return h;
}

ChannelRealization generate_channels(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);

  ChannelRealization ch;

  // BS-IRS link: one shadowing draw, then the paths.
  const double shadow_bi = rng.gaussian() * config.shadow_sigma;
  const double var_bi = path_gain_variance(config.irs_width, shadow_bi);
  ch.bs_irs_paths = draw_path_set(rng, config.n_paths_bi, var_bi);
  ch.bs_irs = assemble_bs_irs(ch.bs_irs_paths, config.n_tx, config.n_irs_x, config.n_irs_y);

  ch.irs_user.resize(config.n_users, config.n_irs());
  ch.irs_user_paths.reserve(config.n_users);
  for (int k = 0; k < config.n_users; ++k) {
    const double shadow_iu = rng.gaussian() * config.shadow_sigma;
    const double var_iu = path_gain_variance(config.irs_width, shadow_iu);
    ch.irs_user_paths.push_back(draw_path_set(rng, config.n_paths_iu, var_iu));
    ch.irs_user.row(k) = assemble_irs_user(ch.irs_user_paths.back(), config.n_irs_x, config.n_irs_y);
  }
  return ch;
}

namespace {

nlohmann::json complex_to_json(const std::complex<double>& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json cvec_to_json(const Eigen::VectorXcd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

nlohmann::json rvec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

nlohmann::json path_set_to_json(const PathSet& ps) {
  return nlohmann::json{{"gains", cvec_to_json(ps.gains)},
                        {"aoa_azimuth", rvec_to_json(ps.aoa_azimuth)},
                        {"aoa_elevation", rvec_to_json(ps.aoa_elevation)},
                        {"aod_azimuth", rvec_to_json(ps.aod_azimuth)},
                        {"aod_elevation", rvec_to_json(ps.aod_elevation)}};
}

}  // namespace

std::string to_snapshot(const ChannelRealization& ch) {
  nlohmann::json j;
  nlohmann::json h_rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < ch.bs_irs.rows(); ++r) {
    h_rows.push_back(cvec_to_json(ch.bs_irs.row(r).transpose()));
  }
  j["bs_irs"] = h_rows;
  nlohmann::json users = nlohmann::json::array();
  for (Eigen::Index k = 0; k < ch.irs_user.rows(); ++k) {
    users.push_back(cvec_to_json(ch.irs_user.row(k).transpose()));
  }
  j["irs_user"] = users;
  j["bs_irs_paths"] = path_set_to_json(ch.bs_irs_paths);
  nlohmann::json iu_paths = nlohmann::json::array();
  for (const auto& ps : ch.irs_user_paths) iu_paths.push_back(path_set_to_json(ps));
  j["irs_user_paths"] = iu_paths;
  return j.dump(2);
}

}  // namespace irsopt
