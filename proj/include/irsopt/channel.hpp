#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace irsopt {

// All dimensions, powers and solver knobs of one system instance.
// Powers are linear watts; rates are bit/s/Hz; angles are radians.
struct SystemConfig {
  int n_tx = 32;         // BS antennas (ULA)
  int n_irs_x = 4;       // IRS elements, horizontal
  int n_irs_y = 4;       // IRS elements, vertical
  int n_users = 4;
  int n_paths_bi = 3;    // BS-IRS propagation paths
  int n_paths_iu = 3;    // IRS-user propagation paths
  double total_power = 1.0;    // transmit budget P [W]
  double noise_power = 0.1;    // per-user sigma^2 [W]
  double rate_floor = 0.01;    // per-user minimum rate R_min
  double irs_width = 0.002;    // d_bu entering the path-loss law [m]
  double shadow_sigma = 0.0;   // lognormal shadowing std dev [dB]
  int max_outer_iters = 12;            // alternating-loop cap T_max
  double admm_penalty_p1 = 1.0;        // consensus penalty (W = F block)
  double admm_penalty_p2 = 1.0;        // QoS penalty (W-hat block)
  double pgd_step = 0.01;              // IRS gradient step mu
  double tol_admm = 1e-3;              // ADMM termination on squared norms
  double tol_outer = 1e-4;             // sum-rate stall threshold
  std::uint64_t rng_seed = 1;
  double no_irs_extra_loss_db = 30.0;  // synthetic direct-link baseline knob

  int n_irs() const { return n_irs_x * n_irs_y; }
  double snr_db() const;

  // throws std::invalid_argument on out-of-range fields
  void validate() const;
};

// Small dimensions for fast seeds-by-the-hundred runs.
SystemConfig desk_preset();
// Full-size dimensions (256 BS antennas, 64 IRS elements, 16 users).
SystemConfig paper_scale_preset();

// The geometric parameters of one sparse multipath link. For the BS-IRS link
// the arrival angles (at the IRS) and the departure azimuth (at the BS) are
// used; for IRS-user links the departure pair (at the IRS) is used. All four
// angle lists are always populated so a PathSet round-trips uniformly.
struct PathSet {
  Eigen::VectorXcd gains;
  Eigen::VectorXd aoa_azimuth;
  Eigen::VectorXd aoa_elevation;
  Eigen::VectorXd aod_azimuth;
  Eigen::VectorXd aod_elevation;
};

// One channel draw: the BS-IRS matrix H (N_r x N_t) and the K IRS-user rows
// h_k (1 x N_r), together with the paths that generated them.
struct ChannelRealization {
  Eigen::MatrixXcd bs_irs;            // H
  Eigen::MatrixXcd irs_user;          // K x N_r, row k = h_k
  PathSet bs_irs_paths;
  std::vector<PathSet> irs_user_paths;
};

// Half-wavelength ULA steering vector, entry m = exp(j*pi*m*sin(angle))/sqrt(N).
// angle must lie in [-pi/2, pi/2].
Eigen::VectorXcd ula_response(int n_elements, double angle);

// URA steering vector: Kronecker of a horizontal factor with per-element phase
// pi*m*sin(azimuth)*sin(elevation) and a vertical factor pi*n*cos(elevation),
// unit norm, element index m*ny + n.
Eigen::VectorXcd ura_response(int nx, int ny, double azimuth, double elevation);

// Linear gain variance of the 28 GHz one-meter-referenced path-loss law
// 61.4 dB + 20 log10(d) + shadowing, read as attenuation.
double path_gain_variance(double distance_m, double shadow_db);

// Draws a full realization. Equal (config, seed) pairs produce bit-identical
// output. Draw order per link: shadowing, then per path the four angles
// followed by the complex gain.
ChannelRealization generate_channels(const SystemConfig& config, std::uint64_t seed);

// Rebuilds H (or a user row) from a stored PathSet; used by regeneration checks.
Eigen::MatrixXcd assemble_bs_irs(const PathSet& paths, int n_tx, int n_irs_x, int n_irs_y);
Eigen::RowVectorXcd assemble_irs_user(const PathSet& paths, int n_irs_x, int n_irs_y);

// Structured-text snapshot (JSON; complex numbers as [re, im] pairs).
std::string to_snapshot(const ChannelRealization& ch);

}  // namespace irsopt
