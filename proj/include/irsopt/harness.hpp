#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsopt/channel.hpp"

namespace irsopt {

enum class Scheme { joint, partial_f_fixed, random_theta, uniform_pa, no_irs };

std::string scheme_name(Scheme s);
Scheme scheme_from_string(const std::string& name);  // throws on unknown names

// One experiment: a base configuration, a sweep axis with its values, the
// schemes to compare, and the Monte-Carlo trial count. Trial t uses seed
// seed_base + t; all schemes of a trial share one channel realization.
struct ExperimentSpec {
  SystemConfig base;
  std::string sweep_axis = "snr_db";  // snr_db | power_dbm | n_irs
  std::vector<double> sweep_values;
  std::vector<Scheme> schemes{Scheme::joint, Scheme::partial_f_fixed, Scheme::random_theta,
                              Scheme::uniform_pa, Scheme::no_irs};
  int n_trials = 1;
  std::uint64_t seed_base = 1;
  std::string out_path = "sweep.csv";

  void validate() const;
};

struct SweepRow {
  std::string sweep_axis;
  double sweep_value = 0.0;
  Scheme scheme = Scheme::joint;
  double mean_se = 0.0;
  double std_se = 0.0;
  int n_trials = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

// Final spectral efficiency of one scheme on one channel realization.
double run_scheme(Scheme scheme, const SystemConfig& config, const ChannelRealization& ch);

// Paired Monte-Carlo sweep over the spec's axis.
SweepResult run_sweep(const ExperimentSpec& spec);

// Header `sweep_axis,sweep_value,scheme,mean_se,std_se,n_trials`, fixed
// 6-decimal values, newline-terminated rows; byte-stable for equal inputs.
void emit_csv(const SweepResult& result, const std::string& path);

std::string to_csv(const SweepResult& result);

// JSON config mirroring the ExperimentSpec field names.
ExperimentSpec load_spec(const std::string& json_path);

// per-axis default sweep values used by the CLI when a config gives none
std::vector<double> default_sweep_values(const std::string& axis);

// splits an element count into the widest grid with ny <= nx (largest divisor
// ny <= sqrt(n))
std::pair<int, int> irs_grid_for(int n_elements);

}  // namespace irsopt
