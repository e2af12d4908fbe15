#pragma once

#include <optional>
#include <vector>

namespace vqmorl::radio {

enum class Tier { RF, THz };

struct BaseStation {
  int id = 0;
  Tier tier = Tier::RF;
  double x = 0.0;          // along the road, m
  double y = 0.0;          // lateral, m (negative: beside lane 0)
  double height = 0.0;     // antenna height, m
  double tx_power_dbm = 0.0;
  double bandwidth = 0.0;  // Hz
  int quota = 1;
  double carrier = 0.0;    // Hz
  double ho_penalty = 0.0; // mu in [0, 1)

  bool operator==(const BaseStation&) const = default;
};

/// Channel and deployment constants for both tiers. Defaults are engineering
/// choices; every field is overridable from the run configuration.
struct RadioConfig {
  double rf_carrier_hz = 2e9;
  double rf_pathloss_exponent = 3.0;
  double rf_tx_power_dbm = 40.0;
  double rf_antenna_gain_dbi = 0.0;
  double rf_bandwidth_hz = 20e6;
  int rf_quota = 8;
  double rf_ho_penalty = 0.05;
  double rf_spacing_m = 500.0;
  double rf_height_m = 10.0;
  bool rf_fading = false;

  double thz_carrier_hz = 0.3e12;
  double thz_absorption_per_m = 0.05;
  double thz_main_lobe_gain_dbi = 20.0;
  double thz_side_lobe_gain_dbi = -10.0;
  double thz_alignment_prob = 0.1;
  double thz_tx_power_dbm = 30.0;
  double thz_bandwidth_hz = 1e9;
  int thz_quota = 4;
  double thz_ho_penalty = 0.3;
  double thz_spacing_m = 100.0;
  double thz_height_m = 5.0;

  double noise_dbm_per_hz = -174.0;
  double sinr_threshold_db = 0.0;
  double bs_lateral_offset_m = 10.0;
  double av_antenna_height_m = 1.5;

  void validate() const;
  double sinr_threshold_linear() const;
  bool operator==(const RadioConfig&) const = default;
};

struct LinkBudget {
  double sinr = 0.0;  // linear
  double rate = 0.0;  // bit/s
};

struct Candidate {
  int bs_id = 0;
  double rate = 0.0;
  double sinr = 0.0;
  bool operator==(const Candidate&) const = default;
};

/// Association bookkeeping of one vehicle within an episode.
struct AssocState {
  std::optional<int> serving_bs;
  std::vector<Candidate> candidates;  // <= 3, rate descending
  int ho_count = 0;
  int episode_steps = 0;
  double xi = 0.0;
  double serving_sinr = 0.0;
  double serving_rate = 0.0;

  bool operator==(const AssocState&) const = default;
};

}  // namespace vqmorl::radio
