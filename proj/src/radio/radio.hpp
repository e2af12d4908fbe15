#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "env/world_state.hpp"

namespace vqmorl::radio {

inline constexpr std::size_t kMaxCandidates = 3;
inline constexpr double kSpeedOfLight = 299792458.0;

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);

/// RBSs every rf_spacing_m and TBSs every thz_spacing_m along the ring, each
/// tier offset by half a spacing. RBS ids come first.
std::vector<BaseStation> make_base_stations(const RadioConfig& cfg, double road_length);

/// 3-D distance on the ring road, clamped below at 1 m.
double link_distance(const traffic::VehicleState& av, const BaseStation& bs, const WorldState& world);

/// Log-distance pathloss with optional unit-mean exponential fading;
/// interference from every other RBS.
double rf_sinr(const traffic::VehicleState& av, const BaseStation& bs, const WorldState& world);

/// Free-space spreading with molecular absorption exp(-k_a d). The serving
/// beam is aligned; each interfering TBS hits the main lobe with probability q
/// (one draw per interferer per step, from the world's counter substream).
double thz_sinr(const traffic::VehicleState& av, const BaseStation& bs, const WorldState& world);

/// W log2(1 + sinr).
double data_rate(double bandwidth, double sinr);

/// One LinkBudget per station, indexed by station id.
std::vector<LinkBudget> evaluate_links(const traffic::VehicleState& av, const WorldState& world);

/// Filters sinr >= threshold, sorts by rate descending (ties: lower id) and
/// keeps at most three.
std::vector<Candidate> select_candidates(std::span<const LinkBudget> links, double sinr_threshold);
std::vector<Candidate> candidate_set(const traffic::VehicleState& av, const WorldState& world);

/// n_i: number of vehicles whose candidate list contains station i.
std::vector<int> load_counts(std::span<const AssocState> assoc, std::size_t station_count);

/// rate / max(1, min(quota, load)) * (1 - mu).
double weighted_rate(double rate, int quota, int load, double mu);

enum class TeleAction { MaxWeightedRate = 1, VacantWeightedRate = 2, MaxRate = 3 };

TeleAction tele_action_from_index(int index);

struct NetworkSnapshot {
  std::span<const BaseStation> stations;
  std::span<const int> loads;
  double sinr_threshold = 1.0;  // linear
};

/// Chooses the serving station for the next step. `assoc.serving_sinr` must
/// hold the current SINR of the incumbent link. Returns nullopt when the
/// vehicle is disconnected.
std::optional<int> resolve_tele_action(TeleAction action, const AssocState& assoc, const NetworkSnapshot& net);

/// Advances the step counter, counts a handoff on any A -> B change (A != B),
/// and refreshes xi = ho_count / max(1, episode_steps - 1).
AssocState update_handoff(AssocState assoc, std::optional<int> new_bs);

void write_network_trace_header(std::ostream& out);
void write_network_trace(std::ostream& out, const WorldState& world, double time_s);

}  // namespace vqmorl::radio
