#include "radio/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "traffic/traffic.hpp"

namespace vqmorl::radio {

namespace {

constexpr std::uint64_t kBeamStream = 0x6265616dULL;
constexpr std::uint64_t kFadeStream = 0x66616465ULL;

double free_space_gain(double carrier, double distance) {
  const double g = kSpeedOfLight / (4.0 * std::numbers::pi * carrier * distance);
  return g * g;
}

double noise_watts(const RadioConfig& cfg, double bandwidth) { return dbm_to_watts(cfg.noise_dbm_per_hz) * bandwidth; }

double rf_received_power(const traffic::VehicleState& av, const BaseStation& bs, const WorldState& world) {
  const auto& cfg = world.radio;
  const double d = link_distance(av, bs, world);
  const double pathloss = free_space_gain(bs.carrier, 1.0) * std::pow(d, -cfg.rf_pathloss_exponent);
  double fading = 1.0;
  if (cfg.rf_fading) {
    const double u = unit_interval(hash64({world.seed, kFadeStream, static_cast<std::uint64_t>(world.t),
                                           static_cast<std::uint64_t>(av.id), static_cast<std::uint64_t>(bs.id)}));
    fading = -std::log1p(-u);
  }
  return dbm_to_watts(bs.tx_power_dbm) * db_to_linear(cfg.rf_antenna_gain_dbi) * fading * pathloss;
}

double thz_path_gain(const BaseStation& bs, double d, double absorption) {
  return free_space_gain(bs.carrier, d) * std::exp(-absorption * d);
}

}  // namespace

void RadioConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0)) throw ConfigError(std::string("radio.") + key + " must be positive");
  };
  positive(rf_carrier_hz, "rf_carrier_hz");
  positive(rf_pathloss_exponent, "rf_pathloss_exponent");
  positive(rf_bandwidth_hz, "rf_bandwidth_hz");
  positive(rf_spacing_m, "rf_spacing_m");
  positive(thz_carrier_hz, "thz_carrier_hz");
  positive(thz_bandwidth_hz, "thz_bandwidth_hz");
  positive(thz_spacing_m, "thz_spacing_m");
  if (!(thz_absorption_per_m >= 0)) throw ConfigError("radio.thz_absorption_per_m must be non-negative");
  if (!(thz_alignment_prob >= 0 && thz_alignment_prob <= 1)) throw ConfigError("radio.thz_alignment_prob must be in [0, 1]");
  if (rf_quota < 1) throw ConfigError("radio.rf_quota must be >= 1");
  if (thz_quota < 1) throw ConfigError("radio.thz_quota must be >= 1");
  if (!(rf_ho_penalty >= 0 && rf_ho_penalty < 1)) throw ConfigError("radio.rf_ho_penalty must be in [0, 1)");
  if (!(thz_ho_penalty >= 0 && thz_ho_penalty < 1)) throw ConfigError("radio.thz_ho_penalty must be in [0, 1)");
  if (!(thz_ho_penalty > rf_ho_penalty)) throw ConfigError("radio.thz_ho_penalty must exceed radio.rf_ho_penalty");
  if (!(rf_height_m >= 0 && thz_height_m >= 0 && av_antenna_height_m >= 0))
    throw ConfigError("radio antenna heights must be non-negative");
  if (!std::isfinite(noise_dbm_per_hz)) throw ConfigError("radio.noise_dbm_per_hz must be finite");
  if (!std::isfinite(sinr_threshold_db)) throw ConfigError("radio.sinr_threshold_db must be finite");
}

double RadioConfig::sinr_threshold_linear() const { return db_to_linear(sinr_threshold_db); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::vector<BaseStation> make_base_stations(const RadioConfig& cfg, double road_length) {
  std::vector<BaseStation> out;
  const auto place = [&](Tier tier, double spacing) {
    const int count = std::max(1, static_cast<int>(std::floor(road_length / spacing)));
    for (int k = 0; k < count; ++k) {
      BaseStation bs;
      bs.id = static_cast<int>(out.size());
      bs.tier = tier;
      bs.x = (k + 0.5) * spacing;
      bs.y = -cfg.bs_lateral_offset_m;
      if (tier == Tier::RF) {
        bs.height = cfg.rf_height_m;
        bs.tx_power_dbm = cfg.rf_tx_power_dbm;
        bs.bandwidth = cfg.rf_bandwidth_hz;
        bs.quota = cfg.rf_quota;
        bs.carrier = cfg.rf_carrier_hz;
        bs.ho_penalty = cfg.rf_ho_penalty;
      } else {
        bs.height = cfg.thz_height_m;
        bs.tx_power_dbm = cfg.thz_tx_power_dbm;
        bs.bandwidth = cfg.thz_bandwidth_hz;
        bs.quota = cfg.thz_quota;
        bs.carrier = cfg.thz_carrier_hz;
        bs.ho_penalty = cfg.thz_ho_penalty;
      }
      out.push_back(bs);
    }
  };
  place(Tier::RF, cfg.rf_spacing_m);
  place(Tier::THz, cfg.thz_spacing_m);
  return out;
}

double link_distance(const traffic::VehicleState& av, const BaseStation& bs, const WorldState& world) {
  const double along = traffic::forward_distance(av.x, bs.x, world.road.length);
  const double dx = std::min(along, world.road.length - along);
  const double dy = world.road.lane_center(av.lane) - bs.y;
  const double dz = bs.height - world.radio.av_antenna_height_m;
  return std::max(1.0, std::sqrt(dx * dx + dy * dy + dz * dz));
}

double rf_sinr(const traffic::VehicleState& av, const BaseStation& bs, const WorldState& world) {
  if (bs.tier != Tier::RF) throw Error(ErrorCode::InvalidArgument, "rf_sinr called on a THz station");
  const double signal = rf_received_power(av, bs, world);
  double interference = 0.0;
  for (const auto& other : world.stations)
    if (other.tier == Tier::RF && other.id != bs.id) interference += rf_received_power(av, other, world);
  return signal / (noise_watts(world.radio, bs.bandwidth) + interference);
}

double thz_sinr(const traffic::VehicleState& av, const BaseStation& bs, const WorldState& world) {
  if (bs.tier != Tier::THz) throw Error(ErrorCode::InvalidArgument, "thz_sinr called on an RF station");
  const auto& cfg = world.radio;
  const double g_main = db_to_linear(cfg.thz_main_lobe_gain_dbi);
  const double g_side = db_to_linear(cfg.thz_side_lobe_gain_dbi);
  const double signal = dbm_to_watts(bs.tx_power_dbm) * g_main * g_main *
                        thz_path_gain(bs, link_distance(av, bs, world), cfg.thz_absorption_per_m);
  double interference = 0.0;
  for (const auto& other : world.stations) {
    if (other.tier != Tier::THz || other.id == bs.id) continue;
    const double u = unit_interval(hash64({world.seed, kBeamStream, static_cast<std::uint64_t>(world.t),
                                           static_cast<std::uint64_t>(av.id), static_cast<std::uint64_t>(bs.id),
                                           static_cast<std::uint64_t>(other.id)}));
    const double gain = u < cfg.thz_alignment_prob ? g_main * g_main : g_side * g_side;
    interference += dbm_to_watts(other.tx_power_dbm) * gain *
                    thz_path_gain(other, link_distance(av, other, world), cfg.thz_absorption_per_m);
  }
  return signal / (noise_watts(cfg, bs.bandwidth) + interference);
}

double data_rate(double bandwidth, double sinr) { return bandwidth * std::log2(1.0 + sinr); }

std::vector<LinkBudget> evaluate_links(const traffic::VehicleState& av, const WorldState& world) {
  std::vector<LinkBudget> links;
  links.reserve(world.stations.size());
  for (const auto& bs : world.stations) {
    const double sinr = bs.tier == Tier::RF ? rf_sinr(av, bs, world) : thz_sinr(av, bs, world);
    links.push_back({sinr, data_rate(bs.bandwidth, sinr)});
  }
  return links;
}

std::vector<Candidate> select_candidates(std::span<const LinkBudget> links, double sinr_threshold) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].sinr >= sinr_threshold) out.push_back({static_cast<int>(i), links[i].rate, links[i].sinr});
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    return a.bs_id < b.bs_id;
  });
  if (out.size() > kMaxCandidates) out.resize(kMaxCandidates);
  return out;
}

std::vector<Candidate> candidate_set(const traffic::VehicleState& av, const WorldState& world) {
  return select_candidates(evaluate_links(av, world), world.radio.sinr_threshold_linear());
}

std::vector<int> load_counts(std::span<const AssocState> assoc, std::size_t station_count) {
  std::vector<int> loads(station_count, 0);
  for (const auto& a : assoc)
    for (const auto& c : a.candidates) ++loads.at(static_cast<std::size_t>(c.bs_id));
  return loads;
}

double weighted_rate(double rate, int quota, int load, double mu) {
  return rate / std::max(1, std::min(quota, load)) * (1.0 - mu);
}

TeleAction tele_action_from_index(int index) {
  if (index < 1 || index > 3) throw Error(ErrorCode::InvalidArgument, "tele action index must be in 1..3, got " + std::to_string(index));
  return static_cast<TeleAction>(index);
}

std::optional<int> resolve_tele_action(TeleAction action, const AssocState& assoc, const NetworkSnapshot& net) {
  const auto& cands = assoc.candidates;
  if (cands.empty()) {
    if (assoc.serving_bs && assoc.serving_sinr >= net.sinr_threshold) return assoc.serving_bs;
    return std::nullopt;
  }
  const auto station = [&](const Candidate& c) -> const BaseStation& { return net.stations[static_cast<std::size_t>(c.bs_id)]; };
  const auto load = [&](const Candidate& c) { return net.loads[static_cast<std::size_t>(c.bs_id)]; };

  // Strictly-greater scan over an id-ordered view gives the lower-id tie-break.
  std::vector<const Candidate*> by_id;
  for (const auto& c : cands) by_id.push_back(&c);
  std::sort(by_id.begin(), by_id.end(), [](const Candidate* a, const Candidate* b) { return a->bs_id < b->bs_id; });
  const auto argmax = [&](auto score, auto admissible) -> const Candidate* {
    const Candidate* best = nullptr;
    double best_score = 0.0;
    for (const Candidate* c : by_id) {
      if (!admissible(*c)) continue;
      const double s = score(*c);
      if (!best || s > best_score) {
        best = c;
        best_score = s;
      }
    }
    return best;
  };
  const auto any = [](const Candidate&) { return true; };

  const Candidate* chosen = nullptr;
  switch (action) {
    case TeleAction::MaxWeightedRate:
      chosen = argmax(
          [&](const Candidate& c) {
            const auto& bs = station(c);
            const double mu = assoc.serving_bs && *assoc.serving_bs == c.bs_id ? 0.0 : bs.ho_penalty;
            return weighted_rate(c.rate, bs.quota, load(c), mu);
          },
          any);
      break;
    case TeleAction::VacantWeightedRate: {
      const auto wr0 = [&](const Candidate& c) { return weighted_rate(c.rate, station(c).quota, load(c), 0.0); };
      chosen = argmax(wr0, [&](const Candidate& c) { return station(c).quota >= load(c); });
      if (!chosen) chosen = argmax(wr0, any);
      break;
    }
    case TeleAction::MaxRate:
      chosen = argmax([](const Candidate& c) { return c.rate; }, any);
      break;
  }
  return chosen->bs_id;
}

AssocState update_handoff(AssocState assoc, std::optional<int> new_bs) {
  ++assoc.episode_steps;
  if (assoc.serving_bs && new_bs && *assoc.serving_bs != *new_bs) ++assoc.ho_count;
  assoc.serving_bs = new_bs;
  assoc.xi = static_cast<double>(assoc.ho_count) / std::max(1, assoc.episode_steps - 1);
  return assoc;
}

void write_network_trace_header(std::ostream& out) {
  CsvWriter(out).write_row({"t", "av_id", "serving_bs", "tier", "sinr_dB", "rate_bps", "n_serving", "ho_count", "xi"});
}

void write_network_trace(std::ostream& out, const WorldState& world, double time_s) {
  CsvWriter w(out);
  for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
    const auto& a = world.assoc[i];
    std::string bs = "", tier = "none", sinr_db = "", n_serving = "0";
    if (a.serving_bs) {
      const auto& st = world.stations[static_cast<std::size_t>(*a.serving_bs)];
      bs = std::to_string(st.id);
      tier = st.tier == Tier::RF ? "RF" : "THz";
      sinr_db = format_double(a.serving_sinr > 0 ? linear_to_db(a.serving_sinr) : -300.0);
      n_serving = std::to_string(world.loads[static_cast<std::size_t>(st.id)]);
    }
    w.write_row({format_double(time_s), std::to_string(world.vehicles[i].id), bs, tier, sinr_db, format_double(a.serving_rate),
                 n_serving, std::to_string(a.ho_count), format_double(a.xi)});
  }
}

}  // namespace vqmorl::radio
