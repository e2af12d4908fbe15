#include <algorithm>
#include <cmath>

#include "common/rng.hpp"
#include "doctest.h"
#include "env/world_state.hpp"
#include "radio/radio.hpp"

using namespace vqmorl;
using namespace vqmorl::radio;

namespace {

BaseStation station(int id, Tier tier, double x, const RadioConfig& cfg) {
  auto all = make_base_stations(cfg, 1000.0);
  BaseStation bs = *std::find_if(all.begin(), all.end(), [&](const BaseStation& b) { return b.tier == tier; });
  bs.id = id;
  bs.x = x;
  return bs;
}

WorldState world_at(double av_x, std::vector<BaseStation> stations) {
  WorldState w;
  traffic::VehicleState ego;
  ego.is_ego = true;
  ego.x = av_x;
  ego.lane = 1;
  w.vehicles = {ego};
  w.stations = std::move(stations);
  w.seed = 5;
  return w;
}

BaseStation simple(int id, int quota, double mu) {
  BaseStation b;
  b.id = id;
  b.quota = quota;
  b.ho_penalty = mu;
  return b;
}

}  // namespace

TEST_CASE("base station layout") {
  RadioConfig cfg;
  auto bs = make_base_stations(cfg, 1000.0);
  REQUIRE(bs.size() == 12);
  CHECK(bs[0].tier == Tier::RF);
  CHECK(bs[0].x == 250.0);
  CHECK(bs[1].x == 750.0);
  CHECK(bs[2].tier == Tier::THz);
  CHECK(bs[2].x == 50.0);
  CHECK(bs[11].x == 950.0);
  for (std::size_t i = 0; i < bs.size(); ++i) CHECK(bs[i].id == static_cast<int>(i));
}

TEST_CASE("data rate") {
  CHECK(data_rate(1e6, 1.0) == 1e6);
  CHECK(data_rate(1e6, 0.0) == 0.0);
  CHECK(data_rate(2e9, 3.0) == 4e9);
}

TEST_CASE("RF SINR falls with distance") {
  RadioConfig cfg;
  double prev = INFINITY;
  for (double d = 10; d <= 490; d += 10) {
    auto w = world_at(d, {station(0, Tier::RF, 0.0, cfg)});
    double s = rf_sinr(w.vehicles[0], w.stations[0], w);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("two equidistant RF stations") {
  RadioConfig cfg;
  auto single = world_at(500, {station(0, Tier::RF, 400, cfg)});
  double snr = rf_sinr(single.vehicles[0], single.stations[0], single);
  auto pair = world_at(500, {station(0, Tier::RF, 400, cfg), station(1, Tier::RF, 600, cfg)});
  double s = rf_sinr(pair.vehicles[0], pair.stations[0], pair);
  // P/(N + P) with P = snr N
  CHECK(s == doctest::Approx(snr / (1 + snr)).epsilon(1e-12));
  CHECK(s < 1.0);
}

TEST_CASE("vanishing transmit power") {
  RadioConfig cfg;
  auto bs = station(0, Tier::RF, 100, cfg);
  bs.tx_power_dbm = -300;
  auto w = world_at(120, {bs});
  double s = rf_sinr(w.vehicles[0], bs, w);
  CHECK(s < 1e-20);
  CHECK(data_rate(bs.bandwidth, s) < 1e-10);
}

TEST_CASE("THz beam alignment and absorption") {
  RadioConfig cfg;
  std::vector<BaseStation> tbs;
  for (int i = 0; i < 5; ++i) tbs.push_back(station(i, Tier::THz, 50.0 + 20 * i, cfg));
  auto w = world_at(60, tbs);
  const auto& av = w.vehicles[0];

  w.radio.thz_alignment_prob = 0.0;
  double s0 = thz_sinr(av, w.stations[0], w);
  w.radio.thz_alignment_prob = 1.0;
  double s1 = thz_sinr(av, w.stations[0], w);
  CHECK(s1 <= s0);

  // q = 0: interference is all side lobe
  w.radio.thz_alignment_prob = 0.0;
  w.radio.thz_side_lobe_gain_dbi = -200.0;
  auto alone = world_at(60, {tbs[0]});
  CHECK(thz_sinr(av, w.stations[0], w) == doctest::Approx(thz_sinr(alone.vehicles[0], tbs[0], alone)).epsilon(1e-9));

  // absorption enters as exp(-k d) on the serving link
  alone.radio.thz_absorption_per_m = 0.0;
  double free = thz_sinr(alone.vehicles[0], tbs[0], alone);
  alone.radio.thz_absorption_per_m = 0.05;
  double absorbed = thz_sinr(alone.vehicles[0], tbs[0], alone);
  double d = link_distance(alone.vehicles[0], tbs[0], alone);
  CHECK(absorbed / free == doctest::Approx(std::exp(-0.05 * d)).epsilon(1e-12));
}

TEST_CASE("candidate selection") {
  SUBCASE("nothing above threshold") {
    std::vector<LinkBudget> links{{0.5, 1e6}, {0.9, 2e6}};
    CHECK(select_candidates(links, 1.0).empty());
  }
  SUBCASE("two qualify") {
    std::vector<LinkBudget> links{{2.0, 1e6}, {0.5, 9e6}, {3.0, 2e6}};
    auto c = select_candidates(links, 1.0);
    REQUIRE(c.size() == 2);
    CHECK(c[0].bs_id == 2);
    CHECK(c[1].bs_id == 0);
  }
  SUBCASE("top three against a full sort") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<LinkBudget> links(12);
      for (auto& l : links) {
        l.sinr = rng.uniform(0.0, 4.0);
        l.rate = std::floor(rng.uniform(0.0, 5.0)) * 1e6;  // plenty of ties
      }
      std::vector<int> ids;
      for (int i = 0; i < 12; ++i)
        if (links[i].sinr >= 1.0) ids.push_back(i);
      std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return links[a].rate > links[b].rate; });
      ids.resize(std::min<std::size_t>(ids.size(), 3));
      auto c = select_candidates(links, 1.0);
      REQUIRE(c.size() == ids.size());
      for (std::size_t k = 0; k < ids.size(); ++k) CHECK(c[k].bs_id == ids[k]);
    }
  }
}

TEST_CASE("load counts") {
  std::vector<AssocState> a(4);
  a[0].candidates = {{1, 5, 2}, {2, 4, 2}};
  a[1].candidates = {{1, 5, 2}};
  a[2].candidates = {{1, 5, 2}, {3, 1, 2}, {2, 1, 2}};
  a[3].candidates = {{1, 5, 2}};
  auto n = load_counts(a, 5);
  CHECK(n == std::vector<int>{0, 4, 2, 1, 0});
  int listed = 0;
  for (const auto& s : a) listed += static_cast<int>(s.candidates.size());
  int total = 0;
  for (int x : n) total += x;
  CHECK(total == listed);
}

TEST_CASE("weighted rate") {
  CHECK(weighted_rate(100e6, 5, 10, 0.1) == 18e6);
  CHECK(weighted_rate(60e6, 8, 3, 0.0) == 20e6);
  CHECK(weighted_rate(60e6, 8, 0, 0.25) == 45e6);
}

TEST_CASE("tele-action examples") {
  std::vector<BaseStation> st{simple(0, 1, 0.3), simple(1, 1, 0.3), simple(2, 4, 0.3)};
  std::vector<int> loads{1, 1, 0};
  NetworkSnapshot net{st, loads, 1.0};

  SUBCASE("single candidate") {
    AssocState a;
    a.candidates = {{2, 5e6, 3.0}};
    for (auto act : {TeleAction::MaxWeightedRate, TeleAction::VacantWeightedRate, TeleAction::MaxRate})
      CHECK(resolve_tele_action(act, a, net) == 2);
  }
  SUBCASE("handoff penalty keeps the incumbent") {
    AssocState a;
    a.serving_bs = 0;
    a.candidates = {{1, 100e6, 5.0}, {0, 80e6, 4.0}};
    CHECK(resolve_tele_action(TeleAction::MaxWeightedRate, a, net) == 0);
    CHECK(resolve_tele_action(TeleAction::MaxRate, a, net) == 1);
  }
  SUBCASE("vacancy filter") {
    std::vector<int> full{3, 1, 0};
    NetworkSnapshot n2{st, full, 1.0};
    AssocState a;
    a.candidates = {{0, 50e6, 5.0}, {1, 50e6, 5.0}};
    CHECK(resolve_tele_action(TeleAction::VacantWeightedRate, a, n2) == 1);
  }
  SUBCASE("all full falls back to best weighted rate") {
    std::vector<int> full{3, 2, 0};
    NetworkSnapshot n2{st, full, 1.0};
    AssocState a;
    a.candidates = {{0, 50e6, 5.0}, {1, 50e6, 5.0}};
    CHECK(resolve_tele_action(TeleAction::VacantWeightedRate, a, n2) == 0);
  }
  SUBCASE("no candidates") {
    AssocState a;
    a.serving_bs = 1;
    a.serving_sinr = 2.0;
    CHECK(resolve_tele_action(TeleAction::MaxRate, a, net) == 1);
    a.serving_sinr = 0.5;
    CHECK_FALSE(resolve_tele_action(TeleAction::MaxRate, a, net));
    a.serving_bs.reset();
    CHECK_FALSE(resolve_tele_action(TeleAction::MaxWeightedRate, a, net));
  }
  CHECK_THROWS(tele_action_from_index(4));
}

TEST_CASE("handoff bookkeeping") {
  SUBCASE("staying put") {
    AssocState a;
    for (int i = 0; i < 10; ++i) a = update_handoff(a, 3);
    CHECK(a.ho_count == 0);
    CHECK(a.xi == 0.0);
  }
  SUBCASE("initial attach is not a handoff") {
    auto a = update_handoff(AssocState{}, 4);
    CHECK(a.ho_count == 0);
    CHECK(a.serving_bs == 4);
  }
  SUBCASE("three changes over eleven steps") {
    AssocState a;
    int seq[] = {0, 0, 1, 1, 1, 2, 2, 2, 2, 0, 0};
    for (int bs : seq) a = update_handoff(a, bs);
    CHECK(a.episode_steps == 11);
    CHECK(a.ho_count == 3);
    CHECK(a.xi == 0.3);
  }
  SUBCASE("dropping the link is not a handoff, reattaching elsewhere is not either") {
    AssocState a;
    a = update_handoff(a, 1);
    a = update_handoff(a, std::nullopt);
    a = update_handoff(a, 2);
    CHECK(a.ho_count == 0);
  }
}
