#include <cmath>
#include <sstream>

#include "doctest.h"
#include "learn/agent.hpp"
#include "quantum/vqc.hpp"
#include "support/bandit_env.hpp"

using namespace vqmorl;
using namespace vqmorl::learn;

namespace {

std::unique_ptr<QFunction> small_vqc(std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  return std::make_unique<VqcQ>(quantum::init_params(3, quantum::InitScheme::Uniform, scale, rng));
}

FeatureVector feat(double a, double b, double c, double d, double e) { return FeatureVector{{a, b, c, d, e}}; }

Transition tr(std::size_t a, double r, bool done = false) {
  return {feat(0.1, -0.2, 0.3, 0.4, -0.5), a, r, feat(-0.3, 0.2, 0.1, 0.0, 0.6), done};
}

}  // namespace

TEST_CASE("epsilon-greedy selection") {
  auto q = small_vqc(1);
  auto s = feat(0.2, 0.1, -0.4, 0.9, 0.0);
  Rng rng(2);
  auto best = greedy_action(q->q_values(s));
  for (int i = 0; i < 100; ++i) CHECK(select_action(*q, s, 0.0, rng) == best);

  QVector tie{};
  tie[3] = 1.0;
  tie[9] = 1.0;
  CHECK(greedy_action(tie) == 3);

  SUBCASE("uniform branch is 1/15 per action") {
    const int n = 15000;
    std::array<int, 15> counts{};
    for (int i = 0; i < n; ++i) ++counts[select_action(*q, s, 1.0, rng)];
    const double p = 1.0 / 15.0;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (int c : counts) CHECK(std::abs(c - n * p) < 3 * sigma);
  }
}

TEST_CASE("TD target") {
  auto online = small_vqc(3);
  auto target = small_vqc(4);
  CHECK(td_target(tr(2, 2.5, true), *target, *online, 0.9, false) == 2.5);
  CHECK(td_target(tr(2, 1.25, false), *target, *online, 0.0, false) == 1.25);

  // done ignores s'
  auto t1 = tr(1, 0.7, true), t2 = t1;
  t2.s_next = feat(0.9, 0.9, 0.9, 0.9, 0.9);
  CHECK(td_target(t1, *target, *online, 0.9, false) == td_target(t2, *target, *online, 0.9, false));

  // zero angles on the zero state: every Q is 1
  quantum::VqcParams zero(3);
  VqcQ flat(zero);
  Transition t3{feat(0, 0, 0, 0, 0), 0, 0.5, feat(0, 0, 0, 0, 0), false};
  CHECK(td_target(t3, flat, flat, 0.9, false) == doctest::Approx(1.4));

  // DDQN with identical networks equals DQN
  auto t4 = tr(5, 0.3);
  CHECK(td_target(t4, *online, *online, 0.9, true) == td_target(t4, *online, *online, 0.9, false));
}

TEST_CASE("loss") {
  quantum::VqcParams zero(3);
  VqcQ q(zero);  // Q = 1 everywhere on the zero state
  std::vector<Transition> b{{feat(0, 0, 0, 0, 0), 0, 0, {}, true}};
  CHECK(loss(q, b, std::vector<double>{1.0}) == 0.0);
  CHECK(loss(q, b, std::vector<double>{3.0}) == 4.0);
  b.push_back(b[0]);
  CHECK(loss(q, b, std::vector<double>{2.0, 4.0}) == 5.0);
  CHECK(loss(q, b, std::vector<double>{-7.0, 0.5}) >= 0.0);
}

TEST_CASE("gradient step") {
  std::vector<Transition> batch;
  Rng rng(8);
  for (int i = 0; i < 8; ++i)
    batch.push_back({feat(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)),
                     rng.index(15), 0.0, {}, true});
  std::vector<double> y;
  for (int i = 0; i < 8; ++i) y.push_back(rng.uniform(-1, 1));

  SUBCASE("lr 0 leaves parameters alone") {
    auto q = small_vqc(5);
    auto before = q->parameters();
    gradient_step(*q, batch, y, 0.0);
    CHECK(q->parameters() == before);
  }
  SUBCASE("zero loss leaves parameters alone") {
    auto q = small_vqc(5);
    std::vector<double> exact;
    for (const auto& t : batch) exact.push_back(q->q_values(t.s)[t.a]);
    auto before = q->parameters();
    auto st = gradient_step(*q, batch, exact, 0.1);
    CHECK(st.loss == 0.0);
    CHECK(q->parameters() == before);
  }
  SUBCASE("a small VQC step descends") {
    auto q = small_vqc(5);
    double l0 = loss(*q, batch, y);
    auto st = gradient_step(*q, batch, y, 1e-3);
    CHECK(st.loss == l0);
    CHECK(loss(*q, batch, y) < l0);
  }
  SUBCASE("a small neural step descends") {
    Rng init(6);
    NeuralQ q({64, 64}, init);
    double l0 = loss(q, batch, y);
    gradient_step(q, batch, y, 5e-4);
    CHECK(loss(q, batch, y) < l0);
  }
  SUBCASE("non-finite targets are refused") {
    auto q = small_vqc(5);
    y[0] = INFINITY;
    CHECK_THROWS_AS(gradient_step(*q, batch, y, 1e-3), TrainingError);
  }
}

TEST_CASE("neural gradient matches finite differences") {
  Rng init(12);
  NeuralQ q({16, 8}, init);
  auto s = feat(0.3, -0.7, 0.2, 0.5, -0.1);
  std::vector<double> g(q.parameter_count());
  double v = q.gradient(s, 4, g);
  CHECK(v == q.q_values(s)[4]);
  auto p = q.parameters();
  const double h = 1e-6;
  for (std::size_t k = 0; k < p.size(); k += 7) {
    auto plus = p, minus = p;
    plus[k] += h;
    minus[k] -= h;
    q.set_parameters(plus);
    double fp = q.q_values(s)[4];
    q.set_parameters(minus);
    double fm = q.q_values(s)[4];
    CHECK(std::abs((fp - fm) / (2 * h) - g[k]) < 1e-6);
  }
}

TEST_CASE("target sync") {
  auto online = small_vqc(1);
  auto target = online->clone();
  auto init = online->parameters();
  auto s = feat(0.4, 0.4, -0.4, 0.1, 0.0);
  CHECK(target->parameters() == init);

  std::vector<double> p = online->parameters();
  p[0] += 0.3;
  online->set_parameters(p);
  sync_target(*online, *target);
  CHECK(target->q_values(s) == online->q_values(s));

  p[1] -= 0.5;
  online->set_parameters(p);
  CHECK(target->q_values(s) != online->q_values(s));

  Rng r(1);
  NeuralQ net({8}, r);
  CHECK_THROWS(sync_target(*online, net));
}

TEST_CASE("replay memory") {
  ReplayMemory m(3);
  for (std::size_t i = 0; i < 5; ++i) m.push(tr(i, static_cast<double>(i)));
  CHECK(m.size() == 3);
  CHECK(m.at(0).r == 2.0);
  CHECK(m.at(1).r == 3.0);
  CHECK(m.at(2).r == 4.0);
  Rng rng(4);
  auto s = m.sample(10, rng);
  CHECK(s.size() == 10);
  for (const auto& t : s) CHECK(t.r >= 2.0);
  CHECK_THROWS(ReplayMemory(0));
  CHECK_THROWS(ReplayMemory(2).sample(1, rng));
}

TEST_CASE("training loop") {
  testing::ContextualBandit env;
  AgentConfig cfg;
  cfg.gamma = 0.0;
  cfg.batch_size = 4;
  cfg.warmup = 10;

  SUBCASE("no episodes") {
    auto q = small_vqc(1);
    RunOptions o;
    CHECK(train(env, *q, cfg, o).empty());
  }
  SUBCASE("warm-up blocks updates") {
    auto q = small_vqc(1);
    auto before = q->parameters();
    RunOptions o;
    o.episodes = 9;
    auto log = train(env, *q, cfg, o);
    CHECK(log.size() == 9);
    CHECK(q->parameters() == before);
    o.episodes = 10;
    train(env, *q, cfg, o);
    CHECK(q->parameters() != before);
  }
  SUBCASE("epsilon schedule") {
    auto q = small_vqc(1);
    cfg.epsilon_decay = 0.5;
    cfg.epsilon_min = 0.1;
    RunOptions o;
    o.episodes = 6;
    auto log = train(env, *q, cfg, o);
    CHECK(log[0].epsilon == 1.0);
    CHECK(log[1].epsilon == 0.5);
    CHECK(log[3].epsilon == 0.125);
    CHECK(log[4].epsilon == 0.1);
    CHECK(log[5].epsilon == 0.1);
  }
  SUBCASE("same seed, same log") {
    auto q1 = small_vqc(1), q2 = small_vqc(1);
    RunOptions o;
    o.episodes = 30;
    o.seed = 12;
    CHECK(train(env, *q1, cfg, o) == train(env, *q2, cfg, o));
    CHECK(q1->parameters() == q2->parameters());
  }
  SUBCASE("evaluation leaves the model untouched") {
    auto q = small_vqc(1);
    auto before = q->parameters();
    RunOptions o;
    o.episodes = 5;
    auto log = evaluate(env, *q, o);
    CHECK(log.size() == 5);
    for (const auto& r : log) CHECK(r.epsilon == 0.0);
    CHECK(q->parameters() == before);
  }
}

TEST_CASE("metrics csv round trip") {
  MetricsLog log{{0, 60, 1.5, 2.25, 3.75, 0, 4, 1.0, 0.0}, {1, 12, -4.0, 0.1, -3.9, 1, 2, 0.98, 0.0}};
  std::ostringstream out;
  write_metrics_csv(out, log);
  CHECK(out.str().rfind("episode,steps,sum_r_tran,sum_r_tele,sum_total,collided,ho_count,epsilon,wallclock_ms\n", 0) == 0);
  CHECK(read_metrics_csv(out.str()) == log);
}

TEST_CASE("checkpoints") {
  auto q = small_vqc(2);
  auto back = load_checkpoint(q->to_checkpoint());
  CHECK(back->architecture() == "vqc:5q3l");
  CHECK(back->parameters() == q->parameters());

  Rng rng(3);
  NeuralQ n({64, 64}, rng);
  auto nb = load_checkpoint(n.to_checkpoint());
  CHECK(nb->architecture() == "neural:5-64-64-15");
  CHECK(nb->parameters() == n.parameters());
  CHECK_THROWS(load_checkpoint("{}"));
}
