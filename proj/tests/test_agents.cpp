#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "genv2v/acceptance.hpp"
#include "genv2v/agents.hpp"
#include "genv2v/stats.hpp"

using namespace genv2v;
using namespace genv2v::agents;

namespace {

neural::Mlp constant_q(std::vector<double> q) {
  neural::Mlp net({1, static_cast<int>(q.size())});
  for (std::size_t i = 0; i < q.size(); ++i) net.layers()[0].bias(static_cast<long>(i)) = q[i];
  return net;
}

env::EnvConfig default_env(double payload = 20e3) {
  auto c = env::EnvConfig::defaults();
  c.content = content::with_payload(c.content, payload);
  return c;
}

env::Observation one_hot(int i, int n) {
  env::Observation o(static_cast<std::size_t>(n), 0.0);
  o[static_cast<std::size_t>(i)] = 1.0;
  return o;
}

}  // namespace

TEST_CASE("policy kind names") {
  for (auto k : {PolicyKind::ddqn, PolicyKind::dqn, PolicyKind::greedy, PolicyKind::random, PolicyKind::oracle}) {
    CHECK(parse_policy_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_policy_kind("sarsa"), std::invalid_argument);
  CHECK(parse_greedy_info("prev") == GreedyInfo::previous);
  CHECK(parse_greedy_info("frozen") == GreedyInfo::current);
}

TEST_CASE("epsilon-greedy selection") {
  Rng rng(1);
  const env::Observation x = {0.0};
  CHECK(select_action(constant_q({0.1, 0.9, 0.3}), x, 0.0, rng) == 1);
  CHECK(select_action(constant_q({0.5, 0.5}), x, 0.0, rng) == 0);
  CHECK(argmax(std::vector<double>{2.0, 7.0, 7.0}) == 1);

  const auto net = constant_q({0, 1, 2, 3, 4, 5, 6, 7});
  std::vector<std::int64_t> counts(8, 0);
  for (int i = 0; i < 100000; ++i) ++counts[static_cast<std::size_t>(select_action(net, x, 1.0, rng))];
  CHECK(stats::chi_square_uniform_pvalue(counts) > 0.01);
}

TEST_CASE("bootstrap targets") {
  const std::vector<double> r = {1.0};
  const std::vector<char> live = {0}, terminal = {1};
  neural::Matrix qo(3, 1), qt(3, 1);
  qo << 1, 3, 2;
  qt << 0.5, 0.2, 0.7;
  CHECK(ddqn_target(r, live, qo, qt, 0.9)[0] == doctest::Approx(1.18).epsilon(1e-12));
  CHECK(dqn_target(r, live, qt, 0.9)[0] == doctest::Approx(1.63).epsilon(1e-12));
  CHECK(ddqn_target(r, terminal, qo, qt, 0.9)[0] == 1.0);
  CHECK(dqn_target(r, terminal, qt, 0.9)[0] == 1.0);
  CHECK(dqn_target(r, live, qt, 0.0)[0] == 1.0);
  CHECK(ddqn_target(r, live, qo, qt, 0.0)[0] == 1.0);

  neural::Matrix flat(3, 1);
  flat << 0.4, 0.4, 0.4;
  CHECK(ddqn_target(r, live, qo, flat, 0.9)[0] == dqn_target(r, live, flat, 0.9)[0]);
}

TEST_CASE("decoupling property on random batches") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  constexpr int kBatch = 200;
  neural::Matrix qo(5, kBatch), qt(5, kBatch);
  for (int i = 0; i < qo.size(); ++i) {
    qo.data()[i] = n(rng);
    qt.data()[i] = n(rng);
  }
  std::vector<double> r(kBatch);
  for (auto& v : r) v = n(rng);
  const std::vector<char> live(kBatch, 0);
  const auto yd = ddqn_target(r, live, qo, qt, 0.9);
  const auto yq = dqn_target(r, live, qt, 0.9);
  for (int i = 0; i < kBatch; ++i) {
    int ao = 0, at = 0;
    qo.col(i).maxCoeff(&ao);
    qt.col(i).maxCoeff(&at);
    if (qt(ao, i) != qt(at, i)) {
      CHECK(yd[static_cast<std::size_t>(i)] != yq[static_cast<std::size_t>(i)]);
      CHECK(yd[static_cast<std::size_t>(i)] < yq[static_cast<std::size_t>(i)]);
    } else {
      CHECK(yd[static_cast<std::size_t>(i)] == yq[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("epsilon schedule") {
  EpsilonSchedule s{1.0, 0.05, 1000};
  CHECK(s.at(0) == 1.0);
  CHECK(s.at(1000) == 0.05);
  CHECK(s.at(5000) == 0.05);
  CHECK(s.at(500) == doctest::Approx(0.525));
  for (std::int64_t t = 1; t <= 1200; ++t) CHECK(s.at(t) <= s.at(t - 1));
}

TEST_CASE("train step losses and target sync") {
  DqnConfig cfg;
  cfg.hidden = {16};
  cfg.batch_size = 8;
  cfg.target_sync_interval = 5;
  DqnAgent agent(PolicyKind::ddqn, cfg, 3, 4, 1000, 1);
  CHECK_FALSE(agent.train_step().has_value());
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 64; ++i) {
    agent.remember({{n(rng), n(rng), n(rng)}, i % 4, n(rng), {n(rng), n(rng), n(rng)}, i % 7 == 0});
  }
  auto target = agent.target();
  for (int step = 1; step <= 23; ++step) {
    const auto loss = agent.train_step();
    REQUIRE(loss.has_value());
    CHECK(std::isfinite(*loss));
    CHECK(*loss >= 0.0);
    if (step % 5 == 0) {
      CHECK(agent.target() == agent.online());
      target = agent.target();
    } else {
      CHECK(agent.target() == target);
    }
  }
  CHECK(agent.train_steps() == 23);
}

TEST_CASE("zero discount converges to the mean reward per state-action") {
  DqnConfig cfg;
  cfg.hidden = {16};
  cfg.gamma = 0.0;
  cfg.batch_size = 16;
  cfg.reward_scale = 1.0;
  cfg.adam.learning_rate = 1e-3;
  DqnAgent agent(PolicyKind::ddqn, cfg, 2, 2, 1, 3);
  // (s, a) -> rewards; residuals stay inside the quadratic part of the loss.
  const double rewards[2][2][4] = {{{0.2, 0.6, 0.4, 0.4}, {-0.5, -0.3, -0.4, -0.4}},
                                   {{1.0, 1.4, 1.2, 1.2}, {0.0, 0.1, 0.05, 0.05}}};
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (double r : rewards[s][a]) agent.remember({one_hot(s, 2), a, r, one_hot(1 - s, 2), false});
  for (int i = 0; i < 5000; ++i) agent.train_step();
  const double mean[2][2] = {{0.4, -0.4}, {1.2, 0.05}};
  for (int s = 0; s < 2; ++s) {
    const auto q = agent.online().forward(one_hot(s, 2));
    for (int a = 0; a < 2; ++a) CHECK(std::abs(q(a) - mean[s][a]) < 1e-2);
  }
}

TEST_CASE("learning agent acts validly and trains on schedule") {
  env::Environment env(default_env());
  DqnConfig cfg;
  cfg.learning_starts = 300;
  cfg.train_interval = 4;
  DqnAgent agent(PolicyKind::dqn, cfg, static_cast<int>(env.observation_dim()), 64, 10000, 5);
  auto obs = env.reset(0);
  while (!env.done()) {
    const auto a = agent.act(env, obs);
    for (int id : a) CHECK(env.actions().valid(id));
    auto r = env.step(a);
    agent.observe(obs, a, r.reward, r.observations, r.done);
    obs = r.observations;
  }
  CHECK(agent.replay_size() == 300);
  CHECK(agent.slots_seen() == 100);
  // the 300th transition arrives on slot 100, a multiple of the interval
  CHECK(agent.train_steps() == 1);
  for (int e = 1; e < 4; ++e) {
    obs = env.reset(static_cast<std::uint64_t>(e));
    while (!env.done()) {
      const auto a = agent.act(env, obs);
      auto r = env.step(a);
      agent.observe(obs, a, r.reward, r.observations, r.done);
      obs = r.observations;
    }
  }
  // slots 100, 104, ..., 400
  CHECK(agent.train_steps() == 76);
  CHECK(agent.epsilon() < 1.0);
}

TEST_CASE("greedy uses full power whenever its best prediction succeeds") {
  env::Environment env(default_env());
  GreedyPolicy greedy;
  const int top = env.actions().num_power_levels - 1;
  for (std::uint64_t e = 0; e < 3; ++e) {
    auto obs = env.reset(e);
    while (!env.done()) {
      const auto acts = greedy.act(env, obs);
      const auto& prev = env.previous_channel();
      for (std::size_t k = 0; k < acts.size(); ++k) {
        const auto a = env.actions().decode(acts[k]);
        const double p = env.config().power_levels_w[static_cast<std::size_t>(a.power)];
        const double snr = p * prev.gain(k, k, static_cast<std::size_t>(a.subchannel)) / env.config().channel.noise_power_w;
        const int d = env.config().diffusion_levels[static_cast<std::size_t>(a.diffusion)];
        const bool ok = qoe::success_indicator(channel::rate_bps(snr, 1e6), env.payload_bits(),
                                               content::generation_time(d, env.config().content), 50e-3,
                                               env.coherence_time(k));
        if (ok) CHECK(a.power == top);
      }
      obs = env.step(acts).observations;
    }
  }
}

TEST_CASE("greedy ignores the outage cap") {
  env::Environment env(default_env());
  GreedyPolicy greedy;
  double worst = 0.0;
  auto obs = env.reset(0);
  while (!env.done()) obs = env.step(greedy.act(env, obs)).observations;
  for (std::size_t k = 0; k < 3; ++k) worst = std::max(worst, env.outage_tracker().outage(k));
  CHECK(worst > env.config().qoe.outage_cap);
}

TEST_CASE("random policy") {
  env::Environment env(default_env());
  const auto obs = env.reset(0);
  RandomPolicy a(9), b(9);
  std::vector<std::int64_t> counts(64, 0);
  for (int i = 0; i < 40000; ++i) {
    const auto x = a.act(env, obs);
    CHECK(x == b.act(env, obs));
    for (int id : x) {
      REQUIRE(env.actions().valid(id));
      ++counts[static_cast<std::size_t>(id)];
    }
  }
  CHECK(stats::chi_square_uniform_pvalue(counts) > 0.01);
}

TEST_CASE("oracle search") {
  auto c = default_env();
  c.channel.num_subchannels = 1;
  c.power_levels_w = {c.power_levels_w.back()};
  c.diffusion_levels = {5};
  c.geometry.tx_rx_distance_m = {150.0};
  c.geometry.cross_distance_m = {{0.0}};
  c.geometry.speed_mps = {2.0};
  env::Environment single(c);
  single.reset(0);
  CHECK(oracle_search(single) == std::vector<int>{0});

  auto two = default_env();
  two.channel.num_subchannels = 2;
  two.channel.shadowing_sigma_db = 0.0;
  two.unit_fading = true;
  two.geometry.tx_rx_distance_m = {200.0, 200.0};
  two.geometry.cross_distance_m = {{0.0, 250.0}, {250.0, 0.0}};
  two.geometry.speed_mps = {2.0, 2.0};
  env::Environment sym(two);
  sym.reset(0);
  const auto best = oracle_search(sym);
  CHECK(sym.actions().decode(best[0]).subchannel != sym.actions().decode(best[1]).subchannel);

  env::Environment big(default_env());
  big.reset(0);
  CHECK_THROWS_AS(oracle_search(big), std::length_error);
}

TEST_CASE("oracle dominance and greedy equivalence") {
  const auto r = acceptance::check_oracle_equivalence(10);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("vanilla targets overestimate a zero-value stub more than double targets") {
  const auto r = acceptance::check_target_decoupling(10);
  INFO(r.detail);
  CHECK(r.passed);
}
