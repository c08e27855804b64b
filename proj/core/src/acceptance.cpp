#include "genv2v/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <regex>
#include <sstream>

#include "genv2v/channel.hpp"
#include "genv2v/neural.hpp"
#include "genv2v/stats.hpp"

namespace genv2v::acceptance {

namespace fs = std::filesystem;
using agents::PolicyKind;

namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Last ceil(n / 10) entries.
std::span<const harness::MetricsRow> final_tenth(const std::vector<harness::MetricsRow>& rows) {
  const std::size_t n = (rows.size() + 9) / 10;
  return std::span(rows).last(n);
}

double final_smoothed_mean(const std::vector<harness::MetricsRow>& rows) {
  std::vector<double> v;
  for (const auto& r : final_tenth(rows)) v.push_back(r.smoothed_reward);
  return stats::mean(v);
}

double final_smoothed_std(const std::vector<harness::MetricsRow>& rows) {
  std::vector<double> v;
  for (const auto& r : final_tenth(rows)) v.push_back(r.smoothed_reward);
  return stats::stddev(v);
}

std::vector<harness::SweepPoint> points_for(std::span<const harness::SweepPoint> all, PolicyKind kind) {
  std::vector<harness::SweepPoint> out;
  for (const auto& p : all) {
    if (p.kind == kind) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.payload_bits < b.payload_bits; });
  return out;
}

env::EnvConfig snapshot_config(std::size_t links, int subchannels) {
  const config::ExperimentConfig experiment;
  auto cfg = experiment.env_for(experiment.payload_bits, 1);
  cfg.channel.num_subchannels = subchannels;
  auto& g = cfg.geometry;
  g.tx_rx_distance_m.resize(links);
  g.speed_mps.resize(links);
  g.cross_distance_m.resize(links);
  for (auto& row : g.cross_distance_m) row.resize(links);
  cfg.penalty_weight = 0.0;
  cfg.frozen_channel = true;
  return cfg;
}

}  // namespace

std::string format_line(const CheckResult& r) {
  return std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.criterion) + "] " + r.name + ": " +
         r.detail;
}

bool all_passed(std::span<const CheckResult> results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

CheckResult check_reward_ordering(const TrainingSet& runs) {
  CheckResult res{1, "reward ordering", false, ""};
  for (auto kind : {PolicyKind::ddqn, PolicyKind::dqn, PolicyKind::greedy, PolicyKind::random}) {
    const auto it = runs.find(kind);
    if (it == runs.end() || it->second.empty()) {
      res.detail = "no training runs for " + std::string(agents::to_string(kind));
      return res;
    }
  }
  std::map<PolicyKind, double> med;
  for (const auto& [kind, seeds] : runs) {
    std::vector<double> finals;
    for (const auto& rows : seeds) {
      if (rows.empty()) {
        res.detail = "empty run for " + std::string(agents::to_string(kind));
        return res;
      }
      finals.push_back(final_smoothed_mean(rows));
    }
    med[kind] = stats::median(finals);
  }
  const auto& ddqn = runs.at(PolicyKind::ddqn);
  const auto& dqn = runs.at(PolicyKind::dqn);
  const std::size_t paired = std::min(ddqn.size(), dqn.size());
  std::size_t calmer = 0;
  for (std::size_t i = 0; i < paired; ++i) {
    if (final_smoothed_std(ddqn[i]) <= final_smoothed_std(dqn[i])) ++calmer;
  }
  const auto needed = static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(paired)));
  const double d = med[PolicyKind::ddqn], q = med[PolicyKind::dqn], g = med[PolicyKind::greedy],
               r = med[PolicyKind::random];
  const bool order = d > g && g > r;
  const bool beats_dqn = d >= q;
  const bool seeds_ok = ddqn.size() >= 5 && dqn.size() >= 5;
  res.passed = order && beats_dqn && calmer >= needed && seeds_ok;
  res.detail = fmt(
      "median final-10%% smoothed reward ddqn=%.4g dqn=%.4g greedy=%.4g random=%.4g; ddqn>greedy>random %s; "
      "ddqn>=dqn %s; ddqn std<=dqn std in %zu/%zu seeds (need %zu)%s",
      d, q, g, r, order ? "yes" : "no", beats_dqn ? "yes" : "no", calmer, paired, needed,
      seeds_ok ? "" : "; fewer than 5 seeds");
  return res;
}

CheckResult check_qoe_trend(std::span<const harness::SweepRecord> records) {
  CheckResult res{2, "qoe trend", false, ""};
  const auto points = harness::aggregate(records);
  const auto ddqn = points_for(points, PolicyKind::ddqn);
  const auto greedy = points_for(points, PolicyKind::greedy);
  const auto random = points_for(points, PolicyKind::random);
  if (ddqn.size() < 3 || greedy.size() != ddqn.size() || random.size() != ddqn.size()) {
    res.detail = "sweep needs ddqn, greedy and random at the same >= 3 payloads";
    return res;
  }
  std::vector<double> x, y;
  bool dominates = true;
  std::string series;
  for (std::size_t i = 0; i < ddqn.size(); ++i) {
    x.push_back(ddqn[i].payload_bits);
    y.push_back(ddqn[i].qoe_mean);
    if (greedy[i].payload_bits != ddqn[i].payload_bits || random[i].payload_bits != ddqn[i].payload_bits) {
      res.detail = "payload grids differ between agents";
      return res;
    }
    if (!(ddqn[i].qoe_mean > greedy[i].qoe_mean && ddqn[i].qoe_mean > random[i].qoe_mean)) dominates = false;
    series += fmt("%s%g:%.4g/%.4g/%.4g", i ? " " : "", ddqn[i].payload_bits, ddqn[i].qoe_mean, greedy[i].qoe_mean,
                  random[i].qoe_mean);
  }
  const double rho = stats::spearman(x, y);
  res.passed = rho > 0.8 && dominates;
  res.detail = fmt("ddqn spearman rho=%.3f (need > 0.8); strict dominance %s; payload:ddqn/greedy/random qoe ",
                   rho, dominates ? "yes" : "no") +
               series;
  return res;
}

CheckResult check_successful_data(std::span<const harness::SweepRecord> records) {
  CheckResult res{3, "successful data", false, ""};
  bool baselines_seen = false;
  bool zeros = true;
  std::size_t nonzero = 0;
  for (const auto& r : records) {
    if (r.kind != PolicyKind::greedy && r.kind != PolicyKind::random) continue;
    baselines_seen = true;
    if (r.successful_data != 0.0) {
      zeros = false;
      ++nonzero;
    }
  }
  const auto ddqn = points_for(harness::aggregate(records), PolicyKind::ddqn);
  if (!baselines_seen || ddqn.size() < 3) {
    res.detail = "sweep needs greedy, random and >= 3 ddqn payloads";
    return res;
  }
  std::size_t best = 0;
  std::string series;
  for (std::size_t i = 0; i < ddqn.size(); ++i) {
    if (ddqn[i].data_mean > ddqn[best].data_mean) best = i;
    series += fmt("%s%g:%.4g", i ? " " : "", ddqn[i].payload_bits, ddqn[i].data_mean);
  }
  const bool interior = best > 0 && best + 1 < ddqn.size() && ddqn[best].data_mean > ddqn.front().data_mean &&
                        ddqn[best].data_mean > ddqn.back().data_mean;
  const bool spans = ddqn.front().payload_bits <= 5e3 && ddqn.back().payload_bits >= 80e3;
  res.passed = zeros && interior && spans;
  res.detail = fmt("greedy/random all zero %s (%zu nonzero records); ddqn peak interior %s; sweep spans 5-80 kbit %s; "
                   "ddqn bits ",
                   zeros ? "yes" : "no", nonzero, interior ? "yes" : "no", spans ? "yes" : "no") +
               series;
  return res;
}

CheckResult check_outage_oracle(std::uint64_t seed) {
  CheckResult res{4, "outage oracle", false, ""};
  channel::ChannelParams params;
  params.num_subchannels = 1;
  params.shadowing_sigma_db = 0.0;
  channel::LinkGeometry geom;
  geom.speed_mps = {0.0};
  geom.cross_distance_m = {{0.0}};
  const std::vector<double> shadowing = {0.0};
  auto rng = make_rng(seed, {stream::kFading});
  std::uniform_real_distribution<double> dist_m(50.0, 800.0), power_dbm(5.0, 23.0), window_s(1e-3, 10e-3),
      log_payload(std::log(1e3), std::log(2e5));
  constexpr int kDraws = 1'000'000;
  double worst = 0.0;
  int triples = 0;
  int attempts = 0;
  std::string series;
  while (triples < 10 && attempts < 10000) {
    ++attempts;
    geom.tx_rx_distance_m = {dist_m(rng)};
    const double p = channel::dbm_to_watt(power_dbm(rng));
    const double window = window_s(rng);
    const double payload = std::exp(log_payload(rng));
    const double g = channel::mean_gain(geom.tx_rx_distance_m[0], 0.0, params);
    const double analytic = channel::analytic_outage(p, g, params, payload, window);
    if (analytic < 0.02 || analytic > 0.98) continue;
    std::int64_t failures = 0;
    for (int i = 0; i < kDraws; ++i) {
      const auto real = channel::draw_realization(geom, params, shadowing, 0, rng);
      const double rate = channel::rate_bps(p * real.gain(0, 0, 0) / params.noise_power_w,
                                            params.subchannel_bandwidth_hz);
      if (rate * window < payload) ++failures;
    }
    const double empirical = static_cast<double>(failures) / kDraws;
    worst = std::max(worst, std::abs(empirical - analytic));
    series += fmt("%s%.4f/%.4f", triples ? " " : "", analytic, empirical);
    ++triples;
  }
  res.passed = triples == 10 && worst <= 1e-3;
  res.detail = fmt("%d triples x %d draws, max |empirical - analytic| = %.2e (tol 1e-3); analytic/empirical ",
                   triples, kDraws, worst) +
               series;
  return res;
}

CheckResult check_gradients(std::uint64_t seed) {
  CheckResult res{5, "gradient check", false, ""};
  const std::vector<int> dims = {12, 16, 8, 5};
  auto rng = make_rng(seed, {stream::kNetworkInit});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, dims.back() - 1);
  constexpr int kBatch = 8;
  constexpr double kRelStep = 1e-5;
  double worst = 0.0;
  std::size_t compared = 0;
  std::size_t zero_pairs = 0;

  for (int b = 0; b < 10; ++b) {
    auto net = neural::Mlp::init(dims, seed + static_cast<std::uint64_t>(b));
    neural::Matrix x(dims.front(), kBatch);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    std::vector<int> chosen(kBatch);
    std::vector<double> target(kBatch);
    for (int i = 0; i < kBatch; ++i) {
      chosen[static_cast<std::size_t>(i)] = pick(rng);
      target[static_cast<std::size_t>(i)] = 2.0 * normal(rng);
    }
    auto loss_of = [&](const neural::Mlp& m, Eigen::VectorXd* grad_out) {
      const auto q = m.forward_batch(x);
      std::vector<double> pred(kBatch);
      for (int i = 0; i < kBatch; ++i) pred[static_cast<std::size_t>(i)] = q(chosen[static_cast<std::size_t>(i)], i);
      auto h = neural::huber_loss(pred, target);
      if (grad_out) *grad_out = h.gradient;
      return h.loss;
    };
    Eigen::VectorXd dl;
    loss_of(net, &dl);
    neural::Matrix d_out = neural::Matrix::Zero(dims.back(), kBatch);
    for (int i = 0; i < kBatch; ++i) d_out(chosen[static_cast<std::size_t>(i)], i) = dl(i) / kBatch;
    const auto grads = net.backward(x, d_out);
    std::vector<double> analytic;
    for (const auto& layer : grads.layers) {
      for (int r = 0; r < layer.weight.rows(); ++r) {
        for (int c = 0; c < layer.weight.cols(); ++c) analytic.push_back(layer.weight(r, c));
      }
      for (int r = 0; r < layer.bias.size(); ++r) analytic.push_back(layer.bias(r));
    }

    const auto theta = net.flatten();
    auto probe = net;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto t = theta;
      const double h = kRelStep * std::max(1.0, std::abs(theta[i]));
      t[i] = theta[i] + h;
      probe.assign(t);
      const double up = loss_of(probe, nullptr);
      t[i] = theta[i] - h;
      probe.assign(t);
      const double down = loss_of(probe, nullptr);
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max(std::abs(numeric), std::abs(analytic[i]));
      if (scale == 0.0) {
        ++zero_pairs;
        continue;
      }
      worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
      ++compared;
    }
  }
  res.passed = worst < 1e-4;
  res.detail = fmt("10 batches, %zu parameter gradients compared (%zu exactly zero in both), max relative error %.2e "
                   "(tol 1e-4)",
                   compared, zero_pairs, worst);
  return res;
}

CheckResult check_target_decoupling(int seeds) {
  CheckResult res{6, "target decoupling", false, ""};
  const std::vector<double> r = {1.0};
  const std::vector<char> terminal = {0};
  neural::Matrix online(3, 1), target(3, 1);
  online << 1, 3, 2;
  target << 0.5, 0.2, 0.7;
  const double y_ddqn = agents::ddqn_target(r, terminal, online, target, 0.9)[0];
  const double y_dqn = agents::dqn_target(r, terminal, target, 0.9)[0];
  const bool pinned = std::abs(y_ddqn - 1.18) <= 1e-12 && std::abs(y_dqn - 1.63) <= 1e-12;

  // Four one-hot states, every reward pure N(0, 1) noise: every true Q is 0.
  constexpr int kStates = 4;
  constexpr int kActions = 10;
  agents::DqnConfig cfg;
  cfg.hidden = {32};
  cfg.gamma = 0.9;
  cfg.batch_size = 32;
  cfg.target_sync_interval = 100;
  cfg.replay_capacity = 20000;
  cfg.reward_scale = 1.0;
  cfg.learning_starts = 0;
  cfg.adam.learning_rate = 1e-3;
  std::vector<double> gaps;
  double dqn_sum = 0.0, ddqn_sum = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s + 1);
    agents::DqnAgent dqn(PolicyKind::dqn, cfg, kStates, kActions, 1, seed);
    agents::DqnAgent ddqn(PolicyKind::ddqn, cfg, kStates, kActions, 1, seed);
    auto rng = make_rng(seed, {stream::kPolicy});
    std::uniform_int_distribution<int> state(0, kStates - 1), action(0, kActions - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto one_hot = [](int i) {
      env::Observation o(kStates, 0.0);
      o[static_cast<std::size_t>(i)] = 1.0;
      return o;
    };
    for (int i = 0; i < 10000; ++i) {
      env::Transition t{one_hot(state(rng)), action(rng), noise(rng), one_hot(state(rng)), false};
      dqn.remember(t);
      ddqn.remember(std::move(t));
    }
    for (int i = 0; i < 3000; ++i) {
      dqn.train_step();
      ddqn.train_step();
    }
    double q_dqn = 0.0, q_ddqn = 0.0;
    for (int i = 0; i < kStates; ++i) {
      q_dqn += dqn.max_q(one_hot(i)) / kStates;
      q_ddqn += ddqn.max_q(one_hot(i)) / kStates;
    }
    gaps.push_back(q_dqn - q_ddqn);
    dqn_sum += q_dqn;
    ddqn_sum += q_ddqn;
  }
  const double p = stats::t_test_greater_pvalue(gaps);
  const bool witness = seeds >= 10 && p < 0.05;
  res.passed = pinned && witness;
  res.detail = fmt("ddqn_target=%.17g dqn_target=%.17g; over %d seeds mean max-Q dqn=%.4f ddqn=%.4f (true 0), "
                   "one-sided paired t p=%.2e (need < 0.05)",
                   y_ddqn, y_dqn, seeds, dqn_sum / seeds, ddqn_sum / seeds, p);
  return res;
}

CheckResult check_oracle_equivalence(int snapshots) {
  CheckResult res{7, "oracle equivalence", false, ""};
  const auto two = snapshot_config(2, 2);
  env::Environment env2(two);
  agents::GreedyPolicy greedy_prev(agents::GreedyInfo::previous);
  agents::GreedyPolicy greedy_now(agents::GreedyInfo::current);
  agents::RandomPolicy random(7);
  agents::DqnAgent ddqn(PolicyKind::ddqn, agents::DqnConfig{}, static_cast<int>(env2.observation_dim()),
                        env2.actions().per_link_size(), 1, 7);
  ddqn.set_training(false);
  int violations = 0;
  int compared = 0;
  int oracle_positive = 0;
  double mean_gap = 0.0;
  for (int s = 0; s < snapshots; ++s) {
    const auto obs = env2.reset(static_cast<std::uint64_t>(s));
    const double best = env2.preview(agents::oracle_search(env2)).reward;
    if (best > 0) ++oracle_positive;
    std::vector<double> others = {env2.preview(greedy_prev.act(env2, obs)).reward,
                                  env2.preview(greedy_now.act(env2, obs)).reward,
                                  env2.preview(ddqn.act(env2, obs)).reward};
    for (int i = 0; i < 50; ++i) others.push_back(env2.preview(random.act(env2, obs)).reward);
    for (double o : others) {
      ++compared;
      if (o > best) ++violations;
      mean_gap += best - o;
    }
  }
  mean_gap /= std::max(compared, 1);

  auto one = snapshot_config(1, 4);
  env::Environment env1(one);
  int mismatches = 0;
  for (int s = 0; s < snapshots; ++s) {
    const auto obs = env1.reset(static_cast<std::uint64_t>(s));
    const double best = env1.preview(agents::oracle_search(env1)).reward;
    const double g = env1.preview(greedy_now.act(env1, obs)).reward;
    if (g != best) ++mismatches;
  }
  res.passed = violations == 0 && mismatches == 0 && snapshots > 0 && oracle_positive > 0;
  res.detail = fmt("K=2 C=2: %d policy rewards above the oracle out of %d (mean oracle margin %.4f, oracle reward "
                   "positive on %d of %d snapshots); K=1: greedy reward differs from oracle on %d of %d snapshots",
                   violations, compared, mean_gap, oracle_positive, snapshots, mismatches, snapshots);
  return res;
}

CheckResult check_determinism(const config::ExperimentConfig& cfg, PolicyKind kind, std::uint64_t seed,
                              const std::string& reference_csv) {
  CheckResult res{8, "determinism", false, ""};
  const auto hash = config::config_hash(cfg);
  const harness::RunHeader header{std::string(agents::to_string(kind)), seed, cfg.payload_bits, hash};
  auto render = [&] { return harness::metrics_csv(harness::train(cfg, kind, seed, cfg.payload_bits).rows, header); };
  const std::string first = reference_csv.empty() ? render() : reference_csv;
  const std::string second = render();
  res.passed = first == second && !first.empty();
  res.detail = fmt("%s seed %llu, %d episodes: re-run CSV %s (%zu bytes)", std::string(agents::to_string(kind)).c_str(),
                   static_cast<unsigned long long>(seed), cfg.episodes, first == second ? "byte-identical" : "differs",
                   second.size());
  return res;
}

TrainingSet load_training_set(const fs::path& dir) {
  static const std::regex pattern(R"(train_([a-z]+)_seed([0-9]+)\.csv)");
  std::map<PolicyKind, std::map<std::uint64_t, fs::path>> found;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::smatch m;
      const auto name = entry.path().filename().string();
      if (!std::regex_match(name, m, pattern)) continue;
      found[agents::parse_policy_kind(m[1].str())][std::stoull(m[2].str())] = entry.path();
    }
  }
  TrainingSet out;
  for (const auto& [kind, files] : found) {
    for (const auto& [seed, path] : files) out[kind].push_back(harness::read_metrics_csv(path));
  }
  return out;
}

std::vector<CheckResult> summary_checks(const fs::path& out_dir) {
  std::vector<CheckResult> results;
  results.push_back(check_reward_ordering(load_training_set(out_dir)));

  const auto sweep = out_dir / "sweep_per_seed.csv";
  if (fs::exists(sweep)) {
    const auto records = harness::read_sweep_records_csv(sweep);
    results.push_back(check_qoe_trend(records));
    results.push_back(check_successful_data(records));
  } else {
    results.push_back({2, "qoe trend", false, "missing " + sweep.string()});
    results.push_back({3, "successful data", false, "missing " + sweep.string()});
  }

  results.push_back(check_outage_oracle());
  results.push_back(check_gradients());
  results.push_back(check_target_decoupling());
  results.push_back(check_oracle_equivalence());

  // Re-run the first recorded learning-agent run (any run if none learned).
  std::optional<std::pair<PolicyKind, std::uint64_t>> pick;
  static const std::regex pattern(R"(train_([a-z]+)_seed([0-9]+)\.csv)");
  if (fs::is_directory(out_dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(out_dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::smatch m;
      const auto name = f.filename().string();
      if (!std::regex_match(name, m, pattern)) continue;
      const auto kind = agents::parse_policy_kind(m[1].str());
      const auto seed = std::stoull(m[2].str());
      const bool learner = kind == PolicyKind::ddqn || kind == PolicyKind::dqn;
      if (!pick || (learner && pick->first != PolicyKind::ddqn && pick->first != PolicyKind::dqn)) pick = {kind, seed};
    }
  }
  if (!pick) {
    results.push_back({8, "determinism", false, "no training CSV in " + out_dir.string()});
  } else {
    auto csv = harness::metrics_path(out_dir, pick->first, pick->second);
    auto meta = csv;
    meta.replace_extension(".meta");
    const auto cfg = config::parse_config_text(read_text(meta));
    results.push_back(check_determinism(cfg, pick->first, pick->second, read_text(csv)));
  }
  return results;
}

std::vector<CheckResult> selftest_checks() {
  std::vector<CheckResult> results = {check_outage_oracle(), check_gradients(), check_target_decoupling(),
                                      check_oracle_equivalence()};
  config::ExperimentConfig cfg;
  cfg.episodes = 30;
  cfg.agent.learning_starts = 200;
  results.push_back(check_determinism(cfg, PolicyKind::ddqn, 1));
  return results;
}

std::vector<CheckResult> full_run(const config::ExperimentConfig& cfg, const fs::path& out_dir, std::ostream* log) {
  std::mutex log_mutex;
  auto note = [&](const std::string& line) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    *log << line << std::endl;
  };
  const std::vector<PolicyKind> kinds = {PolicyKind::ddqn, PolicyKind::dqn, PolicyKind::greedy, PolicyKind::random};
  std::vector<std::pair<PolicyKind, std::uint64_t>> jobs;
  for (auto k : kinds) {
    for (auto s : cfg.seeds) jobs.emplace_back(k, s);
  }
  harness::parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto [kind, seed] = jobs[i];
    harness::run_training(cfg, kind, seed, out_dir);
    note("trained " + std::string(agents::to_string(kind)) + " seed " + std::to_string(seed));
  });

  note("payload sweep over " + std::to_string(cfg.payload_sweep.size()) + " points");
  const auto records = harness::payload_sweep(cfg, cfg.payload_sweep, cfg.sweep_agents);
  const auto hash = config::config_hash(cfg);
  harness::write_file(out_dir / "sweep_per_seed.csv", harness::sweep_records_csv(records, hash));
  harness::write_file(out_dir / "sweep.csv", harness::sweep_points_csv(harness::aggregate(records), hash));
  note("sweep written");
  return summary_checks(out_dir);
}

}  // namespace genv2v::acceptance
