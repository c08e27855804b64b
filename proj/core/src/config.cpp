#include "genv2v/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "genv2v/channel.hpp"

namespace genv2v::config {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

/// One mapping in the file. Records which keys were read so the rest can be
/// reported as unknown.
class Section {
 public:
  Section(const YAML::Node& root, std::string name, std::map<std::string, int>& lines)
      : name_(std::move(name)), lines_(lines) {
    if (!root.IsDefined() || root.IsNull()) return;
    if (!root.IsMap()) throw ConfigError("'" + name_ + "' must be a mapping", line_of(root));
    const YAML::Node section = root[name_];
    if (!section.IsDefined() || section.IsNull()) return;
    if (!section.IsMap()) throw ConfigError("'" + name_ + "' must be a mapping", line_of(section));
    node_.emplace(section);
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    known_.insert(key);
    if (!node_) return;
    const YAML::Node value = (*node_)[key];
    if (!value.IsDefined()) return;
    lines_[name_ + "." + key] = line_of(value);
    try {
      out = value.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(name_ + "." + key + ": wrong type", line_of(value));
    }
  }

  /// Null means "derive automatically" and is stored as NaN.
  void get_optional(const std::string& key, double& out) {
    known_.insert(key);
    if (!node_) return;
    const YAML::Node value = (*node_)[key];
    if (!value.IsDefined()) return;
    lines_[name_ + "." + key] = line_of(value);
    if (value.IsNull()) {
      out = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    get(key, out);
  }

  void finish() const {
    if (!node_) return;
    for (const auto& kv : *node_) {
      const auto key = kv.first.as<std::string>();
      if (!known_.contains(key)) throw ConfigError("unknown key '" + name_ + "." + key + "'", line_of(kv.first));
    }
  }

 private:
  std::string name_;
  std::map<std::string, int>& lines_;
  std::optional<YAML::Node> node_;
  std::set<std::string> known_;
};

const std::set<std::string> kSections = {"channel", "geometry", "content", "qoe", "env", "agent", "experiment"};

std::vector<double> to_dbm(const std::vector<double>& watts) {
  std::vector<double> out;
  for (double w : watts) out.push_back(channel::watt_to_dbm(w));
  return out;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "null";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ExperimentConfig parse_node(const YAML::Node& root) {
  ExperimentConfig cfg;
  std::map<std::string, int> lines;
  if (root.IsDefined() && !root.IsNull()) {
    if (!root.IsMap()) throw ConfigError("top level must be a mapping", line_of(root));
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!kSections.contains(key)) throw ConfigError("unknown section '" + key + "'", line_of(kv.first));
    }
  }

  auto& ch = cfg.env.channel;
  Section channel(root, "channel", lines);
  channel.get("carrier_freq_hz", ch.carrier_freq_hz);
  channel.get("subchannel_bandwidth_hz", ch.subchannel_bandwidth_hz);
  channel.get("num_subchannels", ch.num_subchannels);
  channel.get("noise_power_w", ch.noise_power_w);
  channel.get("pathloss_ref_db", ch.pathloss_ref_db);
  channel.get("pathloss_ref_dist_m", ch.pathloss_ref_dist_m);
  channel.get("pathloss_exponent", ch.pathloss_exponent);
  channel.get("shadowing_sigma_db", ch.shadowing_sigma_db);
  channel.get("coherence_time_cap_s", ch.coherence_time_cap_s);
  channel.finish();

  auto& geo = cfg.env.geometry;
  Section geometry(root, "geometry", lines);
  geometry.get("tx_rx_distance_m", geo.tx_rx_distance_m);
  geometry.get("cross_distance_m", geo.cross_distance_m);
  geometry.get("speed_mps", geo.speed_mps);
  geometry.finish();

  auto& co = cfg.env.content;
  Section content(root, "content", lines);
  content.get("similarity_floor", co.similarity_floor);
  content.get("similarity_ceiling", co.similarity_ceiling);
  content.get("similarity_timescale", co.similarity_timescale);
  content.get("per_step_gen_time_s", co.per_step_gen_time_s);
  content.get("skeleton_bits", co.skeleton_bits);
  content.get("prompt_bits", co.prompt_bits);
  content.finish();

  auto& q = cfg.env.qoe;
  Section qoe(root, "qoe", lines);
  qoe.get("rate_weight", q.rate_weight);
  qoe.get("similarity_weight", q.similarity_weight);
  qoe.get("rate_ref_bps", q.rate_ref_bps);
  qoe.get("similarity_ref", q.similarity_ref);
  qoe.get("deadline_s", q.deadline_s);
  qoe.get("outage_cap", q.outage_cap);
  qoe.get("outage_window", q.outage_window);
  qoe.finish();

  auto& e = cfg.env;
  Section env(root, "env", lines);
  std::vector<double> levels_dbm = to_dbm(e.power_levels_w);
  double budget_dbm = channel::watt_to_dbm(e.power_budget_w);
  env.get("power_levels_dbm", levels_dbm);
  env.get("power_budget_dbm", budget_dbm);
  e.power_levels_w.clear();
  for (double dbm : levels_dbm) e.power_levels_w.push_back(channel::dbm_to_watt(dbm));
  e.power_budget_w = channel::dbm_to_watt(budget_dbm);
  env.get("diffusion_levels", e.diffusion_levels);
  env.get("slot_duration_s", e.slot_duration_s);
  env.get("episode_length", e.episode_length);
  env.get("penalty_weight", e.penalty_weight);
  env.get_optional("obs_gain_db_offset", e.obs_gain_db_offset);
  env.get("obs_db_scale", e.obs_db_scale);
  env.get("obs_payload_ref_bits", e.obs_payload_ref_bits);
  env.finish();

  auto& a = cfg.agent;
  Section agent(root, "agent", lines);
  agent.get("hidden", a.hidden);
  agent.get("gamma", a.gamma);
  agent.get("epsilon_start", a.epsilon_start);
  agent.get("epsilon_end", a.epsilon_end);
  agent.get("epsilon_decay_fraction", a.epsilon_decay_fraction);
  agent.get("target_sync_interval", a.target_sync_interval);
  agent.get("batch_size", a.batch_size);
  agent.get("replay_capacity", a.replay_capacity);
  agent.get("learning_rate", a.adam.learning_rate);
  agent.get("beta1", a.adam.beta1);
  agent.get("beta2", a.adam.beta2);
  agent.get("adam_epsilon", a.adam.epsilon);
  agent.get("huber_delta", a.huber_delta);
  agent.get("train_interval", a.train_interval);
  agent.get("learning_starts", a.learning_starts);
  agent.get("reward_scale", a.reward_scale);
  agent.finish();

  Section exp(root, "experiment", lines);
  std::string kind(agents::to_string(cfg.agent_kind));
  std::string greedy(agents::to_string(cfg.greedy_info));
  std::vector<std::string> sweep_agents;
  for (auto k : cfg.sweep_agents) sweep_agents.emplace_back(agents::to_string(k));
  std::string output_dir = cfg.output_dir.string();
  exp.get("agent", kind);
  exp.get("greedy_info", greedy);
  exp.get("episodes", cfg.episodes);
  exp.get("eval_episodes", cfg.eval_episodes);
  exp.get("seeds", cfg.seeds);
  exp.get("smoothing_window", cfg.smoothing_window);
  exp.get("payload_bits", cfg.payload_bits);
  exp.get("payload_sweep", cfg.payload_sweep);
  exp.get("sweep_agents", sweep_agents);
  exp.get("output_dir", output_dir);
  exp.get("threads", cfg.threads);
  exp.finish();
  try {
    cfg.agent_kind = agents::parse_policy_kind(kind);
    if (cfg.agent_kind == agents::PolicyKind::oracle) throw std::invalid_argument("oracle is not a trainable agent");
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("experiment.agent: ") + err.what(), lines["experiment.agent"]);
  }
  try {
    cfg.greedy_info = agents::parse_greedy_info(greedy);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("experiment.greedy_info: ") + err.what(), lines["experiment.greedy_info"]);
  }
  cfg.sweep_agents.clear();
  try {
    for (const auto& s : sweep_agents) cfg.sweep_agents.push_back(agents::parse_policy_kind(s));
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("experiment.sweep_agents: ") + err.what(), lines["experiment.sweep_agents"]);
  }
  cfg.output_dir = output_dir;

  try {
    cfg.validate();
  } catch (const ConfigError& err) {
    // Attach the line of the offending key when the message names one.
    const std::string msg = err.what();
    const auto colon = msg.find(':');
    const auto it = colon == std::string::npos ? lines.end() : lines.find(msg.substr(0, colon));
    if (err.line() == 0 && it != lines.end()) throw ConfigError(msg, it->second);
    throw;
  }
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    agent.validate();
    env_for(payload_bits, seeds.empty() ? 0 : seeds.front()).validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  if (episodes < 1) throw ConfigError("experiment.episodes: must be at least 1");
  if (eval_episodes < 1) throw ConfigError("experiment.eval_episodes: must be at least 1");
  if (smoothing_window < 1) throw ConfigError("experiment.smoothing_window: must be at least 1");
  if (seeds.empty()) throw ConfigError("experiment.seeds: must not be empty");
  std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  if (distinct.size() != seeds.size()) throw ConfigError("experiment.seeds: seeds must be distinct");
  if (payload_sweep.empty()) throw ConfigError("experiment.payload_sweep: must not be empty");
  for (double p : payload_sweep) {
    if (!(p > env.content.prompt_bits)) {
      throw ConfigError("experiment.payload_sweep: every payload must exceed content.prompt_bits");
    }
  }
  if (threads < 0) throw ConfigError("experiment.threads: must be non-negative");
}

env::EnvConfig ExperimentConfig::env_for(double payload, std::uint64_t seed) const {
  env::EnvConfig e = env;
  if (!(payload > e.content.prompt_bits)) {
    throw std::invalid_argument("experiment.payload_bits: payload must exceed content.prompt_bits");
  }
  e.content.skeleton_bits = payload - e.content.prompt_bits;
  e.seed = seed;
  return e;
}

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& err) {
    throw ConfigError(err.msg, err.mark.line + 1);
  }
  return parse_node(root);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string echo(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto list = [](const auto& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ", ";
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[i])>>) {
        s += fmt_double(values[i]);
      } else {
        s += std::to_string(values[i]);
      }
    }
    return s + "]";
  };
  const auto& ch = cfg.env.channel;
  out << "channel:\n"
      << "  carrier_freq_hz: " << fmt_double(ch.carrier_freq_hz) << "\n"
      << "  subchannel_bandwidth_hz: " << fmt_double(ch.subchannel_bandwidth_hz) << "\n"
      << "  num_subchannels: " << ch.num_subchannels << "\n"
      << "  noise_power_w: " << fmt_double(ch.noise_power_w) << "\n"
      << "  pathloss_ref_db: " << fmt_double(ch.pathloss_ref_db) << "\n"
      << "  pathloss_ref_dist_m: " << fmt_double(ch.pathloss_ref_dist_m) << "\n"
      << "  pathloss_exponent: " << fmt_double(ch.pathloss_exponent) << "\n"
      << "  shadowing_sigma_db: " << fmt_double(ch.shadowing_sigma_db) << "\n"
      << "  coherence_time_cap_s: " << fmt_double(ch.coherence_time_cap_s) << "\n";
  const auto& geo = cfg.env.geometry;
  out << "geometry:\n"
      << "  tx_rx_distance_m: " << list(geo.tx_rx_distance_m) << "\n"
      << "  cross_distance_m: [";
  for (std::size_t j = 0; j < geo.cross_distance_m.size(); ++j) out << (j ? ", " : "") << list(geo.cross_distance_m[j]);
  out << "]\n"
      << "  speed_mps: " << list(geo.speed_mps) << "\n";
  const auto& co = cfg.env.content;
  out << "content:\n"
      << "  similarity_floor: " << fmt_double(co.similarity_floor) << "\n"
      << "  similarity_ceiling: " << fmt_double(co.similarity_ceiling) << "\n"
      << "  similarity_timescale: " << fmt_double(co.similarity_timescale) << "\n"
      << "  per_step_gen_time_s: " << fmt_double(co.per_step_gen_time_s) << "\n"
      << "  skeleton_bits: " << fmt_double(co.skeleton_bits) << "\n"
      << "  prompt_bits: " << fmt_double(co.prompt_bits) << "\n";
  const auto& q = cfg.env.qoe;
  out << "qoe:\n"
      << "  rate_weight: " << fmt_double(q.rate_weight) << "\n"
      << "  similarity_weight: " << fmt_double(q.similarity_weight) << "\n"
      << "  rate_ref_bps: " << fmt_double(q.rate_ref_bps) << "\n"
      << "  similarity_ref: " << fmt_double(q.similarity_ref) << "\n"
      << "  deadline_s: " << fmt_double(q.deadline_s) << "\n"
      << "  outage_cap: " << fmt_double(q.outage_cap) << "\n"
      << "  outage_window: " << q.outage_window << "\n";
  const auto& e = cfg.env;
  out << "env:\n"
      << "  power_levels_dbm: " << list(to_dbm(e.power_levels_w)) << "\n"
      << "  power_budget_dbm: " << fmt_double(channel::watt_to_dbm(e.power_budget_w)) << "\n"
      << "  diffusion_levels: " << list(e.diffusion_levels) << "\n"
      << "  slot_duration_s: " << fmt_double(e.slot_duration_s) << "\n"
      << "  episode_length: " << e.episode_length << "\n"
      << "  penalty_weight: " << fmt_double(e.penalty_weight) << "\n"
      << "  obs_gain_db_offset: " << fmt_double(e.obs_gain_db_offset) << "  # resolved: "
      << fmt_double(e.gain_db_offset()) << "\n"
      << "  obs_db_scale: " << fmt_double(e.obs_db_scale) << "\n"
      << "  obs_payload_ref_bits: " << fmt_double(e.obs_payload_ref_bits) << "\n";
  const auto& a = cfg.agent;
  out << "agent:\n"
      << "  hidden: " << list(a.hidden) << "\n"
      << "  gamma: " << fmt_double(a.gamma) << "\n"
      << "  epsilon_start: " << fmt_double(a.epsilon_start) << "\n"
      << "  epsilon_end: " << fmt_double(a.epsilon_end) << "\n"
      << "  epsilon_decay_fraction: " << fmt_double(a.epsilon_decay_fraction) << "\n"
      << "  target_sync_interval: " << a.target_sync_interval << "\n"
      << "  batch_size: " << a.batch_size << "\n"
      << "  replay_capacity: " << a.replay_capacity << "\n"
      << "  learning_rate: " << fmt_double(a.adam.learning_rate) << "\n"
      << "  beta1: " << fmt_double(a.adam.beta1) << "\n"
      << "  beta2: " << fmt_double(a.adam.beta2) << "\n"
      << "  adam_epsilon: " << fmt_double(a.adam.epsilon) << "\n"
      << "  huber_delta: " << fmt_double(a.huber_delta) << "\n"
      << "  train_interval: " << a.train_interval << "\n"
      << "  learning_starts: " << a.learning_starts << "\n"
      << "  reward_scale: " << fmt_double(a.reward_scale) << "\n";
  std::string sweep_agents = "[";
  for (std::size_t i = 0; i < cfg.sweep_agents.size(); ++i) {
    sweep_agents += (i ? ", " : "") + std::string(agents::to_string(cfg.sweep_agents[i]));
  }
  sweep_agents += "]";
  out << "experiment:\n"
      << "  agent: " << agents::to_string(cfg.agent_kind) << "\n"
      << "  greedy_info: " << agents::to_string(cfg.greedy_info) << "\n"
      << "  episodes: " << cfg.episodes << "\n"
      << "  eval_episodes: " << cfg.eval_episodes << "\n"
      << "  seeds: " << list(cfg.seeds) << "\n"
      << "  smoothing_window: " << cfg.smoothing_window << "\n"
      << "  payload_bits: " << fmt_double(cfg.payload_bits) << "\n"
      << "  payload_sweep: " << list(cfg.payload_sweep) << "\n"
      << "  sweep_agents: " << sweep_agents << "\n"
      << "  output_dir: \"" << cfg.output_dir.string() << "\"\n"
      << "  threads: " << cfg.threads << "\n";
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  // Where results go and how many threads produce them do not change them.
  ExperimentConfig canonical = cfg;
  canonical.output_dir.clear();
  canonical.threads = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : echo(canonical)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace genv2v::config
