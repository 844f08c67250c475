#include "gchr/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "gchr/errors.hpp"

namespace gchr::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& v) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  const long long x = to_integer(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError("integer out of range: '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty element in list '" + v + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

// Shortest text that parses back to the same double.
std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < xs.size(); ++i) ss << (i ? "," : "") << xs[i];
  return ss.str();
}

struct KeyDef {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// Wraps string conversions that throw ContractViolation for bad names.
template <class F>
auto named(F f, const std::string& v) {
  try {
    return f(v);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

#define GCHR_DOUBLE_KEY(sec, name, field)                                          \
  KeyDef {                                                                          \
    sec, name, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(v); }, \
        [](const ExperimentConfig& c) { return format_double(c.field); }           \
  }
#define GCHR_INT_KEY(sec, name, field)                                          \
  KeyDef {                                                                       \
    sec, name, [](ExperimentConfig& c, const std::string& v) { c.field = to_int(v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }       \
  }
#define GCHR_BOOL_KEY(sec, name, field)                                          \
  KeyDef {                                                                        \
    sec, name, [](ExperimentConfig& c, const std::string& v) { c.field = to_bool(v); }, \
        [](const ExperimentConfig& c) { return std::string(c.field ? "true" : "false"); } \
  }

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      {"env", "name", [](ExperimentConfig& c, const std::string& v) { c.env_name = v; },
       [](const ExperimentConfig& c) { return c.env_name; }},
      GCHR_INT_KEY("env", "horizon", env.horizon),
      GCHR_DOUBLE_KEY("env", "success_tolerance", env.success_tolerance),
      GCHR_DOUBLE_KEY("env", "action_noise_std", env.action_noise_std),
      {"env", "reward_convention",
       [](ExperimentConfig& c, const std::string& v) {
         c.env.reward_convention = named(env::reward_convention_from_string, v);
       },
       [](const ExperimentConfig& c) { return env::to_string(c.env.reward_convention); }},

      GCHR_DOUBLE_KEY("agent", "alpha", agent.alpha),
      GCHR_DOUBLE_KEY("agent", "beta", agent.beta),
      GCHR_DOUBLE_KEY("agent", "gamma", agent.gamma),
      GCHR_DOUBLE_KEY("agent", "polyak", agent.polyak),
      GCHR_INT_KEY("agent", "hindsight_k", agent.hindsight_k),
      GCHR_INT_KEY("agent", "prior_samples", agent.prior_samples),
      GCHR_INT_KEY("agent", "batch_size", agent.batch_size),
      GCHR_INT_KEY("agent", "updates_per_cycle", agent.updates_per_cycle),
      {"agent", "prior_source",
       [](ExperimentConfig& c, const std::string& v) {
         c.agent.prior_source = named(learn::prior_source_from_string, v);
       },
       [](const ExperimentConfig& c) { return learn::to_string(c.agent.prior_source); }},
      GCHR_INT_KEY("agent", "tau_delay", agent.tau_delay),
      GCHR_DOUBLE_KEY("agent", "entropy_coeff", agent.entropy_coeff),
      GCHR_DOUBLE_KEY("agent", "actor_lr", agent.actor_lr),
      GCHR_DOUBLE_KEY("agent", "critic_lr", agent.critic_lr),
      {"agent", "hidden_sizes",
       [](ExperimentConfig& c, const std::string& v) {
         std::vector<int> sizes;
         for (const auto& item : split_list(v)) sizes.push_back(to_int(item));
         c.agent.hidden_sizes = sizes;
       },
       [](const ExperimentConfig& c) { return join(c.agent.hidden_sizes); }},
      GCHR_BOOL_KEY("agent", "squash", agent.squash),

      {"her", "strategy",
       [](ExperimentConfig& c, const std::string& v) {
         c.her.strategy = named(replay::relabel_strategy_from_string, v);
       },
       [](const ExperimentConfig& c) { return replay::to_string(c.her.strategy); }},
      GCHR_DOUBLE_KEY("her", "relabel_ratio", her.relabel_ratio),
      GCHR_DOUBLE_KEY("her", "hindsight_goal_fraction", her.hindsight_goal_fraction),

      {"run", "seeds",
       [](ExperimentConfig& c, const std::string& v) {
         std::vector<std::uint64_t> seeds;
         for (const auto& item : split_list(v)) {
           const long long s = to_integer(item);
           if (s < 0) throw ConfigError("seeds must be non-negative");
           seeds.push_back(static_cast<std::uint64_t>(s));
         }
         c.seeds = seeds;
       },
       [](const ExperimentConfig& c) { return join(c.seeds); }},
      GCHR_INT_KEY("run", "epochs", epochs),
      GCHR_INT_KEY("run", "cycles_per_epoch", cycles_per_epoch),
      GCHR_INT_KEY("run", "episodes_per_cycle", episodes_per_cycle),
      GCHR_INT_KEY("run", "eval_rollouts", eval_rollouts),
      GCHR_INT_KEY("run", "warmup_steps", warmup_steps),
      GCHR_DOUBLE_KEY("run", "random_action_prob", random_action_prob),
      GCHR_DOUBLE_KEY("run", "exploration_noise", exploration_noise),
      {"run", "buffer_capacity",
       [](ExperimentConfig& c, const std::string& v) {
         const long long x = to_integer(v);
         if (x <= 0) throw ConfigError("buffer_capacity must be positive");
         c.buffer_capacity = static_cast<std::size_t>(x);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.buffer_capacity); }},
      GCHR_BOOL_KEY("run", "dump_trajectories", dump_trajectories),
      GCHR_BOOL_KEY("run", "save_checkpoints", save_checkpoints),
      {"run", "output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
       [](const ExperimentConfig& c) { return c.output_dir.string(); }},
  };
  return table;
}

#undef GCHR_DOUBLE_KEY
#undef GCHR_INT_KEY
#undef GCHR_BOOL_KEY

const KeyDef* find_key(const std::string& section, const std::string& key) {
  for (const auto& k : key_table())
    if (k.section == section && k.key == key) return &k;
  return nullptr;
}

bool known_section(const std::string& section) {
  return std::ranges::any_of(key_table(), [&](const KeyDef& k) { return k.section == section; });
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    agent.validate();
    her.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  if (env_name != "PointReach2D" && env_name != "LMaze2D" && env_name != "BlockPush2D")
    throw ConfigError("env.name: unknown environment '" + env_name + "'");
  if (env.horizon < 0) throw ConfigError("env.horizon must be positive (0 keeps the default)");
  if (env.success_tolerance < 0.0) throw ConfigError("env.success_tolerance must be positive");
  if (env.action_noise_std < 0.0) throw ConfigError("env.action_noise_std must be non-negative");
  if (seeds.empty()) throw ConfigError("run.seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("run.seeds must be distinct");
  if (epochs < 1 || cycles_per_epoch < 1 || episodes_per_cycle < 1 || eval_rollouts < 1)
    throw ConfigError("run counts (epochs, cycles_per_epoch, episodes_per_cycle, eval_rollouts) must be >= 1");
  if (warmup_steps < 0) throw ConfigError("run.warmup_steps must be non-negative");
  if (random_action_prob < 0.0 || random_action_prob > 1.0)
    throw ConfigError("run.random_action_prob must lie in [0, 1]");
  if (exploration_noise < 0.0) throw ConfigError("run.exploration_noise must be non-negative");
  if (buffer_capacity == 0) throw ConfigError("run.buffer_capacity must be positive");
}

void set_config_value(ExperimentConfig& config, const std::string& dotted_key,
                      const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw ConfigError("expected section.key, got '" + dotted_key + "'");
  const auto* def = find_key(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
  if (def == nullptr) throw ConfigError("unknown config key '" + dotted_key + "'");
  try {
    def->set(config, trim(value));
  } catch (const ConfigError& e) {
    throw ConfigError(dotted_key + ": " + e.what());
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig config;
  std::string line;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line.substr(0, line.find('#')));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail("malformed section header");
      section = trim(text.substr(1, text.size() - 2));
      if (!known_section(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside of any section");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const std::string dotted = section + "." + key;
    if (find_key(section, key) == nullptr) fail("unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(dotted).second) fail("duplicate key '" + dotted + "'");
    try {
      set_config_value(config, dotted, value);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.section + "." + k.key);
  return out;
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
  std::string section;
  for (const auto& k : key_table()) {
    if (k.section != section) {
      if (!section.empty()) out << "\n";
      section = k.section;
      out << "[" << section << "]\n";
    }
    out << k.key << " = " << k.get(config) << "\n";
  }
}

std::filesystem::path output_root() {
  const char* root = std::getenv("GCHR_OUTPUT_ROOT");
  if (root != nullptr && *root != '\0') return root;
  return "runs";
}

std::filesystem::path resolved_output_dir(const ExperimentConfig& config) {
  if (config.output_dir.is_absolute()) return config.output_dir;
  return output_root() / config.output_dir;
}

}  // namespace gchr::harness
