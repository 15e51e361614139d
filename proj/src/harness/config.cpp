#include "ncs/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ncs/errors.hpp"
#include "ncs/harness/csv.hpp"
#include "ncs/rng.hpp"

namespace ncs {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  // Fractions such as 1/3 are accepted so grid values can be written exactly.
  const auto slash = v.find('/');
  if (slash != std::string::npos) {
    return to_double(key, trim(v.substr(0, slash))) / to_double(key, trim(v.substr(slash + 1)));
  }
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) {
    throw ConfigError("'" + v + "' is not a finite number for key " + key, key);
  }
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("'" + v + "' is not a nonnegative integer for key " + key, key);
  }
  return x;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + v + "' is not a boolean for key " + key, key);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

template <class Section>
Setter real_field(Section RunConfig::*section, double Section::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) {
    c.*section.*field = to_double(k, v);
  };
}

template <class Section>
Setter size_field(Section RunConfig::*section, std::size_t Section::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) {
    c.*section.*field = to_size(k, v);
  };
}

Setter agent_optional(std::optional<double> AgentConfig::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) {
    c.agent.*field = to_double(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["env"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.env = parse_env_kind(v);
    };
    t["seeds"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.seeds.clear();
      for (const auto& s : split_list(v)) c.seeds.push_back(to_u64(k, s));
      if (c.seeds.empty()) throw ConfigError("seeds must list at least one seed", k);
    };
    t["output"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v.empty()) throw ConfigError("output must be a path", k);
      c.output = v;
    };
    t["emit"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.emit = EmitFlags{false, false, false};
      for (const auto& s : split_list(v)) {
        if (s == "episodes") c.emit.episodes = true;
        else if (s == "summary") c.emit.summary = true;
        else if (s == "covering") c.emit.covering = true;
        else throw ConfigError("unknown emit target '" + s + "'", k);
      }
    };
    t["wallclock"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.wallclock = to_bool(k, v);
    };
    t["jobs"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.jobs = to_size(k, v);
      if (c.jobs == 0) throw ConfigError("jobs must be >= 1", k);
    };

    t["agent.k"] = size_field(&RunConfig::agent, &AgentConfig::episodes);
    t["agent.k_prime"] = size_field(&RunConfig::agent, &AgentConfig::k_prime);
    t["agent.epsilon"] = real_field(&RunConfig::agent, &AgentConfig::epsilon);
    t["agent.lambda"] = real_field(&RunConfig::agent, &AgentConfig::lambda);
    t["agent.c_beta"] = real_field(&RunConfig::agent, &AgentConfig::c_beta);
    t["agent.delta"] = real_field(&RunConfig::agent, &AgentConfig::delta);
    t["agent.iota"] = agent_optional(&AgentConfig::iota);
    t["agent.nu"] = agent_optional(&AgentConfig::nu);
    t["agent.beta1"] = agent_optional(&AgentConfig::beta1);
    t["agent.beta2"] = agent_optional(&AgentConfig::beta2);
    t["agent.q_schedule"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.agent.q_schedule = parse_q_schedule(v);
    };

    t["env.sigma"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const double x = to_double(k, v);
      c.merge.sigma = x;
      c.toy.sigma = x;
      c.synthetic.sigma = x;
    };
    t["env.tau"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const double x = to_double(k, v);
      c.merge.tau = x;
      c.toy.tau = x;
      c.synthetic.tau = x;
    };

    using M = MergeEnvConfig;
    for (const auto& [name, field] : std::initializer_list<std::pair<const char*, double M::*>>{
             {"alpha1", &M::alpha1},       {"alpha2", &M::alpha2},
             {"v_ref", &M::v_ref},         {"kappa1", &M::kappa1},
             {"kappa2", &M::kappa2},       {"y_min", &M::y_min},
             {"y_max", &M::y_max},         {"collav_low", &M::collav_low},
             {"collav_high", &M::collav_high}, {"grid_step", &M::grid_step},
             {"ux_min", &M::ux_min},       {"ux_max", &M::ux_max},
             {"uy_min", &M::uy_min},       {"uy_max", &M::uy_max},
             {"v_max", &M::v_max}}) {
      t[std::string("merge.") + name] = real_field(&RunConfig::merge, field);
    }
    t["merge.horizon"] = size_field(&RunConfig::merge, &M::horizon);

    t["toy.n_states"] = size_field(&RunConfig::toy, &ToyCoveringConfig::n_states);
    t["toy.gamma_index"] = size_field(&RunConfig::toy, &ToyCoveringConfig::gamma_index);
    t["toy.action_step"] = real_field(&RunConfig::toy, &ToyCoveringConfig::action_step);
    t["toy.kappa"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.toy_kappa = to_double(k, v);
    };

    t["synthetic.n_actions"] = size_field(&RunConfig::synthetic, &SyntheticConfig::n_actions);
    t["synthetic.horizon"] = size_field(&RunConfig::synthetic, &SyntheticConfig::horizon);
    t["synthetic.near_actions"] =
        size_field(&RunConfig::synthetic, &SyntheticConfig::near_actions);
    t["synthetic.near_radius"] =
        real_field(&RunConfig::synthetic, &SyntheticConfig::near_radius);
    t["synthetic.instance_seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.synthetic.instance_seed = to_u64(k, v);
    };
    return t;
  }();
  return table;
}

// Environment-dependent defaults for keys the user did not set.
void apply_env_defaults(RunConfig& c, const std::set<std::string>& given) {
  const auto unset = [&](const char* k) { return given.count(k) == 0; };
  switch (c.env) {
    case EnvKind::Merge:
      c.merge.collav = true;
      break;
    case EnvKind::MergeStar:
      c.merge.collav = false;
      if (unset("agent.k_prime")) c.agent.k_prime = 0;
      break;
    case EnvKind::ToyCovering:
      if (unset("agent.epsilon")) c.agent.epsilon = 0.01;
      if (unset("agent.k_prime")) c.agent.k_prime = 1;
      break;
    case EnvKind::SyntheticLinear:
      if (unset("agent.epsilon")) c.agent.epsilon = 0.2;
      if (unset("agent.k_prime")) c.agent.k_prime = 10;
      if (unset("agent.k")) c.agent.episodes = 200;
      break;
  }
}

std::string fmt(double x) { return format_real(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(const std::optional<double>& x) { return x ? format_real(*x) : "auto"; }

}  // namespace

std::string_view to_string(EnvKind k) {
  switch (k) {
    case EnvKind::Merge: return "merge";
    case EnvKind::MergeStar: return "merge-star";
    case EnvKind::ToyCovering: return "toy-covering";
    case EnvKind::SyntheticLinear: return "synthetic-linear";
  }
  return "?";
}

EnvKind parse_env_kind(std::string_view s) {
  if (s == "merge") return EnvKind::Merge;
  if (s == "merge-star") return EnvKind::MergeStar;
  if (s == "toy-covering") return EnvKind::ToyCovering;
  if (s == "synthetic-linear") return EnvKind::SyntheticLinear;
  throw ConfigError("unknown environment '" + std::string(s) + "'", "env");
}

Overrides parse_config_text(const std::string& text, const std::string& origin) {
  Overrides out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " + key, key);
    }
    out.emplace_back(std::move(key), trim(body.substr(eq + 1)));
  }
  return out;
}

RunConfig build_config(const Overrides& entries) {
  // Resolve the environment first: its defaults must not clobber explicit keys.
  std::map<std::string, std::string> merged;
  std::vector<std::string> order;
  for (const auto& [k, v] : entries) {
    if (!setters().count(k)) throw ConfigError("unknown configuration key " + k, k);
    if (!merged.count(k)) order.push_back(k);
    merged[k] = v;
  }
  RunConfig c;
  std::set<std::string> given(order.begin(), order.end());
  if (auto it = merged.find("env"); it != merged.end()) c.env = parse_env_kind(it->second);
  apply_env_defaults(c, given);
  for (const auto& k : order) setters().at(k)(c, k, merged.at(k));

  // Surface constraint violations now, naming the key, before any episode runs.
  const auto env = make_environment(c);
  (void)resolve_agent_params(c.agent, env->descriptor());
  if (c.env == EnvKind::ToyCovering && !(c.toy_kappa > 0.0 && c.toy_kappa < 1.0 / 6.0)) {
    throw ConfigError("toy.kappa must lie in (0, 1/6)", "toy.kappa");
  }
  return c;
}

RunConfig parse_config(const std::filesystem::path& path, const Overrides& overrides) {
  Overrides entries;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    entries = parse_config_text(buf.str(), path.string());
  }
  entries.insert(entries.end(), overrides.begin(), overrides.end());
  return build_config(entries);
}

std::map<std::string, std::string> canonical_settings(const RunConfig& c) {
  std::map<std::string, std::string> m;
  m["env"] = std::string(to_string(c.env));
  const AgentConfig& a = c.agent;
  m["agent.k"] = fmt(a.episodes);
  m["agent.k_prime"] = fmt(a.k_prime);
  m["agent.epsilon"] = fmt(a.epsilon);
  m["agent.lambda"] = fmt(a.lambda);
  m["agent.c_beta"] = fmt(a.c_beta);
  m["agent.delta"] = fmt(a.delta);
  m["agent.iota"] = fmt(a.iota);
  m["agent.nu"] = fmt(a.nu);
  m["agent.beta1"] = fmt(a.beta1);
  m["agent.beta2"] = fmt(a.beta2);
  m["agent.q_schedule"] = std::string(to_string(a.q_schedule));
  switch (c.env) {
    case EnvKind::Merge:
    case EnvKind::MergeStar: {
      const MergeEnvConfig& e = c.merge;
      m["env.sigma"] = fmt(e.sigma);
      m["env.tau"] = fmt(e.tau);
      m["merge.alpha1"] = fmt(e.alpha1);
      m["merge.alpha2"] = fmt(e.alpha2);
      m["merge.v_ref"] = fmt(e.v_ref);
      m["merge.kappa1"] = fmt(e.kappa1);
      m["merge.kappa2"] = fmt(e.kappa2);
      m["merge.y_min"] = fmt(e.y_min);
      m["merge.y_max"] = fmt(e.y_max);
      m["merge.collav_low"] = fmt(e.collav_low);
      m["merge.collav_high"] = fmt(e.collav_high);
      m["merge.grid_step"] = fmt(e.grid_step);
      m["merge.ux_min"] = fmt(e.ux_min);
      m["merge.ux_max"] = fmt(e.ux_max);
      m["merge.uy_min"] = fmt(e.uy_min);
      m["merge.uy_max"] = fmt(e.uy_max);
      m["merge.v_max"] = fmt(e.v_max);
      m["merge.horizon"] = fmt(e.horizon);
      break;
    }
    case EnvKind::ToyCovering:
      m["env.sigma"] = fmt(c.toy.sigma);
      m["env.tau"] = fmt(c.toy.tau);
      m["toy.n_states"] = fmt(c.toy.n_states);
      m["toy.gamma_index"] = fmt(c.toy.gamma_index);
      m["toy.action_step"] = fmt(c.toy.action_step);
      m["toy.kappa"] = fmt(c.toy_kappa);
      break;
    case EnvKind::SyntheticLinear:
      m["env.sigma"] = fmt(c.synthetic.sigma);
      m["env.tau"] = fmt(c.synthetic.tau);
      m["synthetic.n_actions"] = fmt(c.synthetic.n_actions);
      m["synthetic.horizon"] = fmt(c.synthetic.horizon);
      m["synthetic.near_actions"] = fmt(c.synthetic.near_actions);
      m["synthetic.near_radius"] = fmt(c.synthetic.near_radius);
      m["synthetic.instance_seed"] = std::to_string(c.synthetic.instance_seed);
      break;
  }
  return m;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::string text;
  for (const auto& [k, v] : canonical_settings(cfg)) text += k + "=" + v + "\n";
  return fnv1a64(text);
}

std::string config_hash_hex(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

std::unique_ptr<SimulatedEnvironment> make_environment(const RunConfig& cfg) {
  switch (cfg.env) {
    case EnvKind::Merge: {
      MergeEnvConfig m = cfg.merge;
      m.collav = true;
      return std::make_unique<MergeEnv>(m);
    }
    case EnvKind::MergeStar:
      return std::make_unique<MergeEnv>(star_convex_variant(cfg.merge));
    case EnvKind::ToyCovering:
      return std::make_unique<ToyCoveringEnv>(cfg.toy);
    case EnvKind::SyntheticLinear:
      return std::make_unique<SyntheticLinearEnv>(cfg.synthetic);
  }
  throw ConfigError("unknown environment", "env");
}

}  // namespace ncs
