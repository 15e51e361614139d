#include "ncs/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "ncs/errors.hpp"
#include "ncs/harness/csv.hpp"

namespace ncs {

namespace {

namespace fs = std::filesystem;

void write_file_atomically(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string optional_real(const std::optional<double>& x) {
  return x ? format_real(*x) : std::string{};
}

}  // namespace

std::vector<std::string> episodes_header() {
  return {"seed",         "episode",    "phase",         "return_true", "regret_cum",
          "violations_cum", "wallclock_ms", "config_hash"};
}

std::vector<std::string> summary_header() {
  return {"seed",           "config_hash",   "v_star", "total_regret", "total_violations",
          "sublinear_pass", "optimism_rate", "status"};
}

std::vector<std::string> covering_header() {
  return {"n_states", "kappa", "tau", "packing_count", "min_separation", "config_hash"};
}

PackingResult toy_packing(std::size_t n_states, double kappa, double tau) {
  return greedy_packing(toy_value_class(n_states, tau), kappa);
}

bool ExperimentResult::all_ok() const {
  return std::all_of(seeds.begin(), seeds.end(), [](const SeedResult& s) { return s.ok(); });
}

std::size_t ExperimentResult::total_violations() const {
  std::size_t n = 0;
  for (const auto& s : seeds) n += s.ledger.total_violations();
  return n;
}

bool ExperimentResult::properties_hold() const {
  if (total_violations() != 0) return false;
  std::size_t evaluable = 0;
  std::size_t passing = 0;
  for (const auto& s : seeds) {
    if (!s.sublinear) continue;
    ++evaluable;
    if (*s.sublinear) ++passing;
  }
  if (evaluable > 0 && 5 * passing < 3 * evaluable) return false;
  if (covering && covering->count < n_states) return false;
  return true;
}

SeedResult run_seed(const RunConfig& cfg, const SimulatedEnvironment& env, double v_star,
                    std::uint64_t seed, const std::string& config_hash,
                    std::ostream* episodes_csv) {
  SeedResult r;
  r.seed = seed;
  r.ledger = RegretLedger(v_star);
  try {
    const AgentParams params = resolve_agent_params(cfg.agent, env.descriptor());
    r.k_prime = params.k_prime;
    const double tau = env.descriptor().tau;
    const std::string seed_text = std::to_string(seed);
    std::vector<double> values;
    NcsLsvi agent(params);
    RandomStream rng(seed);
    agent.run(env, rng, [&](const EpisodeRecord& ep) {
      const std::size_t bad = r.ledger.record_episode(ep, tau);
      if (ep.phase == Phase::PureExploration) {
        r.explore_steps += ep.actions.size();
        r.explore_violations += bad;
      } else {
        values.push_back(ep.value_estimate);
      }
      if (episodes_csv) {
        write_csv_row(*episodes_csv,
                      {seed_text, std::to_string(ep.episode), std::string(to_string(ep.phase)),
                       format_real(ep.true_return), format_real(r.ledger.total_regret()),
                       std::to_string(r.ledger.total_violations()),
                       format_real(cfg.wallclock ? ep.wallclock_ms : 0.0), config_hash});
      }
    });
    if (!values.empty()) {
      r.optimism = optimism_rate(values, v_star);
      double gap = 0.0;
      for (double v : values) gap += v - v_star;
      r.mean_value_gap = gap / static_cast<double>(values.size());
      r.exploit_episodes = values.size();
    }
    try {
      r.sublinear = sublinearity_check(r.ledger, params.k_prime);
    } catch (const EvaluationError&) {
      r.sublinear.reset();
    }
  } catch (const std::exception& e) {
    r.status = std::string("error: ") + e.what();
  }
  return r;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  ExperimentResult result;
  result.config_hash = config_hash_hex(cfg);
  const auto env = make_environment(cfg);
  result.v_star = optimal_value_dp(*env, env->initial_state());

  std::error_code ec;
  fs::create_directories(cfg.output, ec);
  if (ec) throw Error("cannot create output directory " + cfg.output.string() + ": " + ec.message());

  result.seeds.resize(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      const std::uint64_t seed = cfg.seeds[i];
      std::ostringstream rows;
      if (cfg.emit.episodes) write_csv_row(rows, episodes_header());
      result.seeds[i] = run_seed(cfg, *env, result.v_star, seed, result.config_hash,
                                 cfg.emit.episodes ? &rows : nullptr);
      if (cfg.emit.episodes) {
        try {
          write_file_atomically(cfg.output / ("episodes_" + std::to_string(seed) + ".csv"),
                                rows.str());
        } catch (const std::exception& e) {
          result.seeds[i].status = std::string("error: ") + e.what();
        }
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.jobs, cfg.seeds.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (cfg.emit.summary) {
    std::ostringstream out;
    write_csv_row(out, summary_header());
    for (const SeedResult& s : result.seeds) {
      const std::string pass = s.sublinear ? (*s.sublinear ? "1" : "0") : "";
      write_csv_row(out, {std::to_string(s.seed), result.config_hash, format_real(result.v_star),
                          format_real(s.ledger.total_regret()),
                          std::to_string(s.ledger.total_violations()), pass,
                          optional_real(s.optimism), s.status});
    }
    write_file_atomically(cfg.output / "summary.csv", out.str());
  }

  if (cfg.env == EnvKind::ToyCovering) {
    result.n_states = cfg.toy.n_states;
    result.covering = toy_packing(cfg.toy.n_states, cfg.toy_kappa, cfg.toy.tau);
    if (cfg.emit.covering) {
      std::ostringstream out;
      write_csv_row(out, covering_header());
      write_csv_row(out, {std::to_string(cfg.toy.n_states), format_real(cfg.toy_kappa),
                          format_real(cfg.toy.tau), std::to_string(result.covering->count),
                          format_real(result.covering->min_separation), result.config_hash});
      write_file_atomically(cfg.output / "covering.csv", out.str());
    }
  }
  return result;
}

}  // namespace ncs
