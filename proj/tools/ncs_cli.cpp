#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "ncs/errors.hpp"
#include "ncs/harness/config.hpp"
#include "ncs/harness/csv.hpp"
#include "ncs/harness/experiment.hpp"
#include "ncs/mdp.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kPropertyFailure = 3;

// Accepts `--section.key=value` (or bare `section.key=value`).
ncs::Overrides parse_overrides(const std::vector<std::string>& args) {
  ncs::Overrides out;
  for (std::string a : args) {
    if (a.rfind("--", 0) == 0) a.erase(0, 2);
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ncs::ConfigError("override '" + a + "' must have the form --section.key=value", a);
    }
    out.emplace_back(a.substr(0, eq), a.substr(eq + 1));
  }
  return out;
}

int run_command(const std::string& config, const std::vector<std::string>& extra, bool check) {
  const ncs::RunConfig cfg = ncs::parse_config(config, parse_overrides(extra));
  const ncs::ExperimentResult res = ncs::run_experiment(cfg);
  std::cout << "env=" << ncs::to_string(cfg.env) << " config_hash=" << res.config_hash
            << " v_star=" << ncs::format_real(res.v_star) << "\n";
  for (const auto& s : res.seeds) {
    std::cout << "seed " << s.seed << ": regret=" << ncs::format_real(s.ledger.total_regret())
              << " violations=" << s.ledger.total_violations() << " sublinear="
              << (s.sublinear ? (*s.sublinear ? "yes" : "no") : "n/a") << " status=" << s.status
              << "\n";
  }
  if (res.covering) {
    std::cout << "packing_count=" << res.covering->count << " (n_states=" << res.n_states << ")\n";
  }
  if (!res.all_ok()) return kRuntimeError;
  if (check && !res.properties_hold()) return kPropertyFailure;
  return kOk;
}

int validate_command(const std::string& config, const std::vector<std::string>& extra,
                     std::size_t samples, std::uint64_t seed, bool check) {
  const ncs::RunConfig cfg = ncs::parse_config(config, parse_overrides(extra));
  const auto env = ncs::make_environment(cfg);
  ncs::RandomStream rng(seed);
  const ncs::ValidationReport report =
      ncs::validate_assumptions(*env, samples, cfg.agent.epsilon, rng);
  std::cout << report.summary() << "\n";
  if (check && !report.ok()) return kPropertyFailure;
  return kOk;
}

int covering_command(std::size_t n_states, double kappa, double tau, bool check) {
  if (n_states < 1) throw ncs::ConfigError("--n-states must be >= 1", "n-states");
  if (!(kappa > 0.0 && kappa < 1.0 / 6.0)) {
    throw ncs::ConfigError("--kappa must lie in (0, 1/6)", "kappa");
  }
  const ncs::PackingResult p = ncs::toy_packing(n_states, kappa, tau);
  ncs::write_csv_row(std::cout, {"n_states", "kappa", "tau", "packing_count", "min_separation"});
  ncs::write_csv_row(std::cout, {std::to_string(n_states), ncs::format_real(kappa),
                                 ncs::format_real(tau), std::to_string(p.count),
                                 ncs::format_real(p.min_separation)});
  if (check && p.count < n_states) return kPropertyFailure;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe least-squares value iteration experiments"};
  app.require_subcommand(1);

  std::string config;
  bool check = false;

  auto* run = app.add_subcommand("run", "Run an experiment; extra --section.key=value override the file");
  run->add_option("--config", config, "Config file (key = value)")->required();
  run->add_flag("--assert", check, "Exit 3 when the safety/regret/covering properties fail");
  run->allow_extras();

  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  auto* validate = app.add_subcommand("validate", "Spot-check the environment's structural assumptions");
  validate->add_option("--config", config, "Config file (key = value)")->required();
  validate->add_option("--samples", samples, "Number of sampled (s, a, h)");
  validate->add_option("--seed", seed, "Sampling seed");
  validate->add_flag("--assert", check, "Exit 3 when any check fails");
  validate->allow_extras();

  std::size_t n_states = 30;
  double kappa = 0.1;
  double tau = 2.0 / 3.0;
  auto* covering = app.add_subcommand("covering", "Greedy packing lower bound for the toy value class");
  covering->add_option("--n-states", n_states, "Number of states")->required();
  covering->add_option("--kappa", kappa, "Covering radius, below 1/6")->required();
  covering->add_option("--tau", tau, "Constraint threshold");
  covering->add_flag("--assert", check, "Exit 3 when packing_count < n_states");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return run_command(config, run->remaining(), check);
    if (*validate) return validate_command(config, validate->remaining(), samples, seed, check);
    return covering_command(n_states, kappa, tau, check);
  } catch (const ncs::ConfigError& e) {
    std::cerr << "config error";
    if (!e.key().empty()) std::cerr << " [" << e.key() << "]";
    std::cerr << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
