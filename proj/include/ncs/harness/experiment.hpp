#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ncs/envs/toy_covering.hpp"
#include "ncs/harness/config.hpp"
#include "ncs/metrics.hpp"

namespace ncs {

struct SeedResult {
  std::uint64_t seed = 0;
  std::string status = "ok";
  RegretLedger ledger{0.0};
  std::size_t k_prime = 0;
  std::optional<bool> sublinear;    // unset when too few post-K' episodes
  std::optional<double> optimism;   // unset without exploitation episodes
  std::optional<double> mean_value_gap;  // mean of V_1(s_1) - v_star over exploitation
  std::size_t exploit_episodes = 0;
  std::size_t explore_steps = 0;
  std::size_t explore_violations = 0;

  bool ok() const { return status == "ok"; }
};

struct ExperimentResult {
  std::string config_hash;
  double v_star = 0.0;
  std::vector<SeedResult> seeds;
  std::optional<PackingResult> covering;
  std::size_t n_states = 0;

  bool all_ok() const;
  std::size_t total_violations() const;
  /// Zero violations, at least 60% of evaluable seeds sublinear, and a
  /// packing at least as large as the state space (toy env only).
  bool properties_hold() const;
};

/// Runs one seed and, when episodes_csv is given, streams its rows there.
/// Module errors are caught and stored in status.
SeedResult run_seed(const RunConfig& cfg, const SimulatedEnvironment& env, double v_star,
                    std::uint64_t seed, const std::string& config_hash,
                    std::ostream* episodes_csv);

/// Runs every seed, writing episodes_<seed>.csv (temp file then rename),
/// summary.csv and, for the toy env, covering.csv under cfg.output.
/// Throws Error only when the output directory cannot be prepared or the
/// optimal value cannot be computed.
ExperimentResult run_experiment(const RunConfig& cfg);

std::vector<std::string> episodes_header();
std::vector<std::string> summary_header();
std::vector<std::string> covering_header();

PackingResult toy_packing(std::size_t n_states, double kappa, double tau);

}  // namespace ncs
