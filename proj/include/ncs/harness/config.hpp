#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ncs/agent.hpp"
#include "ncs/envs/merge.hpp"
#include "ncs/envs/synthetic.hpp"
#include "ncs/envs/toy_covering.hpp"
#include "ncs/mdp.hpp"

namespace ncs {

enum class EnvKind { Merge, MergeStar, ToyCovering, SyntheticLinear };

std::string_view to_string(EnvKind k);
EnvKind parse_env_kind(std::string_view s);

struct EmitFlags {
  bool episodes = true;
  bool summary = true;
  bool covering = true;  // only meaningful for toy-covering
};

struct RunConfig {
  EnvKind env = EnvKind::Merge;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output = "out";
  EmitFlags emit;
  bool wallclock = false;
  std::size_t jobs = 1;

  AgentConfig agent;
  MergeEnvConfig merge;
  ToyCoveringConfig toy;
  double toy_kappa = 0.1;
  SyntheticConfig synthetic;
};

/// Key/value pairs in file order; `--section.key=value` flags use the same form.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses flat `key = value` text (`#` starts a comment). Duplicate keys are
/// rejected; the key is named in the ConfigError.
Overrides parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Builds a validated RunConfig from the file (may be empty for defaults)
/// followed by overrides, later entries winning. Rejects unknown keys and
/// values that violate constraints, naming the key.
RunConfig parse_config(const std::filesystem::path& path, const Overrides& overrides = {});
RunConfig build_config(const Overrides& entries);

/// Sorted canonical key=value listing of every setting that affects results.
/// Seeds, output location, jobs and emit flags are excluded.
std::map<std::string, std::string> canonical_settings(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);

std::unique_ptr<SimulatedEnvironment> make_environment(const RunConfig& cfg);

}  // namespace ncs
