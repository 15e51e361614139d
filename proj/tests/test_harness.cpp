#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncs/errors.hpp"
#include "ncs/harness/config.hpp"
#include "ncs/harness/csv.hpp"
#include "ncs/harness/experiment.hpp"

using namespace ncs;
namespace fs = std::filesystem;

namespace {

std::string config_error_key(const Overrides& o) {
  try {
    build_config(o);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ncs_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = build_config({});
  EXPECT_EQ(c.env, EnvKind::Merge);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(c.agent.episodes, 1000u);
  EXPECT_EQ(c.agent.k_prime, 300u);
  EXPECT_DOUBLE_EQ(c.agent.epsilon, 0.1);
  EXPECT_DOUBLE_EQ(c.merge.tau, 0.5);
}

TEST(Config, EnvDefaultsApplyBeforeOverrides) {
  const RunConfig toy = build_config({{"env", "toy-covering"}});
  EXPECT_DOUBLE_EQ(toy.agent.epsilon, 0.01);
  EXPECT_EQ(toy.agent.k_prime, 1u);
  const RunConfig star = build_config({{"agent.k_prime", "7"}, {"env", "merge-star"}});
  EXPECT_EQ(star.agent.k_prime, 7u);
  EXPECT_EQ(build_config({{"env", "merge-star"}}).agent.k_prime, 0u);
}

TEST(Config, ParsesTextWithComments) {
  const Overrides o = parse_config_text(
      "# comment\nenv = toy-covering\n\nseeds = 1,2,3  # trailing\ntoy.n_states=4\n");
  ASSERT_EQ(o.size(), 3u);
  const RunConfig c = build_config(o);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(c.toy.n_states, 4u);
  EXPECT_DOUBLE_EQ(build_config({{"env.tau", "1/3"}, {"agent.epsilon", "0.1"}}).merge.tau,
                   1.0 / 3.0);
}

TEST(Config, ErrorsNameTheKey) {
  try {
    parse_config_text("agent.k = 5\nagent.k = 6\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "agent.k");
  }
  EXPECT_EQ(config_error_key({{"agent.kk", "5"}}), "agent.kk");
  EXPECT_EQ(config_error_key({{"agent.epsilon", "1"}}), "agent.epsilon");
  EXPECT_EQ(config_error_key({{"agent.k", "many"}}), "agent.k");
  EXPECT_EQ(config_error_key({{"env", "gridworld"}}), "env");
  EXPECT_EQ(config_error_key({{"env", "toy-covering"}, {"toy.kappa", "0.2"}}), "toy.kappa");
  EXPECT_THROW(parse_config_text("just words\n"), ConfigError);
}

TEST(Config, HashIgnoresSeedsAndOutput) {
  const RunConfig a = build_config({});
  const RunConfig b = build_config({{"seeds", "5,6"}, {"output", "/tmp/x"}, {"jobs", "3"}});
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash_hex(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash(build_config({{"agent.k", "999"}})));
  EXPECT_NE(config_hash(a), config_hash(build_config({{"merge.alpha1", "0.25"}})));
  // Same config, same hash, across builds.
  EXPECT_EQ(config_hash_hex(a), config_hash_hex(build_config({})));
  EXPECT_EQ(canonical_settings(a).at("agent.nu"), "auto");
}

TEST(Csv, Formatting) {
  EXPECT_EQ(format_real(0.0), "0");
  EXPECT_EQ(format_real(-0.0), "0");
  EXPECT_EQ(format_real(0.25), "0.25");
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(std::nan("")), "nan");
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::ostringstream out;
  write_csv_row(out, {"x", "y,z", "1"});
  EXPECT_EQ(out.str(), "x,\"y,z\",1\n");
}

TEST(Experiment, WritesFilesAndIsDeterministic) {
  const fs::path dir1 = scratch("det1"), dir2 = scratch("det2");
  Overrides o{{"env", "toy-covering"}, {"agent.k", "20"}, {"seeds", "3,4"}};
  o.push_back({"output", dir1.string()});
  const ExperimentResult r1 = run_experiment(build_config(o));
  o.back().second = dir2.string();
  o.push_back({"jobs", "2"});
  const ExperimentResult r2 = run_experiment(build_config(o));
  EXPECT_TRUE(r1.all_ok());
  EXPECT_EQ(r1.config_hash, r2.config_hash);
  for (const char* f : {"episodes_3.csv", "episodes_4.csv", "summary.csv", "covering.csv"}) {
    ASSERT_TRUE(fs::exists(dir1 / f)) << f;
    EXPECT_EQ(slurp(dir1 / f), slurp(dir2 / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir1 / "episodes_3.csv.tmp"));
  const std::string ep = slurp(dir1 / "episodes_3.csv");
  EXPECT_EQ(ep.substr(0, ep.find('\n')),
            "seed,episode,phase,return_true,regret_cum,violations_cum,wallclock_ms,config_hash");
  // Header plus one row per episode.
  EXPECT_EQ(std::count(ep.begin(), ep.end(), '\n'), 21);
  EXPECT_EQ(ep.find('\r'), std::string::npos);
  const std::string sum = slurp(dir1 / "summary.csv");
  EXPECT_EQ(sum.substr(0, sum.find('\n')),
            "seed,config_hash,v_star,total_regret,total_violations,sublinear_pass,"
            "optimism_rate,status");
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST(Experiment, FailingSeedIsRecorded) {
  RunConfig cfg = build_config({{"agent.k", "5"}});
  const auto env = make_environment(cfg);
  RunConfig broken = cfg;
  broken.agent.epsilon = 5.0;
  const SeedResult bad = run_seed(broken, *env, 2.5, 1, "h", nullptr);
  EXPECT_FALSE(bad.ok());
  EXPECT_EQ(bad.status.rfind("error: ", 0), 0u);
  const SeedResult good = run_seed(cfg, *env, 2.5, 2, "h", nullptr);
  EXPECT_TRUE(good.ok());
  EXPECT_EQ(good.ledger.size(), 5u);
  EXPECT_FALSE(good.sublinear.has_value());
}

TEST(Experiment, PropertiesVerdict) {
  ExperimentResult r;
  SeedResult s;
  s.sublinear = true;
  r.seeds = {s, s};
  EXPECT_TRUE(r.properties_hold());
  r.seeds[1].sublinear = false;
  r.seeds.push_back(s);
  EXPECT_TRUE(r.properties_hold());  // 2 of 3
  r.seeds[0].sublinear = false;
  EXPECT_FALSE(r.properties_hold());
  r.seeds = {s};
  r.seeds[0].ledger.record_episode(1.0, {CostVector{{0.9, 0.0}, 1}}, 0.5);
  EXPECT_FALSE(r.properties_hold());
}

TEST(Covering, ToyPacking) {
  const PackingResult p = toy_packing(30, 0.1, 2.0 / 3.0);
  EXPECT_EQ(p.count, 30u);
  EXPECT_NEAR(p.min_separation, 1.0 / 3.0, 1e-12);
}
