#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "tiltcut/error.hpp"
#include "tiltcut_cli/scenario.hpp"

using namespace tiltcut;
using namespace tiltcut::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("tiltcut_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TILTCUT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST(ConfigGrammar, ParsesKeysListsAndComments) {
  const auto c = parse_config("# header\nmode = exact   # trailing\n\nbeta = 1, 2,3\n  family=complete\n");
  EXPECT_EQ(c.at("mode"), "exact");
  EXPECT_EQ(c.at("beta"), "1, 2,3");
  EXPECT_EQ(c.at("family"), "complete");
  EXPECT_THROW(parse_config("mode = exact\nmode = barriers\n"), ValidationError);
  EXPECT_THROW(parse_config("just words\n"), ValidationError);
  EXPECT_THROW(parse_config("mode =\n"), ValidationError);
}

TEST(Resolve, RejectsBadScenarios) {
  EXPECT_THROW(resolve({{"mode", "barriers"}, {"family", "complete"}, {"n", "4"}, {"colour", "red"}}), ValidationError);
  EXPECT_THROW(resolve({{"mode", "simulate"}, {"family", "complete"}, {"n", "3"}, {"beta", "1"}, {"trials", "0"}}),
               ValidationError);
  EXPECT_THROW(resolve({{"mode", "exact"}, {"family", "complete"}, {"n", "3"}}), ValidationError);
  EXPECT_THROW(resolve({{"mode", "teleport"}, {"family", "complete"}}), ValidationError);
  EXPECT_THROW(resolve({{"mode", "barriers"}}), ValidationError);
  EXPECT_THROW(resolve({{"mode", "barriers"}, {"family", "complete"}, {"n", "3"}, {"h", "1"}, {"fields", "1,1,1"}}),
               ValidationError);
  EXPECT_THROW(resolve({{"mode", "bounds"}, {"family", "complete"}, {"n", "3"}, {"L1", "1"}}), ValidationError);
  EXPECT_THROW(resolve({{"mode", "barriers"}, {"family", "complete"}, {"n", "x"}}), ValidationError);
  EXPECT_THROW(resolve({{"mode", "exact"}, {"family", "complete"}, {"n", "3"}, {"beta", "1"}, {"kernel", "ellison"}}),
               ValidationError);
}

TEST(Resolve, FieldsFromPayoffsAndLists) {
  auto s = resolve({{"mode", "barriers"}, {"family", "cycle_power"}, {"n", "6"}, {"k", "1"}, {"payoff", "2,1,0,0"}});
  EXPECT_DOUBLE_EQ(build_network(s).field(0), 2.0 / 3.0);
  s = resolve({{"mode", "barriers"}, {"family", "complete"}, {"n", "3"}, {"fields", "0.5, 1, 2"}});
  EXPECT_EQ(build_network(s).fields(), (std::vector<double>{0.5, 1.0, 2.0}));
  s = resolve({{"mode", "barriers"}, {"family", "complete"}, {"n", "3"}, {"fields", "0.5, 1"}});
  EXPECT_THROW(build_network(s), ValidationError);
}

TEST(ConfigHash, CanonicalAndOutputIndependent) {
  const ConfigMap a{{"mode", "exact"}, {"family", "complete"}, {"n", "3"}, {"beta", "1,2"}, {"out", "x"}};
  ConfigMap b = a;
  b["out"] = "elsewhere";
  b["beta"] = "1.0, 2";
  EXPECT_EQ(resolve(a).config_hash(), resolve(b).config_hash());
  ConfigMap c = a;
  c["beta"] = "1,3";
  EXPECT_NE(resolve(a).config_hash(), resolve(c).config_hash());
  EXPECT_EQ(resolve(a).config_hash().size(), 16U);
}

TEST(Cli, BarriersModeOnK4) {
  TempDir dir;
  write(dir / "k4.cfg", "mode = barriers\nfamily = complete\nn = 4\nh = 0\n");
  ASSERT_EQ(run_cli("--config " + (dir / "k4.cfg").string() + " --out " + (dir / "o").string()), 0);
  const auto j = load_json(dir / "o" / "barriers.json");
  EXPECT_EQ(j["result"]["gamma_star"].get<double>(), 4.0);
  EXPECT_TRUE(j["result"]["duality_holds"].get<bool>());
  EXPECT_EQ(j["library_version"], TILTCUT_VERSION);
  EXPECT_EQ(j["config"]["mode"], "barriers");
}

TEST(Cli, ExactModeSandwichBracketsGeometricQuantile) {
  TempDir dir;
  write(dir / "e.cfg", "mode = exact\nfamily = complete\nn = 1\nh = 1\n");
  ASSERT_EQ(run_cli("--config " + (dir / "e.cfg").string() + " --beta 2 --out " + (dir / "o").string()), 0);
  const auto rec = load_json(dir / "o" / "exact.json")["result"]["records"][0];
  const double q = 1.0 / (1.0 + std::exp(4.0));
  const double tau = 1.0 / std::log(1.0 / q);
  EXPECT_NEAR(rec["tau_steps"].get<double>(), tau, 1e-12);
  EXPECT_LE(rec["sandwich_lower_steps"].get<double>(), tau);
  EXPECT_GE(rec["sandwich_upper_steps"].get<double>(), tau);
  EXPECT_TRUE(rec["inside_sandwich"].get<bool>());
  EXPECT_EQ(rec["kernel"], "glauber");
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  write(dir / "s.cfg", "mode = simulate\nfamily = complete\nn = 3\nbeta = 1\ntrials = 0\n");
  EXPECT_EQ(run_cli("--config " + (dir / "s.cfg").string() + " --out " + (dir / "s").string()), 2);
  EXPECT_FALSE(fs::exists(dir / "s"));
  write(dir / "c.cfg", "mode = exact\nfamily = complete\nn = 9\nbeta = 1\n");
  EXPECT_EQ(run_cli("--config " + (dir / "c.cfg").string() + " --cap-exact-n 8 --out " + (dir / "c").string()), 3);
  write(dir / "b.cfg", "mode = barriers\nfamily = complete\nn = 13\n");
  EXPECT_EQ(run_cli("--config " + (dir / "b.cfg").string() + " --out " + (dir / "b").string()), 3);
  write(dir / "blocker", "not a directory");
  write(dir / "k.cfg", "mode = barriers\nfamily = complete\nn = 3\n");
  EXPECT_EQ(run_cli("--config " + (dir / "k.cfg").string() + " --out " + (dir / "blocker" / "x").string()), 1);
  EXPECT_EQ(run_cli("--no-such-flag"), 2);
  EXPECT_EQ(run_cli("--config " + (dir / "missing.cfg").string()), 2);
}

TEST(Cli, FlagsOverrideFileKeys) {
  TempDir dir;
  write(dir / "s.cfg", "mode = barriers\nfamily = complete\nn = 3\nseed = 1\n");
  ASSERT_EQ(run_cli("--config " + (dir / "s.cfg").string() + " --seed 9 --mode exact --beta 1 --beta 2 --out " +
                    (dir / "o").string()),
            0);
  const auto j = load_json(dir / "o" / "exact.json");
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 9U);
  EXPECT_EQ(j["result"]["records"].size(), 2U);
}

TEST(Cli, SimulateWritesProvenancePerRow) {
  TempDir dir;
  write(dir / "s.cfg", "mode = simulate\nfamily = complete\nn = 3\nh = 0.5\nbeta = 0.5, 1, 1.5\ntrials = 200\nseed = 4\n");
  ASSERT_EQ(run_cli("--config " + (dir / "s.cfg").string() + " --out " + (dir / "o").string()), 0);
  std::istringstream csv(slurp(dir / "o" / "trials.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "trial_id,seed,beta,family,n,T_plus_sweeps,censored,root_seed,config_hash,library_version");
  int rows = 0;
  const std::string hash = resolve(parse_config(slurp(dir / "s.cfg"))).config_hash();
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_NE(line.find("," + hash + "," + TILTCUT_VERSION), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 600);
  std::istringstream rep(slurp(dir / "o" / "exponent_report.csv"));
  std::getline(rep, line);
  EXPECT_NE(line.find("gamma_star"), std::string::npos);
  int report_rows = 0;
  while (std::getline(rep, line)) {
    ++report_rows;
    EXPECT_NE(line.find(hash), std::string::npos);
  }
  EXPECT_EQ(report_rows, 3);
}

TEST(Cli, NonMonotoneKernelScansRandomStarts) {
  TempDir dir;
  write(dir / "s.cfg",
        "mode = simulate\nfamily = complete\nn = 3\nh = 0.5\nkernel = ellison\nbeta = 0.3\ntrials = 100\n"
        "random_starts = 3\n");
  ASSERT_EQ(run_cli("--config " + (dir / "s.cfg").string() + " --out " + (dir / "o").string()), 0);
  const auto b = load_json(dir / "o" / "summary.json")["result"]["per_beta"][0];
  EXPECT_EQ(b["random_starts"].size(), 3U);
  EXPECT_TRUE(b["worst_start_is_lower_bound_on_sup"].get<bool>());
}

TEST(Cli, ReplayIsByteIdentical) {
  TempDir dir;
  write(dir / "s.cfg", "mode = simulate\nfamily = cycle_power\nn = 5\nk = 1\nh = 0.3\nbeta = 0.5,1\ntrials = 300\nseed = 7\nworkers = 3\n");
  ASSERT_EQ(run_cli("--config " + (dir / "s.cfg").string() + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("--config " + (dir / "s.cfg").string() + " --out " + (dir / "b").string()), 0);
  for (const auto& name : {"trials.csv", "summary.json", "exponent_report.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
  }
}

TEST(ExponentReport, SyntheticExactExponent) {
  const double gs = 1.25;
  std::vector<BetaPoint> pts;
  for (double b : {3.0, 1.0, 2.0}) pts.push_back({b, std::exp(2.0 * b * gs)});
  const auto rows = exponent_report(gs, pts);
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_EQ(rows[0].beta, 1.0);
  for (const auto& r : rows) {
    EXPECT_EQ(r.flag, "ok");
    EXPECT_NEAR(r.slope_discrepancy, 0.0, 1e-12);
  }
  EXPECT_NEAR(rows[2].local_discrepancy, 0.0, 1e-12);
  EXPECT_TRUE(std::isnan(rows[0].local_slope));
}

TEST(ExponentReport, NegativeGammaClampedOnlyInComparison) {
  std::vector<BetaPoint> pts{{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}};
  const auto rows = exponent_report(-0.5, pts);
  EXPECT_EQ(rows[0].gamma_star, -0.5);
  EXPECT_EQ(rows[0].gamma_star_clamped, 0.0);
  EXPECT_NEAR(rows[0].slope_discrepancy, 0.0, 1e-12);
}

TEST(ExponentReport, CensoredRunSuppressesSlope) {
  std::vector<BetaPoint> pts{{1.0, 5.0}, {2.0, 50.0}, {3.0, std::numeric_limits<double>::infinity(), true}};
  for (const auto& r : exponent_report(1.0, pts)) {
    EXPECT_EQ(r.flag, "censored");
    EXPECT_TRUE(std::isnan(r.slope));
  }
}
