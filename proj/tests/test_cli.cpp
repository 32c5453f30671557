#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sphint_cli.hpp"

using namespace sphint;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sphint");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(SPHINT_SAMPLES_DIR) + "/" + name; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sphint_test_cli_" + name)).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST(Cli, ZeroTiltIsExactlyZero) {
  const auto r = invoke({"j", "--measure", "semicircle", "--theta", "0", "--lambda", "2.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_EQ(j["command"], "j");
  EXPECT_EQ(j["outputs"]["J"].get<double>(), 0.0);
  EXPECT_EQ(j["outputs"]["regime"], "zero-tilt");
  EXPECT_EQ(j["outputs"]["v_star"], "inf");
  EXPECT_TRUE(j["inputs_digest"].get<std::string>().starts_with("fnv1a64:"));
  EXPECT_FALSE(j.contains("seed"));
  EXPECT_FALSE(j.contains("wall_time_s"));
  EXPECT_NE(r.err.find("wall time"), std::string::npos);
}

TEST(Cli, JMatchesLibrary) {
  const auto r = invoke({"j", "--measure", "semicircle", "--theta", "0.5", "--lambda", "3", "--beta", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto expect = j_one(SpectralMeasure::semicircle(), 0.5, 3.0);
  EXPECT_EQ(r.json()["outputs"]["J"].get<double>(), expect.value);
  EXPECT_EQ(r.json()["outputs"]["scaled"].get<double>(), expect.value);
  EXPECT_EQ(r.json()["outputs"]["regime"], to_string(expect.regime));
  const auto f = invoke({"j", "--measure", sample("two_atom_measure.json"), "--theta", "1", "--lambda", "2"});
  EXPECT_EQ(f.code, 0) << f.err;
}

TEST(Cli, JMultiSplitsBySign) {
  const auto r = invoke({"j-multi", "--measure", "semicircle", "--thetas", "1.0,-0.5", "--lambdas", "2.6,-2.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto mu = SpectralMeasure::semicircle();
  const double expect = j_one(mu, 1.0, 2.6).value + j_one(mu, -0.5, -2.3).value;
  EXPECT_NEAR(r.json()["outputs"]["J"].get<double>(), expect, 1e-12);
  EXPECT_EQ(invoke({"j-multi", "--measure", "semicircle", "--thetas", "1", "--lambdas", "2,3"}).code, 2);
}

TEST(Cli, RateAtEdgeIsZero) {
  const auto r = invoke({"rate", "wigner", "--x", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["outputs"]["value"].get<double>(), 0.0);
  const auto below = invoke({"rate", "wigner", "--x", "1"});
  EXPECT_EQ(below.json()["outputs"]["value"], "inf");
}

TEST(Cli, GridFormats) {
  const auto j = invoke({"rate", "wigner", "--grid", "2:3:4"});
  ASSERT_EQ(j.code, 0) << j.err;
  const auto rows = j.json()["outputs"]["rows"];
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[4][0].get<double>(), 3.0);
  EXPECT_NEAR(rows[2][1].get<double>(), wigner_rate(2.5, 1), 1e-14);

  const auto csv = invoke({"rate", "wigner", "--grid", "2:3:4", "--format", "csv"});
  ASSERT_EQ(csv.code, 0);
  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "x,value");
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 5);

  const auto dat = invoke({"--format", "dat", "rate", "wigner", "--grid", "2:3:2"});
  ASSERT_EQ(dat.code, 0);
  EXPECT_TRUE(dat.out.starts_with("# x value\n2 0\n"));

  const auto flat = invoke({"rate", "wigner", "--x", "2.5", "--format", "csv"});
  EXPECT_NE(flat.out.find("value,"), std::string::npos);
  EXPECT_EQ(flat.out.find("normalization"), std::string::npos);
}

TEST(Cli, PerturbedRatesReportArgmin) {
  const auto w = invoke({"rate", "perturbed-wigner", "--theta", "2", "--x", "2.5"});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NEAR(w.json()["outputs"]["argmin"].get<double>(), 2.5, 1e-6);
  EXPECT_NEAR(w.json()["outputs"]["value"].get<double>(), 0.0, 1e-8);
  const auto s = invoke({"rate", "perturbed-wishart", "--gamma", "1", "--alpha", "0.25", "--x", "3"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NEAR(s.json()["outputs"]["argmin"].get<double>(), 2.5, 1e-6);
}

TEST(Cli, AnnealedCommands) {
  const auto w = invoke({"annealed", "wishart", "--theta", "0.3", "--alpha", "0.5"});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NEAR(w.json()["outputs"]["value"].get<double>(), annealed_lambda_wishart(0.3, 0.5).value, 1e-14);
  const auto neg = invoke({"annealed", "profile", "--theta", "0.5", "--profile", sample("profile_negative.json")});
  ASSERT_EQ(neg.code, 0) << neg.err;
  EXPECT_TRUE(neg.json()["outputs"]["assumption"]["negative"].get<bool>());
  const auto id = invoke({"annealed", "profile", "--theta", "0.5", "--profile", sample("profile_identity.json")});
  EXPECT_EQ(id.code, 2);
  EXPECT_NE(id.err.find("error"), std::string::npos);
  const auto forced =
      invoke({"annealed", "profile", "--theta", "0.5", "--profile", sample("profile_identity.json"), "--no-enforce"});
  EXPECT_EQ(forced.code, 0) << forced.err;
}

TEST(Cli, IntervalCost) {
  const auto r = invoke({"interval-cost", "--spec", sample("interval_cost_wigner.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.json()["outputs"]["cost"].get<double>(), wigner_rate(2.5, 1) + 2.0 * wigner_rate(3.5, 1), 1e-10);
  const auto p = invoke({"interval-cost", "--spec", sample("interval_cost_perturbed_wishart.json")});
  EXPECT_EQ(p.code, 0) << p.err;
}

TEST(Cli, MeasureCommand) {
  const auto r = invoke({"measure", "--measure", "mp:0.25", "--z", "3", "--theta", "10", "--v", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto mu = SpectralMeasure::marchenko_pastur(0.25);
  const auto o = r.json()["outputs"];
  EXPECT_NEAR(o["right"].get<double>(), 2.25, 1e-14);
  EXPECT_EQ(o["stieltjes"].get<double>(), stieltjes(mu, 3.0));
  EXPECT_EQ(o["log_potential"].get<double>(), log_potential(mu, 3.0));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"j", "--measure", "semicircle", "--theta", "1"}).code, 2);
  EXPECT_EQ(invoke({"j", "--measure", "circle", "--theta", "1", "--lambda", "3"}).code, 2);
  EXPECT_EQ(invoke({"j", "--measure", "semicircle", "--theta", "1", "--lambda", "1"}).code, 2);
  EXPECT_EQ(invoke({"rate", "wigner", "--x", "2", "--beta", "4"}).code, 2);
  EXPECT_EQ(invoke({"rate", "wigner"}).code, 2);
  EXPECT_EQ(invoke({"rate", "wishart", "--x", "3"}).code, 2);
  EXPECT_EQ(invoke({"rate", "wigner", "--grid", "3:2"}).code, 2);
  const auto bad = temp_path("malformed.json");
  write_text(bad, "{\"etas\": [1, 2");
  EXPECT_EQ(invoke({"mc-verify", "--model", bad, "--thetas", "1"}).code, 2);
  EXPECT_EQ(invoke({"interval-cost", "--spec", bad}).code, 2);
  EXPECT_EQ(invoke({"interval-cost", "--spec", temp_path("does_not_exist.json")}).code, 2);
  std::filesystem::remove(bad);
}

TEST(Cli, McVerifyIsReproducible) {
  const std::vector<std::string> args = {"mc-verify", "--model", sample("delta_outlier_model.json"), "--thetas",
                                         "2", "--samples", "4000", "--seed", "11"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = a.json();
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 11u);
  EXPECT_NEAR(j["outputs"]["asymptotic"].get<double>(), 0.5 * (1.0 - std::log(2.0)), 1e-12);
  EXPECT_LT(j["outputs"]["gap"].get<double>(), 0.05);
  const auto timed = invoke({"mc-verify", "--model", sample("delta_outlier_model.json"), "--thetas", "2", "--samples",
                          "500", "--timing"});
  EXPECT_TRUE(timed.json().contains("wall_time_s"));
}

TEST(Cli, McVerifyOnMeasureModel) {
  const auto r = invoke({"mc-verify", "--model", sample("semicircle_outliers.json"), "--thetas", "1,0.5", "--n",
                      "200", "--samples", "4000", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(r.json()["outputs"]["gap"].get<double>(), 0.1);
  EXPECT_EQ(invoke({"mc-verify", "--model", sample("three_atom_model.json"), "--thetas", "1", "--n", "7"}).code, 2);
}

TEST(Cli, ReplayReproducesOutputs) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"j", "--measure", "mp:0.5", "--theta", "0.7", "--lambda", "3.2"},
        std::vector<std::string>{"mc-verify", "--model", sample("three_atom_model.json"), "--thetas", "1.5",
                                 "--samples", "2000", "--seed", "5"}}) {
    const auto first = invoke(args);
    ASSERT_EQ(first.code, 0) << first.err;
    const auto path = temp_path("report.json");
    write_text(path, first.out);
    const auto again = invoke({"replay", "--report", path});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(again.json()["outputs"], first.json()["outputs"]);
    EXPECT_EQ(again.json()["inputs_digest"], first.json()["inputs_digest"]);
    std::filesystem::remove(path);
  }
}

TEST(Cli, SampleWritesMatrix) {
  const auto path = temp_path("goe.bin");
  const auto r = invoke({"sample", "goe", "--n", "20", "--seed", "4", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_matrix(path);
  EXPECT_EQ(std::get<Eigen::MatrixXd>(m), std::get<Eigen::MatrixXd>(sample_matrix({MatrixKind::Goe}, 20, 4)));
  EXPECT_EQ(r.json()["outputs"]["dtype"], "real");
  const auto g = invoke({"sample", "gue", "--n", "5", "--beta", "2"});
  EXPECT_EQ(g.json()["outputs"]["dtype"], "complex");
  std::filesystem::remove(path);
}

TEST(Cli, DigestIsStable) {
  const Json a = {{"b", 1}, {"a", 2}};
  const Json b = {{"a", 2}, {"b", 1}};
  EXPECT_EQ(cli::digest(a), cli::digest(b));
  EXPECT_NE(cli::digest(a), cli::digest(Json{{"a", 3}, {"b", 1}}));
  EXPECT_EQ(cli::fnv1a64(""), 0xcbf29ce484222325ULL);
}
