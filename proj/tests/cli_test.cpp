#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "asdrc/cli.hpp"

namespace {

namespace cli = asdrc::cli;
namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "asdrc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("asdrc_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const json& doc, const std::string& name = "config.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << doc.dump(2);
    return p.string();
  }

  // Default document with a 3-period horizon for quick runs.
  static json short_doc() {
    json doc = json::parse(cli::default_config_json());
    doc["simulation"]["horizon_periods"] = 3;
    doc["simulation"]["bound_window_periods"] = 1;
    return doc;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

// Start/end tag balance; enough to catch truncated or interleaved markup.
bool balanced_xml(const std::string& text) {
  static const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
  std::vector<std::string> stack;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3].length()) continue;  // self-closing
    if (m[1].length()) {
      if (stack.empty() || stack.back() != m[2].str()) return false;
      stack.pop_back();
    } else {
      stack.push_back(m[2].str());
    }
  }
  return stack.empty();
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Config, DefaultsRoundTrip) {
  const cli::ToolConfig parsed = cli::parse_config(cli::default_config_json());
  const cli::ToolConfig def;
  EXPECT_EQ(parsed.Ts, 0.1);
  EXPECT_EQ(parsed.q_taps, def.q_taps);
  EXPECT_EQ(parsed.weight_variants, def.weight_variants);
  EXPECT_EQ(parsed.signals.T_nominal, def.signals.T_nominal);
  EXPECT_EQ(parsed.plant.p, def.plant.p);
  EXPECT_EQ(parsed.sweep_alphas.size(), 9u);
  EXPECT_EQ(parsed.N(), 209);
  EXPECT_TRUE(parsed.allow_uncertified);
  EXPECT_FALSE(parsed.linear_model.has_value());
}

TEST(Config, MissingFieldIsNamed) {
  json doc = json::parse(cli::default_config_json());
  doc["design"].erase("Ts");
  try {
    cli::parse_config(doc.dump());
    FAIL() << "expected ConfigError";
  } catch (const cli::ConfigError& e) {
    EXPECT_EQ(e.field(), "design.Ts");
  }
}

TEST(Config, RejectsUnknownAndMistypedFields) {
  json doc = json::parse(cli::default_config_json());
  doc["plant"]["mass"] = 1.0;
  EXPECT_THROW(cli::parse_config(doc.dump()), cli::ConfigError);
  doc = json::parse(cli::default_config_json());
  doc["simulation"]["horizon_periods"] = 2.5;
  try {
    cli::parse_config(doc.dump());
    FAIL();
  } catch (const cli::ConfigError& e) {
    EXPECT_EQ(e.field(), "simulation.horizon_periods");
  }
}

TEST(Config, MalformedJsonReportsPosition) {
  try {
    cli::parse_config("{\n  \"plant\": {\n    \"J_l\": 2,,\n");
    FAIL();
  } catch (const cli::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, WeightSumAndStepRatiosValidated) {
  json doc = json::parse(cli::default_config_json());
  doc["design"]["weight_variants"] = json::array({json::array({0.5, 0.4})});
  try {
    cli::parse_config(doc.dump());
    FAIL();
  } catch (const cli::ConfigError& e) {
    EXPECT_EQ(e.field(), "design.weight_variants[0]");
  }
  doc = json::parse(cli::default_config_json());
  doc["simulation"]["T_ss"] = 0.0105;
  EXPECT_THROW(cli::parse_config(doc.dump()), cli::ConfigError);
  doc = json::parse(cli::default_config_json());
  doc["plant"]["p"] = json::array({0, 0, 0, 0});  // A0 alone is unstable
  EXPECT_THROW(cli::parse_config(doc.dump()), cli::ConfigError);
}

TEST_F(CliTest, ExitCodesAreDistinct) {
  EXPECT_EQ(invoke({"--out", dir_.string(), "discretize"}).code, cli::kExitOk);
  // The default higher-order variant is not certified by the margin test.
  EXPECT_EQ(invoke({"--out", dir_.string(), "design"}).code, cli::kExitCheckFailed);
  std::ofstream(dir_ / "empty.json") << "";
  const auto empty = invoke({"--config", (dir_ / "empty.json").string(), "discretize"});
  EXPECT_EQ(empty.code, cli::kExitConfigError);
  EXPECT_NE(empty.err.find("config error"), std::string::npos);
  EXPECT_EQ(invoke({}).code, cli::kExitConfigError);
  EXPECT_EQ(invoke({"--bogus", "design"}).code, cli::kExitConfigError);
  EXPECT_EQ(invoke({"--config", (dir_ / "missing.json").string(), "design"}).code, cli::kExitConfigError);
}

TEST_F(CliTest, SeedDefaultsPrintsParsableConfig) {
  const auto o = invoke({"--seed-defaults"});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out, cli::default_config_json());
  EXPECT_NO_THROW(cli::parse_config(o.out));
}

TEST_F(CliTest, MissingTsIsReportedByField) {
  json doc = json::parse(cli::default_config_json());
  doc["design"].erase("Ts");
  const auto o = invoke({"--config", write_config(doc), "discretize"});
  EXPECT_EQ(o.code, cli::kExitConfigError);
  EXPECT_NE(o.err.find("design.Ts"), std::string::npos) << o.err;
}

TEST_F(CliTest, DiscretizeDefaultsMatchesFactoredPlant) {
  const auto o = invoke({"--out", dir_.string(), "discretize"});
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("9.889e-08 (z + 9.399) (z + 0.9493) (z + 0.09589)"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("(z - 0.9231) (z - 0.9324) (z - 0.9418) (z - 0.9512)"), std::string::npos) << o.out;
  const auto ls = lines_of(slurp(dir_ / "discretize.csv"));
  ASSERT_EQ(ls.size(), 6u);
  EXPECT_EQ(ls[0], "power,numerator,denominator");
  EXPECT_EQ(ls[5].substr(0, 4), "4,0,");
}

TEST_F(CliTest, DiscretizeScalarToyPlant) {
  json doc = json::parse(cli::default_config_json());
  doc["linear_model"] = {{"A", {{-1.0}}}, {"b", {1.0}}, {"c", {1.0}}, {"Ts", 1.0}};
  const auto o = invoke({"--config", write_config(doc), "--out", dir_.string(), "discretize"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto ls = lines_of(slurp(dir_ / "discretize.csv"));
  ASSERT_EQ(ls.size(), 3u);
  double num0 = 0, den0 = 0, num1 = 0, den1 = 0;
  std::sscanf(ls[1].c_str(), "0,%lf,%lf", &num0, &den0);
  std::sscanf(ls[2].c_str(), "1,%lf,%lf", &num1, &den1);
  EXPECT_NEAR(num0, 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(den0, -std::exp(-1.0), 1e-15);
  EXPECT_EQ(num1, 0.0);
  EXPECT_EQ(den1, 1.0);
  // The arm-only commands refuse an explicit linear model.
  EXPECT_EQ(invoke({"--config", write_config(doc), "--out", dir_.string(), "simulate"}).code, cli::kExitConfigError);
}

TEST_F(CliTest, DesignReportsMarginsAndViolation) {
  const auto o = invoke({"--out", dir_.string(), "design"});
  EXPECT_NE(o.out.find("W = 1\n"), std::string::npos);
  EXPECT_NE(o.out.find("PASS margin < 1"), std::string::npos);
  EXPECT_NE(o.out.find("W = 2 - z^-N"), std::string::npos);
  EXPECT_NE(o.out.find("advance a = 1"), std::string::npos);

  json doc = json::parse(cli::default_config_json());
  doc["design"]["q_taps"] = {2.0, -1.0};
  doc["design"]["weight_variants"] = json::array({json::array({1.0})});
  const auto rough = invoke({"--config", write_config(doc), "design"});
  EXPECT_EQ(rough.code, cli::kExitCheckFailed);
  EXPECT_NE(rough.out.find("FAIL margin >= 1 (violated at omega ="), std::string::npos) << rough.out;
}

TEST_F(CliTest, FreqrespWritesCurvesAndChart) {
  const auto o = invoke({"--out", dir_.string(), "freqresp"});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* name : {"sensitivity_w1.csv", "sensitivity_w2.csv"}) {
    const auto ls = lines_of(slurp(dir_ / name));
    EXPECT_EQ(ls.size(), 2001u);
    EXPECT_EQ(ls[0], "omega_rad_s,magnitude");
  }
  const std::string svg = slurp(dir_ / "freqresp.svg");
  EXPECT_TRUE(balanced_xml(svg));
  EXPECT_EQ(count_of(svg, "<polyline"), 2u);
  EXPECT_EQ(svg.find("href"), std::string::npos);
  EXPECT_NE(o.out.find("|S(0)| = 0,"), std::string::npos) << o.out;
}

TEST_F(CliTest, SimulateAndSweepAgreeAtNominalPeriod) {
  json doc = short_doc();
  const std::string cfg = write_config(doc);
  const auto sim = invoke({"--config", cfg, "--out", (dir_ / "a").string(), "simulate"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto sw = invoke({"--config", cfg, "--out", (dir_ / "a").string(), "--workers", "2", "sweep"});
  ASSERT_EQ(sw.code, 0) << sw.err;

  const auto rows = lines_of(slurp(dir_ / "a" / "sweep.csv"));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], "alpha,bound_w1,bound_w2");
  const std::string zero_row = rows[5];
  ASSERT_EQ(zero_row.substr(0, 2), "0,");
  const auto comma = zero_row.find(',', 2);
  const std::string w1 = zero_row.substr(2, comma - 2), w2 = zero_row.substr(comma + 1);
  EXPECT_NE(sim.out.find("W = 1: alpha = 0, ultimate bound = " + w1 + " rad"), std::string::npos) << sim.out;
  EXPECT_NE(sim.out.find("W = 2 - z^-N: alpha = 0, ultimate bound = " + w2 + " rad"), std::string::npos);

  const std::string svg = slurp(dir_ / "a" / "sweep.svg");
  EXPECT_TRUE(balanced_xml(svg));
  EXPECT_EQ(count_of(svg, "<polyline"), 2u);
  EXPECT_TRUE(balanced_xml(slurp(dir_ / "a" / "tracking_error.svg")));
  EXPECT_EQ(lines_of(slurp(dir_ / "a" / "simulate_w1.csv"))[0],
            "t,x1,x2,x3,x4,y,r,e,u,up,us,yp_hat,xs_hat1,xs_hat2,xs_hat3,xs_hat4");
}

TEST_F(CliTest, OutputsAreByteIdenticalAcrossRunsAndWorkers) {
  json doc = short_doc();
  doc["sweep"]["alphas"] = {-0.01, 0.0, 0.02};
  const std::string cfg = write_config(doc);
  ASSERT_EQ(invoke({"--config", cfg, "--out", (dir_ / "a").string(), "--workers", "1", "sweep"}).code, 0);
  ASSERT_EQ(invoke({"--config", cfg, "--out", (dir_ / "b").string(), "--workers", "3", "sweep"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "sweep.csv"), slurp(dir_ / "b" / "sweep.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "sweep.svg"), slurp(dir_ / "b" / "sweep.svg"));
  ASSERT_EQ(invoke({"--config", cfg, "--out", (dir_ / "a").string(), "simulate"}).code, 0);
  ASSERT_EQ(invoke({"--config", cfg, "--out", (dir_ / "b").string(), "simulate"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "simulate_w2.csv"), slurp(dir_ / "b" / "simulate_w2.csv"));
}

TEST_F(CliTest, CheckPassesOnDefaults) {
  const auto o = invoke({"--config", write_config(short_doc()), "check"});
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_EQ(count_of(o.out, "FAIL"), 0u);
  for (const char* name : {"PASS decomposition", "PASS observer", "PASS rk4 order", "PASS filter equivalence",
                           "PASS secondary loop iss"})
    EXPECT_NE(o.out.find(name), std::string::npos) << name;
}

TEST_F(CliTest, SimulationFailureSetsNonzeroExit) {
  json doc = short_doc();
  doc["plant"]["x0"] = {2e6, 0, 0, 0};
  const auto o = invoke({"--config", write_config(doc), "--out", dir_.string(), "simulate"});
  EXPECT_EQ(o.code, cli::kExitCheckFailed);
  EXPECT_NE(o.err.find("exceeded"), std::string::npos) << o.err;

  // A sweep records the failure per cell, still writes its table, and exits 1.
  const auto sw = invoke({"--config", write_config(doc), "--out", dir_.string(), "sweep"});
  EXPECT_EQ(sw.code, cli::kExitCheckFailed);
  EXPECT_EQ(lines_of(slurp(dir_ / "sweep.csv")).size(), 10u);
}

TEST(Svg, GapsSplitPolylinesAndTextIsEscaped) {
  cli::Series s{"a<b & c", {1, 2, 3, 4, 5}, {1, 2, std::nan(""), 4, 5}};
  const std::string svg = cli::line_chart_svg({"t", "x", "y", false, false}, {s});
  EXPECT_EQ(count_of(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find("a&lt;b &amp; c"), std::string::npos);
  EXPECT_TRUE(balanced_xml(svg));
}

}  // namespace
