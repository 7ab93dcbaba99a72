#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ptrg/cli.hpp"
#include "ptrg/error.hpp"

using namespace ptrg;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir{PTRG_CONFIG_DIR};

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ptrg_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kXyzModel = R"("model": {"family": "xyz-field", "N": 2, "epsilon": [0.1, 0.3], "g": 0.1,
  "delta": {"re": 0.0, "im": 0.5}, "lambda": {"re": 0.0, "im": 0.5}})";

}  // namespace

TEST(ParseConfig, EveryBundledConfigParses) {
  int count = 0;
  for (const auto& e : fs::directory_iterator(kConfigDir)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(cli::parse_config(slurp(e.path()))) << e.path();
    ++count;
  }
  EXPECT_GE(count, 14);
}

TEST(ParseConfig, RejectsUnknownKeys) {
  try {
    cli::parse_config(std::string("{") + kXyzModel + R"(, "task": {"type": "spectrum", "tolerance": 1}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_validation());
    EXPECT_NE(std::string(e.what()).find("tolerance"), std::string::npos);
  }
}

TEST(ParseConfig, DuplicateEpsilonMessage) {
  const std::string text = R"({"model": {"family": "xxz-rational", "N": 2, "epsilon": [0.2, 0.2], "g": 0.1},
    "task": {"type": "charges"}})";
  try {
    cli::parse_config(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "epsilon entries must be distinct");
  }
}

TEST(ParseConfig, ModelRequiredExceptForCouplings) {
  EXPECT_THROW(cli::parse_config(R"({"task": {"type": "spectrum"}})"), Error);
  EXPECT_NO_THROW(cli::parse_config(R"({"task": {"type": "couplings", "d": [1.0]}})"));
}

TEST(Run, ValidationErrorExitsWithTwo) {
  const auto dir = scratch("validation");
  const auto cfg = write_config(dir, R"({"task": {"type": "nonsense"}})");
  std::ostringstream err;
  const auto r = cli::run({cfg, dir / "out", 0, false}, err);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(err.str().find("ptrg: error: "), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "summary.json"));
}

TEST(Run, NumericalErrorExitsWithThree) {
  // Transverse fields comparable to the level spacing lose eigenvalue tracking.
  const auto dir = scratch("numerical");
  const auto cfg = write_config(dir, R"({"model": {"family": "xyz-field", "N": 4, "epsilon": [0.1, 0.3, 0.5, 0.7],
    "g": 0.1, "delta": {"re": 0.0, "im": 0.5}, "lambda": {"re": 0.0, "im": 0.5}},
    "task": {"type": "perturb", "bz_from_epsilon": true, "scales": [0.1, 0.2, 0.5, 1.0]}})");
  std::ostringstream err;
  const auto r = cli::run({cfg, dir / "out", 0, false}, err);
  EXPECT_EQ(r.exit_code, 3) << err.str();
}

TEST(Run, SummaryRoundTrip) {
  const auto dir = scratch("summary");
  const std::string text = std::string("{") + kXyzModel + R"(, "task": {"type": "charges"}})";
  const auto cfg = write_config(dir, text);
  std::ostringstream err;
  const auto r = cli::run({cfg, dir / "out", 0, true}, err);
  ASSERT_EQ(r.exit_code, 0) << err.str();
  const auto s = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  EXPECT_EQ(s["config"], nlohmann::json::parse(text));
  EXPECT_EQ(s["task"], "charges");
  EXPECT_EQ(s["model_family"], "xyz-field");
  EXPECT_EQ(s["seedless"], true);
  EXPECT_EQ(s["randomness_used"], false);
  EXPECT_EQ(s["exit_status"], 0);
  EXPECT_EQ(s["metrics"]["kappa"], 1.0);
  for (const auto& f : s["files"]) EXPECT_TRUE(fs::exists(dir / "out" / f.get<std::string>())) << f;
  EXPECT_EQ(s.dump().find("wall"), std::string::npos);
}

TEST(Couplings, SpotValues) {
  const auto csv = cli::couplings_csv({0.5, 1.5707963267948966, 20.0});
  EXPECT_NE(csv.find("rational,0.5,2,2,0\n"), std::string::npos) << csv;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "family,d,gamma_x,gamma_z,nearest_pole");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 5u);
    const double d = std::stod(cols[1]), gx = std::stod(cols[2]), gz = std::stod(cols[3]);
    if (cols[0] == "rational") {
      EXPECT_DOUBLE_EQ(gx, 1 / d);
      EXPECT_DOUBLE_EQ(gz, 1 / d);
    } else if (cols[0] == "trigonometric") {
      EXPECT_NEAR(gx, 1 / std::sin(d), 1e-15);
      EXPECT_NEAR(gz, std::cos(d) / std::sin(d), 1e-15);
    } else {
      EXPECT_EQ(cols[0], "hyperbolic");
      EXPECT_NEAR(gx, 1 / std::sinh(d), 1e-15);
      EXPECT_NEAR(gz, std::cosh(d) / std::sinh(d), 1e-15);
    }
  }
  EXPECT_EQ(rows, 9);
}

TEST(Couplings, GridOnPoleRejected) {
  EXPECT_THROW(cli::couplings_csv({0.0}), Error);
  EXPECT_THROW(cli::couplings_csv({3.141592653589793}), Error);
}

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.123233995736766e-17}) EXPECT_EQ(std::stod(cli::format_double(x)), x);
}
