#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "experiment/config.hpp"
#include "experiment/runner.hpp"
#include "fdlsm/errors.hpp"

using namespace fdlsm;
using namespace fdlsm::experiment;
using nlohmann::json;

namespace {

json bermudan_doc() {
  return json::parse(R"({
    "experiment": "bermudan",
    "model": {"type": "black_scholes", "rate": 0.0396, "dimension": 1, "vols": 0.3},
    "product": {"type": "bermudan", "option": "put", "strike": 1.0, "maturity": 1.0, "exercise_frequency": 4},
    "numerics": {"n_regression": 1024, "n_pricing": 2048, "methods": [{"scheme": "LSM", "cutoff": 3}]},
    "cases": [{"label": "P100"}, {"label": "C100", "product": {"option": "call"}}]
  })");
}

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, ParsesAndMergesCases) {
  const auto c = parse_config(bermudan_doc());
  EXPECT_EQ(c.kind, Kind::Bermudan);
  ASSERT_EQ(c.cases.size(), 2u);
  EXPECT_EQ(c.cases[1].product.at("option"), "call");
  EXPECT_EQ(c.cases[1].product.at("strike"), 1.0);
  EXPECT_EQ(c.output, "bermudan.csv");
}

TEST(Config, UnknownKeysNameTheirPath) {
  auto doc = bermudan_doc();
  doc["numerics"]["n_paths"] = 4;
  EXPECT_NE(error_of(doc).find("numerics.n_paths"), std::string::npos);
  doc = bermudan_doc();
  doc["cases"][1]["product"]["strik"] = 1.0;
  EXPECT_NE(error_of(doc).find("strik"), std::string::npos);
}

TEST(Config, RejectsInvalidValues) {
  auto doc = bermudan_doc();
  doc["numerics"]["n_pricing"] = 1000;
  EXPECT_NE(error_of(doc).find("n_pricing"), std::string::npos);
  doc = bermudan_doc();
  doc["numerics"]["methods"][0]["scheme"] = "QMC";
  EXPECT_FALSE(error_of(doc).empty());
  doc = bermudan_doc();
  doc["product"]["type"] = "wic";
  EXPECT_FALSE(error_of(doc).empty());
  doc = bermudan_doc();
  doc["numerics"]["n_regression"] = 2;
  EXPECT_FALSE(error_of(doc).empty());
}

TEST(Config, SmokeProfileDividesPathCounts) {
  auto c = parse_config(bermudan_doc());
  apply_smoke_profile(c);
  EXPECT_EQ(c.numerics.n_regression, 256u);
  EXPECT_EQ(c.numerics.n_pricing, 256u);
}

TEST(Config, CannedConfigsValidate) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(FDLSM_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 9u);
}

TEST(Runner, TableOneShape) {
  auto c = load_config(std::string(FDLSM_CONFIG_DIR) + "/table1.json");
  apply_smoke_profile(c);
  const auto run = run_pricing(c);
  std::ostringstream csv;
  write_pricing_csv(run, csv);
  std::set<std::string> cases;
  for (const auto& r : run.rows) cases.insert(r.case_label);
  EXPECT_EQ(cases.size(), 6u);
  EXPECT_EQ(csv.str().rfind("case,scheme,R,cv,n_regression,n_pricing,pv,se,e_tau,ct_seconds,diff_vs_benchmark\n", 0), 0u);
}

TEST(Runner, ErrorCurveHasSixtyOneRows) {
  const auto c = load_config(std::string(FDLSM_CONFIG_DIR) + "/fig1.json");
  const auto run = run_error_model(c);
  std::ostringstream csv;
  write_error_csv(run, csv);
  std::size_t lines = 0;
  for (char ch : csv.str()) lines += ch == '\n';
  EXPECT_EQ(lines, 62u);
}
