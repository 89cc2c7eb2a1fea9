#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdlsm/error_model.hpp"
#include "fdlsm/market_models.hpp"
#include "fdlsm/payoffs.hpp"
#include "fdlsm/pde1d.hpp"
#include "fdlsm/pricer.hpp"
#include "fdlsm/regression.hpp"
#include "fdlsm/xva.hpp"

namespace fdlsm::experiment {

enum class Kind { Bermudan, Wic, EpeCva, OptEb, ErrorRecursion };

const char* kind_name(Kind kind);

struct MethodConfig {
  std::string scheme;  ///< "LSM", "FD-LSM" or "Opt-EB"
  int cutoff = 0;
  bool control_variate = false;
};

struct Numerics {
  std::size_t n_regression = 8192;
  std::size_t n_pricing = 65536;
  double sim_steps_per_year = 52.0;
  std::uint64_t stream_offset = 0;
  PathConstruction construction = PathConstruction::BrownianBridge;
  PdeGridOptions pde;
  std::vector<MethodConfig> methods;
  OptEbOptions opteb;
};

enum class BenchmarkKind { None, Value, Pde1d, OptEb, FirstMethod };

struct CaseConfig {
  std::string label;
  nlohmann::json model;    ///< merged base + case override
  nlohmann::json product;  ///< merged base + case override
  BenchmarkKind benchmark = BenchmarkKind::None;
  double benchmark_value = 0.0;
};

struct ExperimentConfig {
  Kind kind = Kind::Bermudan;
  std::string name;
  std::string output;
  Numerics numerics;
  std::vector<CaseConfig> cases;
  WwrParams wwr;
  ErrorRecursionParams error_model;
};

/// Parses and validates; errors are ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Divides path counts by 16 (and the Opt-EB budget likewise).
void apply_smoke_profile(ExperimentConfig& config);

MarketModel parse_model(const nlohmann::json& j, const std::string& where = "model");
Product parse_product(const nlohmann::json& j, const std::string& where = "product");
TimeGrid make_grid(const nlohmann::json& product, const Numerics& numerics, const std::string& where = "product");

}  // namespace fdlsm::experiment
