#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fdlsm/errors.hpp"

namespace fdlsm::experiment {

using nlohmann::json;

namespace {

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config error at '" + where + "': " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require_object(j, where);
  for (const auto& item : j.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; });
    if (!known) fail(join(where, item.key()), "unknown key");
  }
}

double number(const json& j, const std::string& key, const std::string& where, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(join(where, key), "missing required number");
  }
  const json& v = j.at(key);
  if (!v.is_number()) fail(join(where, key), "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(join(where, key), "must be finite");
  return x;
}

std::uint64_t count(const json& j, const std::string& key, const std::string& where,
                    std::optional<std::uint64_t> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(join(where, key), "missing required integer");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(join(where, key), "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& key, const std::string& where,
                 std::optional<std::string> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(join(where, key), "missing required string");
  }
  const json& v = j.at(key);
  if (!v.is_string()) fail(join(where, key), "expected a string");
  return v.get<std::string>();
}

bool flag(const json& j, const std::string& key, const std::string& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(join(where, key), "expected true or false");
  return v.get<bool>();
}

/// Scalar broadcast to d entries, or an array cycled to length d.
std::vector<double> per_asset(const json& j, const std::string& key, const std::string& where, std::size_t d,
                              std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return std::vector<double>(d, *fallback);
    fail(join(where, key), "missing required value");
  }
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<double>(d, v.get<double>());
  if (!v.is_array() || v.empty()) fail(join(where, key), "expected a number or a non-empty array of numbers");
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const json& e = v.at(i % v.size());
    if (!e.is_number()) fail(join(where, key) + "[" + std::to_string(i % v.size()) + "]", "expected a number");
    out[i] = e.get<double>();
  }
  return out;
}

std::size_t dimension_of(const json& j, const std::string& where) {
  if (j.contains("dimension")) {
    std::uint64_t d = count(j, "dimension", where);
    if (d == 0) fail(join(where, "dimension"), "must be positive");
    return d;
  }
  if (j.contains("vols") && j.at("vols").is_array()) return j.at("vols").size();
  return 1;
}

OptionType option_type(const json& j, const std::string& where) {
  std::string s = text(j, "option", where);
  if (s == "put") return OptionType::Put;
  if (s == "call") return OptionType::Call;
  fail(join(where, "option"), "expected 'put' or 'call'");
}

Kind parse_kind(const std::string& s, const std::string& where) {
  if (s == "bermudan") return Kind::Bermudan;
  if (s == "wic") return Kind::Wic;
  if (s == "epe_cva") return Kind::EpeCva;
  if (s == "opteb") return Kind::OptEb;
  if (s == "error_recursion") return Kind::ErrorRecursion;
  fail(where, "unknown experiment kind '" + s + "'");
}

json merge(const json& base, const json& patch) {
  json out = base.is_null() ? json::object() : base;
  if (patch.is_null()) return out;
  for (const auto& item : patch.items()) out[item.key()] = item.value();
  return out;
}

PdeGridOptions parse_pde(const json& j, const std::string& where) {
  check_keys(j, where, {"nodes", "n_sd", "max_step", "ref_vol", "rannacher_steps"});
  PdeGridOptions o;
  o.nodes = count(j, "nodes", where, o.nodes);
  o.n_sd = number(j, "n_sd", where, o.n_sd);
  o.max_step = number(j, "max_step", where, o.max_step);
  o.ref_vol = number(j, "ref_vol", where, o.ref_vol);
  o.rannacher_steps = count(j, "rannacher_steps", where, o.rannacher_steps);
  if (o.nodes < 5) fail(join(where, "nodes"), "need at least 5 nodes");
  if (!(o.n_sd > 0.0)) fail(join(where, "n_sd"), "must be positive");
  if (!(o.max_step > 0.0)) fail(join(where, "max_step"), "must be positive");
  if (o.ref_vol < 0.0) fail(join(where, "ref_vol"), "must be non-negative");
  return o;
}

std::vector<MethodConfig> parse_methods(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array");
  std::vector<MethodConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    const json& m = j[i];
    check_keys(m, w, {"scheme", "cutoff", "cutoffs", "control_variate"});
    MethodConfig base;
    base.scheme = text(m, "scheme", w);
    if (base.scheme != "LSM" && base.scheme != "FD-LSM" && base.scheme != "Opt-EB")
      fail(join(w, "scheme"), "expected 'LSM', 'FD-LSM' or 'Opt-EB'");
    base.control_variate = flag(m, "control_variate", w, false);
    if (base.scheme == "Opt-EB") {
      if (m.contains("cutoff") || m.contains("cutoffs")) fail(join(w, "cutoff"), "Opt-EB takes no cutoff");
      out.push_back(base);
      continue;
    }
    if (m.contains("cutoff") == m.contains("cutoffs")) fail(w, "give exactly one of 'cutoff' or 'cutoffs'");
    std::vector<std::uint64_t> cutoffs;
    if (m.contains("cutoff")) {
      cutoffs.push_back(count(m, "cutoff", w));
    } else {
      const json& c = m.at("cutoffs");
      if (!c.is_array() || c.empty()) fail(join(w, "cutoffs"), "expected a non-empty array");
      for (std::size_t t = 0; t < c.size(); ++t) {
        if (!c[t].is_number_integer() || c[t].get<long long>() < 1)
          fail(join(w, "cutoffs") + "[" + std::to_string(t) + "]", "expected a positive integer");
        cutoffs.push_back(c[t].get<std::uint64_t>());
      }
    }
    for (auto r : cutoffs) {
      if (r < 1 || r > 24) fail(join(w, "cutoff"), "must be in 1..24");
      MethodConfig mc = base;
      mc.cutoff = static_cast<int>(r);
      out.push_back(mc);
    }
  }
  return out;
}

Numerics parse_numerics(const json& j, const std::string& where) {
  check_keys(j, where, {"n_regression", "n_pricing", "sim_steps_per_year", "stream_offset", "path_construction",
                        "pde", "methods", "opteb"});
  Numerics n;
  n.n_regression = count(j, "n_regression", where, n.n_regression);
  n.n_pricing = count(j, "n_pricing", where, n.n_pricing);
  n.sim_steps_per_year = number(j, "sim_steps_per_year", where, n.sim_steps_per_year);
  n.stream_offset = count(j, "stream_offset", where, 0);
  std::string pc = text(j, "path_construction", where, "brownian_bridge");
  if (pc == "brownian_bridge") {
    n.construction = PathConstruction::BrownianBridge;
  } else if (pc == "incremental") {
    n.construction = PathConstruction::Incremental;
  } else {
    fail(join(where, "path_construction"), "expected 'brownian_bridge' or 'incremental'");
  }
  auto pow2 = [](std::size_t v) { return v != 0 && (v & (v - 1)) == 0; };
  if (!pow2(n.n_regression)) fail(join(where, "n_regression"), "must be a power of two");
  if (!pow2(n.n_pricing)) fail(join(where, "n_pricing"), "must be a power of two");
  if (!(n.sim_steps_per_year > 0.0)) fail(join(where, "sim_steps_per_year"), "must be positive");
  if (j.contains("pde")) n.pde = parse_pde(j.at("pde"), join(where, "pde"));
  if (j.contains("methods")) n.methods = parse_methods(j.at("methods"), join(where, "methods"));
  if (j.contains("opteb")) {
    const json& o = j.at("opteb");
    std::string w = join(where, "opteb");
    check_keys(o, w, {"evaluations_per_date", "initial_step", "tolerance", "restarts"});
    n.opteb.evaluations_per_date = count(o, "evaluations_per_date", w, n.opteb.evaluations_per_date);
    n.opteb.optimizer.initial_step = number(o, "initial_step", w, n.opteb.optimizer.initial_step);
    n.opteb.optimizer.tolerance = number(o, "tolerance", w, n.opteb.optimizer.tolerance);
    n.opteb.optimizer.restarts = count(o, "restarts", w, n.opteb.optimizer.restarts);
    if (n.opteb.evaluations_per_date == 0) fail(join(w, "evaluations_per_date"), "must be positive");
    if (!(n.opteb.optimizer.initial_step > 0.0)) fail(join(w, "initial_step"), "must be positive");
  }
  return n;
}

}  // namespace

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::Bermudan: return "bermudan";
    case Kind::Wic: return "wic";
    case Kind::EpeCva: return "epe_cva";
    case Kind::OptEb: return "opteb";
    case Kind::ErrorRecursion: return "error_recursion";
  }
  return "unknown";
}

MarketModel parse_model(const json& j, const std::string& where) {
  require_object(j, where);
  std::string type = text(j, "type", where);
  MarketModel model;
  if (type == "black_scholes" || type == "local_vol") {
    check_keys(j, where, {"type", "rate", "dimension", "dividends", "vols", "correlation"});
    std::size_t d = dimension_of(j, where);
    double rate = number(j, "rate", where);
    auto q = per_asset(j, "dividends", where, d, 0.0);
    auto vols = per_asset(j, "vols", where, d);
    double rho = number(j, "correlation", where, 0.0);
    if (type == "black_scholes") {
      model = BlackScholesModel{rate, q, vols, rho};
    } else {
      std::vector<LocalVolFunction> lv;
      for (double v : vols) lv.push_back(SkewedLocalVol{v, 1.0});
      model = LocalVolModel{rate, q, std::move(lv), rho};
    }
  } else if (type == "heston") {
    check_keys(j, where, {"type", "rate", "dividend", "v0", "kappa", "theta", "xi", "rho"});
    HestonModel h;
    h.rate = number(j, "rate", where);
    h.dividend = number(j, "dividend", where, 0.0);
    h.v0 = number(j, "v0", where);
    h.kappa = number(j, "kappa", where);
    h.theta = number(j, "theta", where);
    h.xi = number(j, "xi", where);
    h.rho = number(j, "rho", where);
    model = h;
  } else {
    fail(join(where, "type"), "expected 'black_scholes', 'local_vol' or 'heston'");
  }
  try {
    validate_model(model);
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
  return model;
}

Product parse_product(const json& j, const std::string& where) {
  require_object(j, where);
  std::string type = text(j, "type", where);
  Product product;
  if (type == "bermudan") {
    check_keys(j, where, {"type", "option", "strike", "maturity", "exercise_frequency"});
    product = BermudanSpec{option_type(j, where), number(j, "strike", where)};
  } else if (type == "european") {
    check_keys(j, where, {"type", "option", "strike", "maturity", "exercise_frequency"});
    product = EuropeanSpec{option_type(j, where), number(j, "strike", where)};
  } else if (type == "wic") {
    check_keys(j, where, {"type", "coupon_rate", "coupon_barrier", "knock_in_barrier", "put_strike", "maturity",
                          "exercise_frequency", "smoothing_width"});
    WicSpec w;
    w.coupon_rate = number(j, "coupon_rate", where);
    w.coupon_barrier = number(j, "coupon_barrier", where, w.coupon_barrier);
    w.knock_in_barrier = number(j, "knock_in_barrier", where, w.knock_in_barrier);
    w.put_strike = number(j, "put_strike", where, w.put_strike);
    w.smoothing_width = number(j, "smoothing_width", where, 0.0);
    double freq = number(j, "exercise_frequency", where);
    if (!(freq > 0.0)) fail(join(where, "exercise_frequency"), "must be positive");
    w.coupon_interval = 1.0 / freq;
    product = w;
  } else {
    fail(join(where, "type"), "expected 'bermudan', 'european' or 'wic'");
  }
  try {
    validate_product(product);
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
  return product;
}

TimeGrid make_grid(const json& product, const Numerics& numerics, const std::string& where) {
  double maturity = number(product, "maturity", where);
  double freq = number(product, "exercise_frequency", where);
  if (!(maturity > 0.0)) fail(join(where, "maturity"), "must be positive");
  if (!(freq > 0.0)) fail(join(where, "exercise_frequency"), "must be positive");
  try {
    return TimeGrid::make(maturity, 1.0 / freq, 1.0 / numerics.sim_steps_per_year);
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
}

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc, "", {"experiment", "name", "output", "model", "product", "numerics", "cases", "wwr",
                       "error_model"});
  ExperimentConfig c;
  c.kind = parse_kind(text(doc, "experiment", ""), "experiment");
  c.name = text(doc, "name", "", kind_name(c.kind));
  c.output = text(doc, "output", "", c.name + ".csv");
  if (c.output.empty() || c.output.find('/') != std::string::npos) fail("output", "expected a plain file name");

  if (c.kind == Kind::ErrorRecursion) {
    if (!doc.contains("error_model")) fail("error_model", "missing required block");
    const json& e = doc.at("error_model");
    check_keys(e, "error_model", {"xi", "x", "y", "steps", "rho_tilde"});
    c.error_model.xi = number(e, "xi", "error_model");
    c.error_model.x = number(e, "x", "error_model");
    c.error_model.y = number(e, "y", "error_model");
    c.error_model.steps = count(e, "steps", "error_model");
    if (e.contains("rho_tilde")) c.error_model.rho_tilde = number(e, "rho_tilde", "error_model");
    try {
      c.error_model.validate();
    } catch (const ConfigError& ex) {
      fail("error_model", ex.what());
    }
    for (const char* k : {"model", "product", "numerics", "cases", "wwr"})
      if (doc.contains(k)) fail(k, "not used by error_recursion experiments");
    return c;
  }
  if (doc.contains("error_model")) fail("error_model", "only used by error_recursion experiments");

  if (!doc.contains("numerics")) fail("numerics", "missing required block");
  c.numerics = parse_numerics(doc.at("numerics"), "numerics");
  if (c.numerics.methods.empty()) {
    if (c.kind != Kind::OptEb) fail("numerics.methods", "missing required array");
    c.numerics.methods.push_back({"Opt-EB", 0, false});
  }

  if (doc.contains("wwr")) {
    if (c.kind != Kind::EpeCva) fail("wwr", "only used by epe_cva experiments");
    const json& w = doc.at("wwr");
    check_keys(w, "wwr", {"a", "b", "recovery"});
    c.wwr.a = number(w, "a", "wwr", c.wwr.a);
    c.wwr.b = number(w, "b", "wwr", c.wwr.b);
    c.wwr.recovery = number(w, "recovery", "wwr", c.wwr.recovery);
    try {
      c.wwr.validate();
    } catch (const ConfigError& ex) {
      fail("wwr", ex.what());
    }
  }

  json base_model = doc.value("model", json::object());
  json base_product = doc.value("product", json::object());
  json cases = doc.value("cases", json::array({json::object()}));
  if (!cases.is_array() || cases.empty()) fail("cases", "expected a non-empty array");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::string w = "cases[" + std::to_string(i) + "]";
    const json& cj = cases[i];
    check_keys(cj, w, {"label", "model", "product", "benchmark"});
    CaseConfig cc;
    cc.label = text(cj, "label", w, std::to_string(i + 1));
    if (!labels.insert(cc.label).second) fail(join(w, "label"), "duplicate label '" + cc.label + "'");
    if (cj.contains("model")) require_object(cj.at("model"), join(w, "model"));
    if (cj.contains("product")) require_object(cj.at("product"), join(w, "product"));
    cc.model = merge(base_model, cj.value("model", json::object()));
    cc.product = merge(base_product, cj.value("product", json::object()));
    if (cj.contains("benchmark")) {
      const json& b = cj.at("benchmark");
      if (b.is_number()) {
        cc.benchmark = BenchmarkKind::Value;
        cc.benchmark_value = b.get<double>();
      } else if (b == "pde1d") {
        cc.benchmark = BenchmarkKind::Pde1d;
      } else if (b == "opteb") {
        cc.benchmark = BenchmarkKind::OptEb;
      } else if (b == "first_method") {
        cc.benchmark = BenchmarkKind::FirstMethod;
      } else {
        fail(join(w, "benchmark"), "expected a number, 'pde1d', 'opteb' or 'first_method'");
      }
    }
    std::string mw = cj.contains("model") ? join(w, "model") : "model";
    std::string pw = cj.contains("product") ? join(w, "product") : "product";
    MarketModel model = parse_model(cc.model, mw);
    Product product = parse_product(cc.product, pw);
    make_grid(cc.product, c.numerics, pw);

    bool bermudan = std::holds_alternative<BermudanSpec>(product);
    bool wic = std::holds_alternative<WicSpec>(product);
    bool european = std::holds_alternative<EuropeanSpec>(product);
    if ((c.kind == Kind::Bermudan || c.kind == Kind::OptEb) && !bermudan)
      fail(join(pw, "type"), "this experiment needs a bermudan product");
    if (c.kind == Kind::Wic && !wic) fail(join(pw, "type"), "this experiment needs a wic product");
    if (c.kind == Kind::EpeCva && !european) fail(join(pw, "type"), "this experiment needs a european product");
    bool heston = std::holds_alternative<HestonModel>(model);
    if (heston && !bermudan) fail(join(mw, "type"), "heston is supported for bermudan products only");
    if (cc.benchmark == BenchmarkKind::Pde1d && model_asset_count(model) != 1)
      fail(join(w, "benchmark"), "'pde1d' needs a single-asset model");
    if (cc.benchmark == BenchmarkKind::Pde1d && heston)
      fail(join(w, "benchmark"), "'pde1d' is not available for heston");
    bool has_opteb = std::any_of(c.numerics.methods.begin(), c.numerics.methods.end(),
                                 [](const MethodConfig& m) { return m.scheme == "Opt-EB"; });
    if (cc.benchmark == BenchmarkKind::OptEb && !has_opteb)
      fail(join(w, "benchmark"), "'opteb' needs an Opt-EB entry in numerics.methods");
    for (std::size_t m = 0; m < c.numerics.methods.size(); ++m) {
      const auto& mc = c.numerics.methods[m];
      std::string where_m = "numerics.methods";
      if (mc.scheme == "Opt-EB" && !bermudan) fail(where_m, "Opt-EB needs a bermudan product");
      if (mc.scheme == "Opt-EB" && heston) fail(where_m, "Opt-EB needs a Black-Scholes or local-vol model");
      if (mc.control_variate) {
        if (c.kind == Kind::EpeCva) fail(where_m, "control_variate is not used by epe_cva");
        if (!bermudan || !std::holds_alternative<BlackScholesModel>(model) || model_asset_count(model) != 1)
          fail(where_m, "control_variate needs a single-asset Black-Scholes bermudan");
      }
      if (c.kind == Kind::EpeCva && mc.scheme == "Opt-EB") fail(where_m, "Opt-EB is not an exposure method");
      if (mc.scheme != "Opt-EB") {
        BasisSet basis{mc.scheme == "LSM" ? Scheme::LSM : Scheme::FDLSM, mc.cutoff,
                       heston ? StateDescriptor::HestonPair : StateDescriptor::Single};
        try {
          basis.validate();
        } catch (const ConfigError& ex) {
          fail(where_m, ex.what());
        }
        if (basis.size() >= c.numerics.n_regression) fail("numerics.n_regression", "must exceed the basis size");
      }
    }
    if (c.kind == Kind::EpeCva && !std::holds_alternative<BlackScholesModel>(model))
      fail(join(mw, "type"), "epe_cva needs a Black-Scholes model");
    if (wic && heston) fail(join(mw, "type"), "wic needs a Black-Scholes or local-vol model");
    c.cases.push_back(std::move(cc));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

void apply_smoke_profile(ExperimentConfig& config) {
  auto shrink = [](std::size_t n) { return std::max<std::size_t>(n / 16, 256); };
  config.numerics.n_regression = shrink(config.numerics.n_regression);
  config.numerics.n_pricing = shrink(config.numerics.n_pricing);
  config.numerics.opteb.evaluations_per_date = std::max<std::size_t>(config.numerics.opteb.evaluations_per_date / 16, 4);
}

}  // namespace fdlsm::experiment
