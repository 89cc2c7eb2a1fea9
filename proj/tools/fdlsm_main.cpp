#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "experiment/config.hpp"
#include "experiment/runner.hpp"
#include "fdlsm/errors.hpp"
#include "fdlsm/parallel.hpp"

namespace {

using namespace fdlsm;
using namespace fdlsm::experiment;

enum class Command { Price, Xva, OptEb, ErrorModel, Validate };

void check_command(Command cmd, Kind kind) {
  bool ok = false;
  switch (cmd) {
    case Command::Price: ok = kind == Kind::Bermudan || kind == Kind::Wic || kind == Kind::OptEb; break;
    case Command::OptEb: ok = kind == Kind::Bermudan || kind == Kind::OptEb; break;
    case Command::Xva: ok = kind == Kind::EpeCva; break;
    case Command::ErrorModel: ok = kind == Kind::ErrorRecursion; break;
    case Command::Validate: ok = true; break;
  }
  if (!ok) throw ConfigError(std::string("config error at 'experiment': '") + kind_name(kind) +
                             "' cannot run under this subcommand");
}

int run(Command cmd, const std::string& config_path, std::string out_dir, unsigned threads, bool smoke,
        bool dry_run) {
  ExperimentConfig config = load_config(config_path);
  check_command(cmd, config.kind);
  if (smoke) apply_smoke_profile(config);
  if (cmd == Command::OptEb) {
    std::erase_if(config.numerics.methods, [](const MethodConfig& m) { return m.scheme != "Opt-EB"; });
    if (config.numerics.methods.empty()) config.numerics.methods.push_back({"Opt-EB", 0, false});
    for (auto& c : config.cases)
      if (c.benchmark == BenchmarkKind::FirstMethod) c.benchmark = BenchmarkKind::None;
  }
  if (cmd == Command::Validate || dry_run) {
    std::cout << config_path << ": ok (" << kind_name(config.kind) << ", " << config.cases.size() << " case(s))\n";
    return 0;
  }
  set_thread_count(threads);
  if (out_dir.empty()) {
    const char* env = std::getenv("FDLSM_OUT_DIR");
    out_dir = env && *env ? env : ".";
  }
  RunOptions options{out_dir, &std::cout};
  switch (config.kind) {
    case Kind::EpeCva: run_xva(config, options); break;
    case Kind::ErrorRecursion: run_error_model(config, options); break;
    default: run_pricing(config, options); break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSM and FD-LSM pricing and exposure experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  unsigned threads = 1;
  bool smoke = false, dry_run = false;
  Command cmd = Command::Validate;

  auto add = [&](const char* name, const char* help, Command c) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    if (c != Command::Validate) {
      sub->add_option("--out", out_dir, "output directory (default $FDLSM_OUT_DIR or .)");
      sub->add_option("--threads", threads, "worker threads, 0 for all cores")->capture_default_str();
      sub->add_flag("--smoke", smoke, "divide path counts by 16");
      sub->add_flag("--dry-run", dry_run, "validate the config and write nothing");
    }
    sub->callback([&cmd, c] { cmd = c; });
  };
  add("price", "price Bermudan or WIC products", Command::Price);
  add("xva", "EPE profiles and CVA", Command::Xva);
  add("opteb", "optimised exercise boundary benchmark", Command::OptEb);
  add("error-model", "error accumulation recursion", Command::ErrorModel);
  add("validate", "parse and validate a config", Command::Validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return run(cmd, config_path, out_dir, threads, smoke, dry_run);
  } catch (const ConfigError& e) {
    std::cerr << "fdlsm: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "fdlsm: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "fdlsm: " << e.what() << '\n';
    return 1;
  }
}
