#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace fdlsm::experiment {

struct RunOptions {
  /// Directory for CSV artifacts; empty disables writing.
  std::string out_dir;
  /// Per-row summary lines; null silences them.
  std::ostream* log = nullptr;
};

struct PriceRow {
  std::string case_label;
  PricingResult result;
  double ct_seconds = 0.0;
  std::optional<double> diff_vs_benchmark;
};

struct PricingRun {
  std::vector<PriceRow> rows;
  double simulation_seconds = 0.0;
};

struct CvaRow {
  std::string case_label;
  CvaResult cva;
  double ct_seconds = 0.0;
};

struct EpeRow {
  std::string case_label;
  EpeProfile profile;
};

struct XvaRun {
  std::vector<CvaRow> cva;
  std::vector<EpeRow> epe;
  /// European MC value per case on the pricing paths, with its s.e.
  std::vector<std::pair<double, double>> v0;
  double simulation_seconds = 0.0;
};

struct ErrorRun {
  std::vector<double> lsm;    ///< index = steps back from maturity
  std::vector<double> fdlsm;
  std::optional<double> lsm_limit;
  std::optional<double> fdlsm_limit;
};

/// Bermudan, WIC and Opt-EB experiments.
PricingRun run_pricing(const ExperimentConfig& config, const RunOptions& options = {});
XvaRun run_xva(const ExperimentConfig& config, const RunOptions& options = {});
ErrorRun run_error_model(const ExperimentConfig& config, const RunOptions& options = {});

void write_pricing_csv(const PricingRun& run, std::ostream& out);
void write_cva_csv(const XvaRun& run, std::ostream& out);
void write_epe_profile_csv(const XvaRun& run, std::ostream& out);
void write_error_csv(const ErrorRun& run, std::ostream& out);

/// `<stem>_epe.csv` next to the CVA table.
std::string epe_file_name(const std::string& output);

}  // namespace fdlsm::experiment
