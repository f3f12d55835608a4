#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "colourrisk/cli.hpp"
#include "colourrisk/simd/kernels.hpp"
#include "colourrisk/version.hpp"

namespace cr = colourrisk;

int main(int argc, char** argv) {
  CLI::App app{"Regional colour-risk model: weekly ingestion, PCA subset search, ordinal fits, jackknife"};
  app.set_version_flag("--version", std::string(cr::kToolVersion));
  app.require_subcommand(1);

  cr::cli::RunConfig config;
  std::string statistic = "mean";
  std::string isa;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", config.out, "Output directory")->capture_default_str();
    sub->add_option("--workers", config.workers, "Worker threads")->capture_default_str();
    sub->add_option("--isa", isa, "Force kernel ISA (scalar, avx2, neon)");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate inputs and cache weekly panels");
  ingest->add_option("--daily", config.daily, "Daily regional CSV")->required();
  ingest->add_option("--labels", config.labels, "Weekly colour labels CSV")->required();
  ingest->add_option("--column-map", config.column_map, "Indicator column map (JSON)");
  ingest->add_option("--colour-map", config.colour_map, "Colour word map (JSON)");
  ingest->add_option("--regions", config.regions, "Canonical region list (JSON)");
  ingest->add_option("--from", config.from, "First day of the analysis window")->capture_default_str();
  ingest->add_option("--to", config.to, "Last day of the analysis window")->capture_default_str();
  ingest->add_option("--statistic", statistic, "Weekly statistic")
      ->check(CLI::IsMember({"mean", "sum"}))
      ->capture_default_str();
  ingest->add_option("--min-days", config.min_days, "Minimum days for a week to be kept")->capture_default_str();
  add_common(ingest);

  auto* correlate = app.add_subcommand("correlate", "National indicator correlation matrix");
  add_common(correlate);

  auto* search = app.add_subcommand("search", "Exhaustive subset search per region");
  search->add_option("--threshold", config.threshold, "Cumulative variance threshold")->capture_default_str();
  search->add_option("--cap", config.cap, "Maximum number of components");
  add_common(search);

  auto* jackknife = app.add_subcommand("jackknife", "Day-removal resampling of the selected models");
  jackknife->add_option("--seed", config.seed, "Resampling seed")->required();
  jackknife->add_option("--iterations", config.iterations, "Resampling iterations")->capture_default_str();
  jackknife->add_flag("--samples", config.samples, "Include raw samples in the JSON output");
  jackknife->add_flag("--svg", config.svg, "Write SVG histograms");
  add_common(jackknife);

  auto* report = app.add_subcommand("report", "Consolidated report of all stages");
  report->add_option("--populations", config.populations, "Region populations CSV");
  report->add_option("--regions", config.regions, "Canonical region list (JSON)");
  add_common(report);

  CLI11_PARSE(app, argc, argv);

  config.statistic = statistic == "sum" ? cr::Statistic::sum : cr::Statistic::mean;
  if (!isa.empty()) {
    const auto parsed = cr::simd::parse_isa(isa);
    if (!parsed || !cr::simd::isa_supported(*parsed)) {
      std::cerr << "error: ISA '" << isa << "' is not available on this machine\n";
      return cr::cli::kExitInput;
    }
    cr::simd::select_isa(*parsed);
  }

  if (ingest->parsed()) return cr::cli::cmd_ingest(config, std::cerr);
  if (correlate->parsed()) return cr::cli::cmd_correlate(config, std::cerr);
  if (search->parsed()) return cr::cli::cmd_search(config, std::cerr);
  if (jackknife->parsed()) return cr::cli::cmd_jackknife(config, std::cerr);
  return cr::cli::cmd_report(config, std::cerr);
}
