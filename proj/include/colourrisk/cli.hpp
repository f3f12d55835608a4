#pragma once

// Command implementations behind the colourrisk executable. Each command
// reads its inputs from files, writes into RunConfig::out and returns a
// process exit code: 0 success, 2 input/validation error, 3 numerical failure.

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>

#include "colourrisk/jackknife.hpp"
#include "colourrisk/panel.hpp"

namespace colourrisk::cli {

struct RunConfig {
  std::string daily;
  std::string labels;
  std::string populations;
  std::string column_map;  // empty: shipped default
  std::string colour_map;  // empty: shipped default
  std::string regions;     // empty: shipped default
  std::string from = "2021-01-01";
  std::string to = "2021-12-31";
  double threshold = 0.90;
  std::optional<std::size_t> cap;
  Statistic statistic = Statistic::mean;
  int min_days = 4;
  std::optional<std::uint64_t> seed;
  int iterations = 1000;
  int workers = 1;
  bool samples = false;
  bool svg = false;
  std::string out = "out";

  /// Throws InputError on out-of-range settings.
  void validate() const;
  /// Settings that can change results. Worker count and output directory
  /// are excluded: they never change output contents.
  nlohmann::json to_json() const;
  std::string hash() const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

int cmd_ingest(const RunConfig& config, std::ostream& log);
int cmd_correlate(const RunConfig& config, std::ostream& log);
int cmd_search(const RunConfig& config, std::ostream& log);
int cmd_jackknife(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

/// File-name-safe form of a region name ("P.A. Bolzano" -> "p_a_bolzano").
std::string region_slug(std::string_view region);

std::string histogram_svg(const CoefficientDistributions& dist, int bins = 30);

}  // namespace colourrisk::cli
