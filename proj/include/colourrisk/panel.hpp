#pragma once

// Daily indicator ingestion, weekly colour labels, weekly aggregation and
// the descriptive summaries built on them.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "colourrisk/date.hpp"
#include "colourrisk/matrix.hpp"

namespace colourrisk {

inline constexpr std::size_t kIndicatorCount = 16;
using IndicatorVector = std::array<double, kIndicatorCount>;

/// One of the sixteen monitoring indicators X1..X16.
class IndicatorId {
 public:
  /// 1-based index; throws std::out_of_range outside 1..16.
  explicit IndicatorId(int index);
  static IndicatorId from_zero_based(std::size_t i) { return IndicatorId(static_cast<int>(i) + 1); }
  /// Parses "X7" or "7".
  static std::optional<IndicatorId> parse(std::string_view code);

  int index() const { return index_; }
  std::size_t zero_based() const { return static_cast<std::size_t>(index_ - 1); }
  std::string code() const;
  std::string_view name() const;

  auto operator<=>(const IndicatorId&) const = default;

 private:
  int index_;
};

const std::array<std::string_view, kIndicatorCount>& indicator_names();

enum class RiskLevel : int { low = 1, medium = 2, high = 3 };

inline constexpr std::array<RiskLevel, 3> kRiskLevels{RiskLevel::low, RiskLevel::medium,
                                                      RiskLevel::high};
char level_code(RiskLevel level);
std::optional<RiskLevel> parse_level_code(std::string_view code);
inline int level_index(RiskLevel level) { return static_cast<int>(level) - 1; }

// ---------------------------------------------------------------------------
// Region names

/// Canonical region list plus aliases. Lookups ignore case, spaces and
/// punctuation, so "Emilia Romagna" and "Emilia-Romagna" coincide.
class RegionCatalogue {
 public:
  RegionCatalogue() = default;
  static RegionCatalogue from_json_text(std::string_view text);
  static RegionCatalogue load(const std::string& path);

  std::optional<std::string> canonical(std::string_view name) const;
  const std::vector<std::string>& names() const { return canonical_; }

 private:
  std::vector<std::string> canonical_;
  std::map<std::string, std::string> lookup_;
};

/// Maps a raw region name through the catalogue. Unknown names are kept
/// verbatim (trimmed) and produce a warning if `warnings` is given.
std::string normalize_region(std::string_view raw, const RegionCatalogue* catalogue,
                             std::vector<std::string>* warnings);

// ---------------------------------------------------------------------------
// Daily panel

struct RegionSeries {
  std::string region;
  std::vector<Date> dates;  // strictly increasing
  std::vector<IndicatorVector> values;
};

struct DailyPanel {
  std::vector<RegionSeries> regions;  // sorted by name

  const RegionSeries* find(std::string_view region) const;
  std::size_t day_count() const;
};

/// Source of one indicator: a column read directly, or the day-over-day
/// difference of a cumulative column.
struct ColumnRule {
  std::string column;
  bool difference = false;
};

struct ColumnMap {
  std::string date_column = "data";
  std::string region_column = "denominazione_regione";
  std::array<ColumnRule, kIndicatorCount> rules;

  static ColumnMap from_json_text(std::string_view text);
  static ColumnMap load(const std::string& path);
};

struct DateWindow {
  Date first = Date::from_ymd(2021, 1, 1);
  Date last = Date::from_ymd(2021, 12, 31);
  bool contains(Date d) const { return d >= first && d <= last; }
};

struct DroppedDay {
  std::string region;
  Date date;
  std::string reason;
};

struct DailyIngest {
  DailyPanel panel;
  std::vector<DroppedDay> dropped;
  std::vector<std::string> warnings;
  std::size_t rows_read = 0;
  std::size_t rows_outside_window = 0;
};

DailyIngest parse_daily_csv(std::istream& in, const ColumnMap& mapping, const DateWindow& window = {},
                            const RegionCatalogue* regions = nullptr,
                            std::string source = "daily csv");

/// Cache format: region,date,X1..X16 with round-trip number formatting.
void write_daily_panel(std::ostream& out, const DailyPanel& panel);
DailyPanel read_daily_panel(std::istream& in, std::string source = "daily panel");

// ---------------------------------------------------------------------------
// Labels

struct LabelEntry {
  std::string region;
  Date week_start;
  Date week_end;
  RiskLevel level;

  int length() const { return week_end - week_start + 1; }
};

struct LabelSeries {
  std::vector<LabelEntry> entries;  // sorted by (region, week_start)

  std::vector<std::string> regions() const;
  std::vector<const LabelEntry*> for_region(std::string_view region) const;
};

/// Colour word -> level; std::nullopt marks a word whose rows are dropped.
struct ColourMap {
  std::map<std::string, std::optional<RiskLevel>> words;  // keys lower-case

  static ColourMap defaults();
  static ColourMap from_json_text(std::string_view text);
  static ColourMap load(const std::string& path);
};

struct LabelIngest {
  LabelSeries labels;
  std::map<std::string, std::size_t> retained_per_region;
  std::map<std::string, std::size_t> dropped_per_region;
  std::size_t dropped_total = 0;
  std::vector<std::string> warnings;
};

/// Rows: region, week_start, week_end, colour.
LabelIngest parse_label_csv(std::istream& in, const ColourMap& colours = ColourMap::defaults(),
                            const RegionCatalogue* regions = nullptr,
                            std::string source = "labels csv");

void write_labels(std::ostream& out, const LabelSeries& labels);

// ---------------------------------------------------------------------------
// Weekly aggregation

enum class Statistic { mean, sum };
std::string_view statistic_name(Statistic s);
std::optional<Statistic> parse_statistic(std::string_view name);

struct WeekRow {
  Date week_start;
  Date week_end;
  int days = 0;
  IndicatorVector x{};
  RiskLevel y = RiskLevel::low;
};

struct WeeklyPanel {
  std::string region;
  Statistic statistic = Statistic::mean;
  std::vector<WeekRow> weeks;

  /// weeks x 16 design matrix.
  Matrix design() const;
  std::vector<RiskLevel> levels() const;
};

struct AggregateOptions {
  Statistic statistic = Statistic::mean;
  int min_days = 4;
};

struct RejectedWeek {
  std::string region;
  Date week_start;
  Date week_end;
  int days = 0;
};

struct WeeklyAggregation {
  std::vector<WeeklyPanel> panels;  // one per labelled region, sorted by name
  std::vector<RejectedWeek> rejected;
};

WeeklyAggregation aggregate_weekly(const DailyPanel& daily, const LabelSeries& labels,
                                   const AggregateOptions& options = {});

void write_weekly_panel(std::ostream& out, const WeeklyPanel& panel);
WeeklyPanel read_weekly_panel(std::istream& in, std::string source = "weekly panel");

// ---------------------------------------------------------------------------
// Summaries

struct CorrelationMatrix {
  Matrix values;  // NaN where undefined
  std::vector<bool> constant_column;

  bool defined(std::size_t i, std::size_t j) const { return !constant_column[i] && !constant_column[j]; }
};

/// Pearson correlations between the columns of `rows` (observations x variables).
CorrelationMatrix correlation_matrix(const Matrix& rows);

/// Per-date sum over regions; only dates present in every region are kept.
Matrix national_daily_totals(const DailyPanel& daily);

struct WeeklyShare {
  Date week_start;
  std::array<double, 3> share{};  // L, M, H
  double covered = 0.0;
};

std::vector<WeeklyShare> population_share_by_colour(
    const LabelSeries& labels, const std::map<std::string, std::int64_t>& populations);

std::map<std::string, std::int64_t> parse_populations_csv(std::istream& in,
                                                          const RegionCatalogue* regions = nullptr,
                                                          std::string source = "populations csv");

}  // namespace colourrisk
