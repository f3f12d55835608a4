#pragma once

// Exhaustive subset search: every nonempty subset of the candidate
// indicators goes through standardize -> PCA -> component selection ->
// projection -> ordinal fit -> in-sample misclassification error.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colourrisk/ordreg.hpp"
#include "colourrisk/panel.hpp"
#include "colourrisk/pca.hpp"

namespace colourrisk {

/// Bit i set = indicator X(i+1) included.
class SubsetMask {
 public:
  constexpr SubsetMask() = default;
  explicit SubsetMask(std::uint32_t bits);

  std::uint32_t bits() const { return bits_; }
  int size() const { return std::popcount(bits_); }
  bool contains(std::size_t indicator) const { return (bits_ >> indicator) & 1u; }
  std::vector<std::size_t> columns() const;
  /// "X1+X5+X11"
  std::string label() const;

  auto operator<=>(const SubsetMask&) const = default;

 private:
  std::uint32_t bits_ = 1;
};

/// All 2^p - 1 nonempty masks over p indicators, ascending.
std::vector<SubsetMask> enumerate_subsets(int p = 16);

struct SearchConfig {
  double threshold = 0.90;
  std::optional<std::size_t> cap;
  FitOptions fit;
  int workers = 1;
};

enum class InvalidReason { none, zero_variance, unidentifiable, degenerate_labels, numerical };
std::string_view reason_name(InvalidReason reason);

struct EvaluationRecord {
  SubsetMask mask;
  int n_vars = 0;
  int r = 0;
  double cum_var = 0.0;
  bool threshold_unmet = false;
  FitResult fit;
  std::size_t n_wrong = 0;
  std::size_t n_weeks = 0;
  double error = 0.0;
  bool valid = false;
  InvalidReason reason = InvalidReason::none;
  std::string detail;
};

/// design: weeks x p candidate indicators. Never throws for a bad subset;
/// the failure is recorded as valid = false with a reason.
EvaluationRecord evaluate_subset(const Matrix& design, std::span<const RiskLevel> y, SubsetMask mask,
                                 const SearchConfig& config = {});
EvaluationRecord evaluate_subset(const WeeklyPanel& weekly, SubsetMask mask, const SearchConfig& config = {});

/// Strict total order used to pick the best record: lower error, then
/// converged before non-converged, fewer variables, fewer components,
/// smaller mask. Invalid records sort after every valid one.
bool better_record(const EvaluationRecord& a, const EvaluationRecord& b);

struct RegionSearch {
  std::string region;
  EvaluationRecord best;
  std::vector<EvaluationRecord> records;  // records[mask - 1]
};

/// Throws InputError when every subset is invalid.
RegionSearch search_region(const Matrix& design, std::span<const RiskLevel> y, const SearchConfig& config = {},
                           std::string region = {});
RegionSearch search_region(const WeeklyPanel& weekly, const SearchConfig& config = {});

/// Fractions of valid records with r = 1, 2, 3 and >= 4 components.
std::array<double, 4> pc_count_distribution(std::span<const std::span<const EvaluationRecord>> regions);
std::array<std::size_t, 4> pc_count_tally(std::span<const EvaluationRecord> records);

struct NvarsSummary {
  int n_vars = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double sd = 0.0;
};

/// One row per subset size 1..p (count 0 and NaN statistics where no valid record exists).
std::vector<NvarsSummary> error_by_nvars(std::span<const EvaluationRecord> records, int p = 16);

/// Fraction of best models that include each indicator.
std::array<double, kIndicatorCount> inclusion_percentages(std::span<const SubsetMask> best_masks);

}  // namespace colourrisk
