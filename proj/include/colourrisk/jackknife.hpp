#pragma once

// Delete-one-day-per-week resampling under a frozen PCA transform.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "colourrisk/ordreg.hpp"
#include "colourrisk/panel.hpp"
#include "colourrisk/pca.hpp"
#include "colourrisk/search.hpp"

namespace colourrisk {

struct WeekWindow {
  Date start;
  Date end;
  int length() const { return end - start + 1; }
  auto operator<=>(const WeekWindow&) const = default;
};

/// Which day each label window loses in each iteration. The choice for
/// (iteration, window) depends only on the seed, the iteration index and the
/// window grid, so every region sharing a window loses the same date.
class ResamplePlan {
 public:
  /// Every region loses one day from every grid window.
  ResamplePlan(std::uint64_t seed, int iterations, std::vector<WeekWindow> grid);
  /// Grid = distinct label windows; each region only loses days from its own windows.
  static ResamplePlan for_labels(std::uint64_t seed, int iterations, const LabelSeries& labels);

  std::uint64_t seed() const { return seed_; }
  int iterations() const { return iterations_; }
  const std::vector<WeekWindow>& grid() const { return grid_; }

  /// Offset (0-based day within the window) removed from every grid window.
  std::vector<int> offsets(int iteration) const;
  /// Grid indices that apply to `region`.
  std::vector<std::size_t> windows_for(std::string_view region) const;

 private:
  std::uint64_t seed_;
  int iterations_;
  std::vector<WeekWindow> grid_;  // sorted, distinct
  std::map<std::string, std::vector<std::size_t>, std::less<>> region_windows_;
};

/// Removes one day from each grid window in every region. If the planned
/// date is missing in a region, the offset indexes that region's available
/// days instead. Throws InputError for a window left with < 2 days.
DailyPanel resample_days(const DailyPanel& daily, const ResamplePlan& plan, int iteration);

/// Standardization and loadings from the full-data fit of a best model.
struct FrozenTransform {
  SubsetMask mask;
  StandardScaler scaler;
  PcaModel pca;
  std::size_t components = 1;

  static FrozenTransform from_best(const WeeklyPanel& weekly, const EvaluationRecord& best);
  Matrix scores(const WeeklyPanel& weekly) const;
  std::string serialize() const;
  std::uint64_t fingerprint() const;
};

struct JackknifeOptions {
  AggregateOptions aggregate;
  FitOptions fit;
  int workers = 1;
};

struct CoefficientDistributions {
  std::string region;
  std::vector<std::string> parameters;        // eta1, eta2, beta1..
  std::vector<std::vector<double>> samples;   // per parameter, converged iterations only
  std::size_t converged = 0;
  std::size_t nonconverged = 0;

  /// False when more than half of the refits failed.
  bool usable() const { return converged * 2 >= converged + nonconverged && converged > 0; }
};

CoefficientDistributions jackknife_region(const std::string& region, const FrozenTransform& transform,
                                          const DailyPanel& daily, const LabelSeries& labels,
                                          const ResamplePlan& plan, const JackknifeOptions& options = {});

/// Linear interpolation between order statistics (R's type 7).
double quantile(std::span<const double> sorted, double probability);

/// Central interval covering `level`; needs at least 10 samples.
std::pair<double, double> empirical_ci(std::span<const double> samples, double level);

}  // namespace colourrisk
