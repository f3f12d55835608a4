#include "colourrisk/jackknife.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "colourrisk/errors.hpp"
#include "colourrisk/io/serialize.hpp"

namespace colourrisk {

ResamplePlan::ResamplePlan(std::uint64_t seed, int iterations, std::vector<WeekWindow> grid)
    : seed_(seed), iterations_(iterations), grid_(std::move(grid)) {
  if (iterations < 1) throw InputError("resample plan: iterations must be >= 1");
  std::ranges::sort(grid_);
  grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
}

ResamplePlan ResamplePlan::for_labels(std::uint64_t seed, int iterations, const LabelSeries& labels) {
  std::vector<WeekWindow> grid;
  for (const auto& e : labels.entries) grid.push_back({e.week_start, e.week_end});
  ResamplePlan plan(seed, iterations, std::move(grid));
  for (const auto& e : labels.entries) {
    const WeekWindow w{e.week_start, e.week_end};
    const auto idx = static_cast<std::size_t>(std::ranges::lower_bound(plan.grid_, w) - plan.grid_.begin());
    plan.region_windows_[e.region].push_back(idx);
  }
  return plan;
}

std::vector<int> ResamplePlan::offsets(int iteration) const {
  // A fresh engine per iteration, keyed on (seed, iteration).
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(iteration)};
  std::mt19937_64 engine(seq);
  std::vector<int> out;
  out.reserve(grid_.size());
  // Plain modulo rather than uniform_int_distribution, whose algorithm is
  // implementation-defined; the bias is below 2^-60.
  for (const auto& w : grid_)
    out.push_back(static_cast<int>(engine() % static_cast<std::uint64_t>(w.length())));
  return out;
}

std::vector<std::size_t> ResamplePlan::windows_for(std::string_view region) const {
  if (region_windows_.empty()) {
    std::vector<std::size_t> all(grid_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  if (auto it = region_windows_.find(region); it != region_windows_.end()) return it->second;
  return {};
}

DailyPanel resample_days(const DailyPanel& daily, const ResamplePlan& plan, int iteration) {
  const auto offsets = plan.offsets(iteration);
  DailyPanel out;
  for (const auto& series : daily.regions) {
    std::vector<bool> keep(series.dates.size(), true);
    for (std::size_t w : plan.windows_for(series.region)) {
      const WeekWindow& window = plan.grid()[w];
      const auto first = std::ranges::lower_bound(series.dates, window.start);
      const auto last = std::ranges::upper_bound(series.dates, window.end);
      const auto available = static_cast<int>(last - first);
      if (available == 0) continue;
      if (available == 1) {
        throw InputError("resample: window " + window.start.iso() + ".." + window.end.iso() + " in '" +
                         series.region + "' has a single day");
      }
      const Date planned = window.start + offsets[w];
      auto hit = std::ranges::lower_bound(first, last, planned);
      if (hit == last || *hit != planned) hit = first + (offsets[w] % available);
      keep[static_cast<std::size_t>(hit - series.dates.begin())] = false;
    }
    RegionSeries kept;
    kept.region = series.region;
    for (std::size_t d = 0; d < series.dates.size(); ++d) {
      if (!keep[d]) continue;
      kept.dates.push_back(series.dates[d]);
      kept.values.push_back(series.values[d]);
    }
    out.regions.push_back(std::move(kept));
  }
  return out;
}

FrozenTransform FrozenTransform::from_best(const WeeklyPanel& weekly, const EvaluationRecord& best) {
  if (!best.valid) throw InputError("jackknife: best record for '" + weekly.region + "' is not valid");
  FrozenTransform t;
  t.mask = best.mask;
  const Matrix x = weekly.design().select_columns(best.mask.columns());
  Standardized st = standardize(x);
  t.pca = fit_pca(st.z);
  t.scaler = std::move(st.scaler);
  t.components = static_cast<std::size_t>(best.r);
  return t;
}

Matrix FrozenTransform::scores(const WeeklyPanel& weekly) const {
  return project(scaler, pca, weekly.design().select_columns(mask.columns()), components);
}

std::string FrozenTransform::serialize() const { return to_json(*this).dump(); }

std::uint64_t FrozenTransform::fingerprint() const { return fnv1a(serialize()); }

CoefficientDistributions jackknife_region(const std::string& region, const FrozenTransform& transform,
                                          const DailyPanel& daily, const LabelSeries& labels,
                                          const ResamplePlan& plan, const JackknifeOptions& options) {
  const RegionSeries* series = daily.find(region);
  if (!series) throw InputError("jackknife: no daily data for '" + region + "'");
  DailyPanel region_daily;
  region_daily.regions.push_back(*series);
  LabelSeries region_labels;
  for (const LabelEntry* e : labels.for_region(region)) region_labels.entries.push_back(*e);

  // Weeks that survive full-data aggregation define the design.
  const WeeklyAggregation full = aggregate_weekly(region_daily, region_labels, options.aggregate);
  if (full.panels.empty() || full.panels.front().weeks.empty())
    throw InputError("jackknife: no weeks for '" + region + "'");
  LabelSeries retained;
  for (const auto& w : full.panels.front().weeks) retained.entries.push_back({region, w.week_start, w.week_end, w.y});
  const auto y = full.panels.front().levels();
  AggregateOptions resampled_options = options.aggregate;
  resampled_options.min_days = 1;

  struct Draw {
    bool ok = false;
    OrdinalModel model;
  };
  std::vector<Draw> draws(static_cast<std::size_t>(plan.iterations()));
  const std::size_t workers = static_cast<std::size_t>(std::max(1, options.workers));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t it = w; it < draws.size(); it += workers) {
          try {
            const DailyPanel resampled = resample_days(region_daily, plan, static_cast<int>(it));
            const WeeklyAggregation agg = aggregate_weekly(resampled, retained, resampled_options);
            const WeeklyPanel& weekly = agg.panels.front();
            if (weekly.weeks.size() != y.size()) continue;
            const FitResult fit = fit_ordinal(transform.scores(weekly), y, options.fit);
            if (fit.converged) draws[it] = {true, fit.model};
          } catch (const InputError&) {
          } catch (const NumericalError&) {
          }
        }
      });
    }
  }

  CoefficientDistributions out;
  out.region = region;
  out.parameters = {"eta1", "eta2"};
  for (std::size_t j = 0; j < transform.components; ++j) out.parameters.push_back("beta" + std::to_string(j + 1));
  out.samples.resize(out.parameters.size());
  for (const auto& d : draws) {
    if (!d.ok) {
      ++out.nonconverged;
      continue;
    }
    ++out.converged;
    out.samples[0].push_back(d.model.eta1);
    out.samples[1].push_back(d.model.eta2);
    for (std::size_t j = 0; j < d.model.beta.size(); ++j) out.samples[2 + j].push_back(d.model.beta[j]);
  }
  return out;
}

double quantile(std::span<const double> sorted, double probability) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * probability;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::pair<double, double> empirical_ci(std::span<const double> samples, double level) {
  if (samples.size() < 10) throw InputError("empirical_ci: need at least 10 samples");
  if (!(level > 0.0 && level < 1.0)) throw InputError("empirical_ci: level must be in (0, 1)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::ranges::sort(sorted);
  const double tail = (1.0 - level) / 2.0;
  return {quantile(sorted, tail), quantile(sorted, 1.0 - tail)};
}

}  // namespace colourrisk
