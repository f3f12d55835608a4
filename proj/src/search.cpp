#include "colourrisk/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "colourrisk/errors.hpp"

namespace colourrisk {

SubsetMask::SubsetMask(std::uint32_t bits) : bits_(bits) {
  if (bits == 0 || bits > 0xFFFFu) throw std::invalid_argument("subset mask must be in 1..65535");
}

std::vector<std::size_t> SubsetMask::columns() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < kIndicatorCount; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

std::string SubsetMask::label() const {
  std::string out;
  for (std::size_t i : columns()) {
    if (!out.empty()) out += '+';
    out += IndicatorId::from_zero_based(i).code();
  }
  return out;
}

std::vector<SubsetMask> enumerate_subsets(int p) {
  if (p < 1 || p > 16) throw std::invalid_argument("enumerate_subsets: p must be in 1..16");
  std::vector<SubsetMask> out;
  const std::uint32_t last = (1u << p) - 1u;
  out.reserve(last);
  for (std::uint32_t bits = 1; bits <= last; ++bits) out.emplace_back(bits);
  return out;
}

std::string_view reason_name(InvalidReason reason) {
  switch (reason) {
    case InvalidReason::none:
      return "";
    case InvalidReason::zero_variance:
      return "zero variance";
    case InvalidReason::unidentifiable:
      return "unidentifiable";
    case InvalidReason::degenerate_labels:
      return "degenerate labels";
    case InvalidReason::numerical:
      return "numerical failure";
  }
  return "unknown";
}

EvaluationRecord evaluate_subset(const Matrix& design, std::span<const RiskLevel> y, SubsetMask mask,
                                 const SearchConfig& config) {
  EvaluationRecord rec;
  rec.mask = mask;
  rec.n_vars = mask.size();
  rec.n_weeks = y.size();
  const auto columns = mask.columns();
  if (columns.back() >= design.cols()) throw std::invalid_argument("evaluate_subset: mask exceeds design columns");

  std::array<std::size_t, 3> counts{};
  for (RiskLevel level : y) ++counts[static_cast<std::size_t>(level_index(level))];
  if (std::ranges::count_if(counts, [](std::size_t c) { return c > 0; }) < 2 || y.size() < 3) {
    rec.reason = InvalidReason::degenerate_labels;
    rec.detail = "fewer than two risk levels or three weeks";
    return rec;
  }

  try {
    const Matrix x = design.select_columns(columns);
    const Standardized st = standardize(x);
    const PcaModel pca = fit_pca(st.z);
    const ComponentChoice choice = select_components(pca, config.threshold, config.cap);
    rec.r = static_cast<int>(choice.count);
    rec.cum_var = pca.cumulative_ratio[choice.count - 1];
    rec.threshold_unmet = choice.threshold_unmet;
    if (choice.count >= y.size()) {
      rec.reason = InvalidReason::unidentifiable;
      rec.detail = std::to_string(choice.count) + " components for " + std::to_string(y.size()) + " weeks";
      return rec;
    }
    const Matrix scores = project(st.scaler, pca, x, choice.count);
    rec.fit = fit_ordinal(scores, y, config.fit);
    const ErrorCount err = misclassification(rec.fit.model, scores, y);
    rec.n_wrong = err.wrong;
    rec.error = err.rate();
    rec.valid = true;
  } catch (const ZeroVarianceError& e) {
    rec.reason = InvalidReason::zero_variance;
    rec.detail = IndicatorId::from_zero_based(columns[e.column()]).code() + " has zero variance";
  } catch (const InputError& e) {
    rec.reason = InvalidReason::unidentifiable;
    rec.detail = e.what();
  } catch (const NumericalError& e) {
    rec.reason = InvalidReason::numerical;
    rec.detail = e.what();
  }
  return rec;
}

EvaluationRecord evaluate_subset(const WeeklyPanel& weekly, SubsetMask mask, const SearchConfig& config) {
  const auto y = weekly.levels();
  return evaluate_subset(weekly.design(), y, mask, config);
}

bool better_record(const EvaluationRecord& a, const EvaluationRecord& b) {
  if (a.valid != b.valid) return a.valid;
  if (!a.valid) return a.mask < b.mask;
  // Errors are k / n_weeks; compare the counts exactly.
  const auto lhs = a.n_wrong * b.n_weeks;
  const auto rhs = b.n_wrong * a.n_weeks;
  if (lhs != rhs) return lhs < rhs;
  if (a.fit.converged != b.fit.converged) return a.fit.converged;
  if (a.n_vars != b.n_vars) return a.n_vars < b.n_vars;
  if (a.r != b.r) return a.r < b.r;
  return a.mask < b.mask;
}

RegionSearch search_region(const Matrix& design, std::span<const RiskLevel> y, const SearchConfig& config,
                           std::string region) {
  const int p = static_cast<int>(design.cols());
  if (p < 1 || p > 16) throw InputError("search: candidate indicator count must be in 1..16");
  if (design.rows() != y.size()) throw InputError("search: design rows do not match labels");
  const auto masks = enumerate_subsets(p);

  RegionSearch out;
  out.region = std::move(region);
  out.records.resize(masks.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, config.workers));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < masks.size(); i += workers)
          out.records[i] = evaluate_subset(design, y, masks[i], config);
      });
    }
  }
  out.best = *std::ranges::min_element(out.records, better_record);
  if (!out.best.valid) throw InputError("search: every subset is invalid for region '" + out.region + "'");
  return out;
}

RegionSearch search_region(const WeeklyPanel& weekly, const SearchConfig& config) {
  const auto y = weekly.levels();
  return search_region(weekly.design(), y, config, weekly.region);
}

std::array<std::size_t, 4> pc_count_tally(std::span<const EvaluationRecord> records) {
  std::array<std::size_t, 4> tally{};
  for (const auto& rec : records) {
    if (!rec.valid) continue;
    ++tally[static_cast<std::size_t>(std::clamp(rec.r, 1, 4) - 1)];
  }
  return tally;
}

std::array<double, 4> pc_count_distribution(std::span<const std::span<const EvaluationRecord>> regions) {
  std::array<std::size_t, 4> tally{};
  for (const auto& records : regions) {
    const auto t = pc_count_tally(records);
    for (std::size_t i = 0; i < 4; ++i) tally[i] += t[i];
  }
  const double total = static_cast<double>(tally[0] + tally[1] + tally[2] + tally[3]);
  if (total == 0) throw InputError("pc_count_distribution: no valid records");
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = static_cast<double>(tally[i]) / total;
  return out;
}

std::vector<NvarsSummary> error_by_nvars(std::span<const EvaluationRecord> records, int p) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<NvarsSummary> out;
  for (int n = 1; n <= p; ++n) {
    NvarsSummary row{n, 0, nan, nan, nan, nan};
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& rec : records) {
      if (!rec.valid || rec.n_vars != n) continue;
      ++row.count;
      sum += rec.error;
      lo = std::min(lo, rec.error);
      hi = std::max(hi, rec.error);
    }
    if (row.count > 0) {
      row.mean = sum / static_cast<double>(row.count);
      row.min = lo;
      row.max = hi;
      double ss = 0.0;
      for (const auto& rec : records)
        if (rec.valid && rec.n_vars == n) ss += (rec.error - row.mean) * (rec.error - row.mean);
      row.sd = std::sqrt(ss / static_cast<double>(row.count));
    }
    out.push_back(row);
  }
  return out;
}

std::array<double, kIndicatorCount> inclusion_percentages(std::span<const SubsetMask> best_masks) {
  if (best_masks.empty()) throw InputError("inclusion_percentages: no best models");
  std::array<double, kIndicatorCount> out{};
  for (const auto& mask : best_masks)
    for (std::size_t i = 0; i < kIndicatorCount; ++i)
      if (mask.contains(i)) out[i] += 1.0;
  for (double& v : out) v /= static_cast<double>(best_masks.size());
  return out;
}

}  // namespace colourrisk
