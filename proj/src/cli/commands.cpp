#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "colourrisk/cli.hpp"
#include "colourrisk/csv.hpp"
#include "colourrisk/errors.hpp"
#include "colourrisk/io/serialize.hpp"
#include "colourrisk/search.hpp"
#include "colourrisk/simd/kernels.hpp"
#include "colourrisk/version.hpp"

namespace colourrisk::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string data_path(std::string_view name) { return std::string(COLOURRISK_DATA_DIR) + "/" + std::string(name); }

std::string read_text(const fs::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + std::string(what) + " '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw InputError("cannot write '" + path.string() + "'");
}

json provenance(const RunConfig& config) {
  return {{"tool", std::string(kToolName)},
          {"version", std::string(kToolVersion)},
          {"config_hash", config.hash()},
          {"config", config.to_json()}};
}

// Leading comment line carried by every CSV written here; read_csv skips it.
std::string csv_banner(const RunConfig& config) {
  return "# tool=" + std::string(kToolName) + " version=" + std::string(kToolVersion) +
         " config_hash=" + config.hash() + "\n";
}

void write_json(const fs::path& path, json doc, const RunConfig& config) {
  doc["provenance"] = provenance(config);
  write_text(path, doc.dump(2) + "\n");
}

json read_json(const fs::path& path, std::string_view what) {
  const std::string text = read_text(path, what);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + " '" + path.string() + "': " + e.what());
  }
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(cells[i]);
  }
  return line + "\n";
}

int guarded(std::ostream& log, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const InputError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

fs::path out_dir(const RunConfig& c) { return fs::path(c.out); }

RegionCatalogue load_catalogue(const RunConfig& c) {
  return RegionCatalogue::load(c.regions.empty() ? data_path("regions.json") : c.regions);
}

// ---- cached stage outputs -------------------------------------------------

struct IngestState {
  json report;
  DailyPanel daily;
  LabelSeries labels;
  AggregateOptions aggregate;
};

IngestState load_ingest(const RunConfig& c) {
  const fs::path dir = out_dir(c);
  if (!fs::exists(dir / "ingest_report.json"))
    throw InputError("ingest cache missing in '" + dir.string() + "': run 'ingest' first");
  IngestState s;
  s.report = read_json(dir / "ingest_report.json", "ingest report");
  std::istringstream daily(read_text(dir / "cache" / "daily_panel.csv", "daily cache"));
  s.daily = read_daily_panel(daily, (dir / "cache" / "daily_panel.csv").string());
  ColourMap codes;
  codes.words = {{"l", RiskLevel::low}, {"m", RiskLevel::medium}, {"h", RiskLevel::high}};
  std::istringstream labels(read_text(dir / "cache" / "labels.csv", "label cache"));
  s.labels = parse_label_csv(labels, codes, nullptr, (dir / "cache" / "labels.csv").string()).labels;
  const auto stat = parse_statistic(s.report.value("statistic", std::string("mean")));
  if (!stat) throw InputError("ingest report: unknown statistic");
  s.aggregate = {*stat, s.report.value("min_days", 4)};
  return s;
}

std::vector<WeeklyPanel> load_weekly(const RunConfig& c, const json& report) {
  std::vector<WeeklyPanel> panels;
  for (const auto& entry : report.at("regions")) {
    const fs::path file = out_dir(c) / entry.at("file").get<std::string>();
    std::istringstream in(read_text(file, "weekly cache"));
    panels.push_back(read_weekly_panel(in, file.string()));
  }
  return panels;
}

std::string variables_label(SubsetMask mask) {
  std::string s;
  for (std::size_t col : mask.columns()) {
    if (!s.empty()) s += "; ";
    s += IndicatorId::from_zero_based(col).name();
  }
  return s;
}

json best_to_json(const RegionSearch& rs, const WeeklyPanel& weekly) {
  const EvaluationRecord& b = rs.best;
  const FrozenTransform transform = FrozenTransform::from_best(weekly, b);
  json vars = json::array();
  for (std::size_t col : b.mask.columns()) {
    const IndicatorId id = IndicatorId::from_zero_based(col);
    vars.push_back({{"id", id.code()}, {"name", std::string(id.name())}});
  }
  json loadings = json::array();
  for (int i = 0; i < b.r; ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < transform.pca.dimension(); ++j)
      row.push_back(transform.pca.loadings(static_cast<std::size_t>(i), j));
    loadings.push_back(row);
  }
  return {{"region", rs.region},
          {"mask", b.mask.bits()},
          {"mask_label", b.mask.label()},
          {"variables", vars},
          {"n_vars", b.n_vars},
          {"r", b.r},
          {"cum_var", b.cum_var},
          {"threshold_unmet", b.threshold_unmet},
          {"loadings", loadings},
          {"eta", {b.fit.model.eta1, b.fit.model.eta2}},
          {"beta", b.fit.model.beta},
          {"fit", to_json(b.fit)},
          {"error", b.error},
          {"n_wrong", b.n_wrong},
          {"n_weeks", b.n_weeks},
          {"transform", to_json(transform)}};
}

std::string records_csv(const RegionSearch& rs, const RunConfig& c) {
  std::string out = csv_banner(c);
  out += "mask,label,n_vars,r,cum_var,error,n_wrong,valid,converged,separation,threshold_unmet,reason\n";
  for (const auto& rec : rs.records) {
    out += join_csv({std::to_string(rec.mask.bits()), rec.mask.label(), std::to_string(rec.n_vars),
                     std::to_string(rec.r), format_double(rec.cum_var),
                     rec.valid ? format_double(rec.error) : "NA", std::to_string(rec.n_wrong),
                     rec.valid ? "1" : "0", rec.fit.converged ? "1" : "0", rec.fit.separation ? "1" : "0",
                     rec.threshold_unmet ? "1" : "0", std::string(reason_name(rec.reason))});
  }
  return out;
}

// Compact record form re-read by `report` for the PC-count distribution.
std::vector<EvaluationRecord> read_records_csv(const fs::path& path) {
  std::istringstream in(read_text(path, "search records"));
  const CsvTable t = read_csv(in, path.string());
  const std::size_t c_mask = t.require_column("mask"), c_r = t.require_column("r"),
                    c_valid = t.require_column("valid");
  std::vector<EvaluationRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto mask = parse_integer(t.rows[i][c_mask]);
    const auto r = parse_integer(t.rows[i][c_r]);
    if (!mask || !r) throw InputError(t.location(i) + ": malformed record");
    EvaluationRecord rec;
    rec.mask = SubsetMask(static_cast<std::uint32_t>(*mask));
    rec.r = static_cast<int>(*r);
    rec.valid = t.rows[i][c_valid] == "1";
    out.push_back(std::move(rec));
  }
  return out;
}

// ---- jackknife summaries ---------------------------------------------------

json summarize_parameter(std::vector<double> samples, double full_value) {
  json j;
  j["full_data"] = full_value;
  j["n"] = samples.size();
  if (samples.empty()) return j;
  std::sort(samples.begin(), samples.end());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  j["mean"] = mean;
  j["sd"] = samples.size() > 1 ? std::sqrt(ss / static_cast<double>(samples.size() - 1)) : 0.0;
  j["quantiles"] = {{"2.5", quantile(samples, 0.025)},
                    {"25", quantile(samples, 0.25)},
                    {"50", quantile(samples, 0.50)},
                    {"75", quantile(samples, 0.75)},
                    {"97.5", quantile(samples, 0.975)}};
  if (samples.size() >= 10) {
    for (double level : {0.50, 0.90, 0.95, 0.99}) {
      const auto [lo, hi] = empirical_ci(samples, level);
      j["intervals"][format_fixed(level * 100.0, 0)] = {lo, hi};
    }
  }
  return j;
}

std::string histogram_csv(const CoefficientDistributions& dist, const RunConfig& c, int bins) {
  std::string out = csv_banner(c) + "parameter,bin,lo,hi,count\n";
  for (std::size_t p = 0; p < dist.parameters.size(); ++p) {
    const auto& s = dist.samples[p];
    if (s.empty()) continue;
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    const double lo = *mn, hi = *mx;
    const int nb = hi > lo ? bins : 1;
    std::vector<std::size_t> counts(static_cast<std::size_t>(nb), 0);
    for (double v : s) {
      int b = hi > lo ? static_cast<int>((v - lo) / (hi - lo) * nb) : 0;
      counts[static_cast<std::size_t>(std::clamp(b, 0, nb - 1))]++;
    }
    const double width = hi > lo ? (hi - lo) / nb : 0.0;
    for (int b = 0; b < nb; ++b) {
      out += join_csv({dist.parameters[p], std::to_string(b), format_double(lo + width * b),
                       format_double(b == nb - 1 ? hi : lo + width * (b + 1)),
                       std::to_string(counts[static_cast<std::size_t>(b)])});
    }
  }
  return out;
}

}  // namespace

// ---- ingest ------------------------------------------------------------------

int cmd_ingest(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    c.validate();
    if (c.daily.empty() || c.labels.empty()) throw InputError("ingest needs --daily and --labels");
    const RegionCatalogue catalogue = load_catalogue(c);
    const ColumnMap mapping = ColumnMap::load(c.column_map.empty() ? data_path("column_map.json") : c.column_map);
    const ColourMap colours = ColourMap::load(c.colour_map.empty() ? data_path("colour_map.json") : c.colour_map);
    const DateWindow window{*Date::parse(c.from), *Date::parse(c.to)};
    if (window.last < window.first) throw InputError("--from is after --to");

    std::istringstream daily_in(read_text(c.daily, "daily CSV"));
    DailyIngest daily = parse_daily_csv(daily_in, mapping, window, &catalogue, c.daily);
    std::istringstream label_in(read_text(c.labels, "label CSV"));
    LabelIngest labels = parse_label_csv(label_in, colours, &catalogue, c.labels);

    // Label windows outside the analysis window cannot be aggregated.
    LabelSeries in_window;
    std::size_t labels_outside = 0;
    for (const auto& e : labels.labels.entries) {
      if (window.contains(e.week_start) && window.contains(e.week_end))
        in_window.entries.push_back(e);
      else
        ++labels_outside;
    }
    const AggregateOptions options{c.statistic, c.min_days};
    const WeeklyAggregation weekly = aggregate_weekly(daily.panel, in_window, options);

    const fs::path dir = out_dir(c);
    {
      std::ostringstream s;
      write_daily_panel(s, daily.panel);
      write_text(dir / "cache" / "daily_panel.csv", csv_banner(c) + s.str());
    }
    {
      std::ostringstream s;
      write_labels(s, in_window);
      write_text(dir / "cache" / "labels.csv", csv_banner(c) + s.str());
    }

    json regions = json::array();
    for (const auto& panel : weekly.panels) {
      const std::string file = "weekly/" + region_slug(panel.region) + ".csv";
      std::ostringstream s;
      write_weekly_panel(s, panel);
      write_text(dir / file, csv_banner(c) + s.str());
      std::size_t rejected = 0;
      for (const auto& r : weekly.rejected) rejected += r.region == panel.region;
      const auto dropped_it = labels.dropped_per_region.find(panel.region);
      regions.push_back({{"region", panel.region},
                         {"file", file},
                         {"retained_weeks", panel.weeks.size()},
                         {"rejected_weeks", rejected},
                         {"dropped_label_rows", dropped_it == labels.dropped_per_region.end() ? 0 : dropped_it->second}});
    }

    json dropped_days = json::array();
    for (const auto& d : daily.dropped)
      dropped_days.push_back({{"region", d.region}, {"date", d.date.iso()}, {"reason", d.reason}});
    json rejected = json::array();
    for (const auto& r : weekly.rejected)
      rejected.push_back({{"region", r.region}, {"week_start", r.week_start.iso()}, {"week_end", r.week_end.iso()}, {"days", r.days}});
    std::vector<std::string> warnings = daily.warnings;
    warnings.insert(warnings.end(), labels.warnings.begin(), labels.warnings.end());
    json indicators = json::array();
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
      const IndicatorId id = IndicatorId::from_zero_based(i);
      indicators.push_back({{"id", id.code()}, {"name", std::string(id.name())}});
    }

    json report{{"statistic", std::string(statistic_name(c.statistic))},
                {"min_days", c.min_days},
                {"window", {c.from, c.to}},
                {"daily_rows_read", daily.rows_read},
                {"daily_rows_outside_window", daily.rows_outside_window},
                {"label_rows_dropped", labels.dropped_total},
                {"label_rows_outside_window", labels_outside},
                {"indicators", indicators},
                {"regions", regions},
                {"dropped_days", dropped_days},
                {"rejected_weeks", rejected},
                {"warnings", warnings}};
    write_json(dir / "ingest_report.json", std::move(report), c);
    for (const auto& w : warnings) log << "warning: " << w << "\n";
    log << "ingest: " << weekly.panels.size() << " regions written to " << (dir / "weekly").string() << "\n";
  });
}

// ---- correlate -----------------------------------------------------------------

int cmd_correlate(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    const IngestState s = load_ingest(c);
    const CorrelationMatrix cm = correlation_matrix(national_daily_totals(s.daily));
    std::vector<std::string> header{"indicator"};
    for (auto name : indicator_names()) header.emplace_back(name);
    std::string out = csv_banner(c) + join_csv(header);
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
      std::vector<std::string> row{std::string(indicator_names()[i])};
      for (std::size_t j = 0; j < kIndicatorCount; ++j)
        row.push_back(cm.defined(i, j) ? format_double(cm.values(i, j)) : "NA");
      out += join_csv(row);
    }
    write_text(out_dir(c) / "correlation.csv", out);
    log << "correlate: wrote " << (out_dir(c) / "correlation.csv").string() << "\n";
  });
}

// ---- search --------------------------------------------------------------------

int cmd_search(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    c.validate();
    const IngestState s = load_ingest(c);
    const std::vector<WeeklyPanel> panels = load_weekly(c, s.report);
    SearchConfig sc;
    sc.threshold = c.threshold;
    sc.cap = c.cap;
    sc.workers = c.workers;

    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = out_dir(c);
    std::vector<RegionSearch> results;
    std::vector<const WeeklyPanel*> result_panels;
    json failed = json::array();
    for (const auto& panel : panels) {
      try {
        RegionSearch rs = search_region(panel, sc);
        const std::string slug = region_slug(panel.region);
        write_json(dir / "search" / (slug + "_best.json"), best_to_json(rs, panel), c);
        write_text(dir / "search" / (slug + "_records.csv"), records_csv(rs, c));
        log << "search: " << panel.region << " best " << rs.best.mask.label() << " error "
            << format_fixed(rs.best.error * 100.0, 2) << "%\n";
        results.push_back(std::move(rs));
        result_panels.push_back(&panel);
      } catch (const InputError& e) {
        failed.push_back({{"region", panel.region}, {"reason", e.what()}});
        log << "search: " << panel.region << " skipped: " << e.what() << "\n";
      }
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (results.empty()) throw InputError("search: no region produced a valid model");

    std::size_t max_r = 1;
    for (const auto& rs : results) max_r = std::max(max_r, static_cast<std::size_t>(rs.best.r));

    // table1.csv: the selected model per region.
    std::string t1 = csv_banner(c) + "region,n_vars,n_pcs,cum_var_pct,error_pct,n_wrong,n_weeks,mask,variables\n";
    for (const auto& rs : results) {
      const auto& b = rs.best;
      t1 += join_csv({rs.region, std::to_string(b.n_vars), std::to_string(b.r), format_fixed(b.cum_var * 100.0, 2),
                      format_fixed(b.error * 100.0, 2), std::to_string(b.n_wrong), std::to_string(b.n_weeks),
                      b.mask.label(), variables_label(b.mask)});
    }
    write_text(dir / "table1.csv", t1);

    // table23_loadings.csv: loadings of the retained components per selected variable.
    std::vector<std::string> header{"region", "variable", "name"};
    for (std::size_t i = 0; i < max_r; ++i) header.push_back("PC" + std::to_string(i + 1));
    std::string t23 = csv_banner(c) + join_csv(header);
    for (std::size_t k = 0; k < results.size(); ++k) {
      const auto& b = results[k].best;
      const FrozenTransform t = FrozenTransform::from_best(*result_panels[k], b);
      const auto cols = b.mask.columns();
      for (std::size_t j = 0; j < cols.size(); ++j) {
        const IndicatorId id = IndicatorId::from_zero_based(cols[j]);
        std::vector<std::string> row{results[k].region, id.code(), std::string(id.name())};
        for (std::size_t i = 0; i < max_r; ++i)
          row.push_back(i < static_cast<std::size_t>(b.r) ? format_double(t.pca.loadings(i, j)) : "");
        t23 += join_csv(row);
      }
    }
    write_text(dir / "table23_loadings.csv", t23);

    // table4_coefficients.csv: fitted thresholds and slopes.
    header = {"region", "eta1", "eta2"};
    for (std::size_t i = 0; i < max_r; ++i) header.push_back("beta" + std::to_string(i + 1));
    header.insert(header.end(), {"converged", "separation"});
    std::string t4 = csv_banner(c) + join_csv(header);
    for (const auto& rs : results) {
      const auto& m = rs.best.fit.model;
      std::vector<std::string> row{rs.region, format_double(m.eta1), format_double(m.eta2)};
      for (std::size_t i = 0; i < max_r; ++i) row.push_back(i < m.beta.size() ? format_double(m.beta[i]) : "");
      row.push_back(rs.best.fit.converged ? "1" : "0");
      row.push_back(rs.best.fit.separation ? "1" : "0");
      t4 += join_csv(row);
    }
    write_text(dir / "table4_coefficients.csv", t4);

    // Figure 3: error spread by subset size.
    std::string f3 = csv_banner(c) + "region,n_vars,count,mean,min,max,sd\n";
    for (const auto& rs : results) {
      for (const auto& row : error_by_nvars(rs.records)) {
        f3 += join_csv({rs.region, std::to_string(row.n_vars), std::to_string(row.count), format_double(row.mean),
                        format_double(row.min), format_double(row.max), format_double(row.sd)});
      }
    }
    write_text(dir / "fig3_error_by_nvars.csv", f3);

    // Figure 4: inclusion of each indicator across regional best models.
    std::vector<SubsetMask> masks;
    for (const auto& rs : results) masks.push_back(rs.best.mask);
    const auto inclusion = inclusion_percentages(masks);
    std::string f4 = csv_banner(c) + "indicator,name,percent\n";
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
      const IndicatorId id = IndicatorId::from_zero_based(i);
      f4 += join_csv({id.code(), std::string(id.name()), format_double(inclusion[i] * 100.0)});
    }
    write_text(dir / "fig4_inclusion.csv", f4);

    std::vector<std::span<const EvaluationRecord>> spans;
    for (const auto& rs : results) spans.emplace_back(rs.records);
    const auto dist = pc_count_distribution(spans);
    std::string pc = csv_banner(c) + "r,percent\n";
    for (std::size_t i = 0; i < 4; ++i) pc += join_csv({i == 3 ? "4+" : std::to_string(i + 1), format_double(dist[i] * 100.0)});
    write_text(dir / "pc_count_distribution.csv", pc);

    // Volatile facts (time, workers, ISA) live only in the manifest.
    json manifest{{"threshold", c.threshold},
                  {"cap", c.cap ? json(*c.cap) : json(nullptr)},
                  {"tie_break",
                   "lowest error; then converged before non-converged; then fewer variables; then fewer "
                   "components; then lowest mask value"},
                  {"regions_searched", results.size()},
                  {"regions_failed", failed},
                  {"workers", c.workers},
                  {"isa", std::string(simd::isa_name(simd::active_isa()))},
                  {"wall_time_seconds", wall}};
    write_json(dir / "search_manifest.json", std::move(manifest), c);
  });
}

// ---- jackknife -----------------------------------------------------------------

int cmd_jackknife(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    c.validate();
    if (!c.seed) throw InputError("jackknife needs --seed");
    const IngestState s = load_ingest(c);
    const fs::path dir = out_dir(c);
    const ResamplePlan plan = ResamplePlan::for_labels(*c.seed, c.iterations, s.labels);
    JackknifeOptions options;
    options.aggregate = s.aggregate;
    options.workers = c.workers;

    std::size_t done = 0;
    std::string summary = csv_banner(c) + "region,parameter,full_data,q2.5,q25,q50,q75,q97.5,converged,nonconverged,usable\n";
    for (const auto& entry : s.report.at("regions")) {
      const std::string region = entry.at("region").get<std::string>();
      const std::string slug = region_slug(region);
      const fs::path best_path = dir / "search" / (slug + "_best.json");
      if (!fs::exists(best_path)) {
        log << "jackknife: " << region << " has no search result, skipped\n";
        continue;
      }
      const json best = read_json(best_path, "search result");
      const FrozenTransform transform = frozen_transform_from_json(best.at("transform"));
      const std::uint64_t before = transform.fingerprint();
      const CoefficientDistributions dist = jackknife_region(region, transform, s.daily, s.labels, plan, options);
      if (transform.fingerprint() != before) throw NumericalError("jackknife: frozen transform changed for " + region);

      const OrdinalModel full = ordinal_model_from_json(best.at("fit"));
      std::vector<double> full_values{full.eta1, full.eta2};
      full_values.insert(full_values.end(), full.beta.begin(), full.beta.end());

      json doc{{"region", region},
               {"seed", *c.seed},
               {"iterations", c.iterations},
               {"converged", dist.converged},
               {"nonconverged", dist.nonconverged},
               {"usable", dist.usable()},
               {"transform_fingerprint", hex64(before)}};
      for (std::size_t p = 0; p < dist.parameters.size(); ++p) {
        doc["parameters"][dist.parameters[p]] = summarize_parameter(dist.samples[p], full_values[p]);
        if (c.samples) doc["samples"][dist.parameters[p]] = dist.samples[p];
        const json& q = doc["parameters"][dist.parameters[p]];
        std::vector<std::string> row{region, dist.parameters[p], format_double(full_values[p])};
        for (const char* key : {"2.5", "25", "50", "75", "97.5"})
          row.push_back(q.contains("quantiles") ? format_double(q["quantiles"][key].get<double>()) : "NA");
        row.insert(row.end(), {std::to_string(dist.converged), std::to_string(dist.nonconverged),
                               dist.usable() ? "1" : "0"});
        summary += join_csv(row);
      }
      write_json(dir / "jackknife" / (slug + ".json"), std::move(doc), c);
      write_text(dir / "jackknife" / (slug + "_hist.csv"), histogram_csv(dist, c, 30));
      if (c.svg) write_text(dir / "jackknife" / (slug + ".svg"), histogram_svg(dist, 30));
      if (!dist.usable())
        log << "jackknife: " << region << " flagged unusable (" << dist.nonconverged << " of " << c.iterations
            << " refits did not converge)\n";
      ++done;
    }
    if (done == 0) throw InputError("jackknife: no search results found; run 'search' first");
    write_text(dir / "jackknife_summary.csv", summary);
    log << "jackknife: " << done << " regions\n";
  });
}

// ---- report --------------------------------------------------------------------

int cmd_report(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    const fs::path dir = out_dir(c);
    const IngestState s = load_ingest(c);
    if (!fs::exists(dir / "table1.csv")) throw InputError("search output missing: run 'search' first");
    const json manifest = read_json(dir / "search_manifest.json", "search manifest");

    json report;
    report["ingest"] = {{"statistic", s.report.at("statistic")},
                        {"regions", s.report.at("regions")},
                        {"warnings", s.report.at("warnings").size()},
                        {"dropped_days", s.report.at("dropped_days").size()},
                        {"rejected_weeks", s.report.at("rejected_weeks").size()}};

    std::istringstream t1_in(read_text(dir / "table1.csv", "table1.csv"));
    const CsvTable t1 = read_csv(t1_in, (dir / "table1.csv").string());
    json models = json::array();
    std::vector<std::vector<EvaluationRecord>> records;
    std::size_t total_weeks = 0, total_wrong = 0;
    for (const auto& row : t1.rows) {
      json m;
      for (std::size_t k = 0; k < t1.header.size(); ++k) m[t1.header[k]] = row[k];
      const std::string region = row[t1.require_column("region")];
      total_wrong += static_cast<std::size_t>(parse_integer(row[t1.require_column("n_wrong")]).value_or(0));
      total_weeks += static_cast<std::size_t>(parse_integer(row[t1.require_column("n_weeks")]).value_or(0));
      const fs::path jk = dir / "jackknife" / (region_slug(region) + ".json");
      if (fs::exists(jk)) {
        const json j = read_json(jk, "jackknife summary");
        m["jackknife"] = {{"converged", j.at("converged")},
                          {"nonconverged", j.at("nonconverged")},
                          {"usable", j.at("usable")},
                          {"parameters", j.at("parameters")}};
      }
      models.push_back(std::move(m));
      records.push_back(read_records_csv(dir / "search" / (region_slug(region) + "_records.csv")));
    }
    report["models"] = models;
    report["totals"] = {{"regions", t1.rows.size()}, {"weeks", total_weeks}, {"misclassified", total_wrong}};
    report["search"] = {{"threshold", manifest.at("threshold")},
                        {"tie_break", manifest.at("tie_break")},
                        {"regions_failed", manifest.at("regions_failed")}};

    std::vector<std::span<const EvaluationRecord>> spans(records.begin(), records.end());
    const auto dist = pc_count_distribution(spans);
    report["pc_count_distribution_percent"] = {{"1", dist[0] * 100.0}, {"2", dist[1] * 100.0}, {"3", dist[2] * 100.0}, {"4+", dist[3] * 100.0}};

    std::vector<WeeklyShare> shares;
    if (!c.populations.empty()) {
      const RegionCatalogue catalogue = load_catalogue(c);
      std::istringstream pin(read_text(c.populations, "populations CSV"));
      shares = population_share_by_colour(s.labels, parse_populations_csv(pin, &catalogue, c.populations));
      std::string f1 = csv_banner(c) + "week_start,low,medium,high,covered\n";
      json series = json::array();
      for (const auto& w : shares) {
        f1 += join_csv({w.week_start.iso(), format_double(w.share[0]), format_double(w.share[1]),
                        format_double(w.share[2]), format_double(w.covered)});
        series.push_back({{"week_start", w.week_start.iso()}, {"share", w.share}, {"covered", w.covered}});
      }
      write_text(dir / "fig1_population_share.csv", f1);
      report["population_share"] = series;
    } else {
      report["population_share"] = nullptr;
      log << "report: no --populations given, population shares omitted\n";
    }
    write_json(dir / "report.json", report, c);

    std::ostringstream txt;
    txt << kToolName << " " << kToolVersion << " report (config " << c.hash() << ")\n\n";
    txt << "Regions modelled: " << t1.rows.size() << ", weeks: " << total_weeks << ", misclassified: " << total_wrong
        << "\n\n";
    txt << "region                  vars  PCs  cum.var%  error%  variables\n";
    for (const auto& row : t1.rows) {
      std::string name = row[t1.require_column("region")];
      name.resize(std::max<std::size_t>(name.size(), 22), ' ');
      txt << name << "  " << row[t1.require_column("n_vars")] << "     " << row[t1.require_column("n_pcs")]
          << "    " << row[t1.require_column("cum_var_pct")] << "   " << row[t1.require_column("error_pct")] << "   "
          << row[t1.require_column("variables")] << "\n";
    }
    txt << "\nComponents retained over all valid subsets: 1 PC " << format_fixed(dist[0] * 100.0, 2) << "%, 2 PCs "
        << format_fixed(dist[1] * 100.0, 2) << "%, 3 PCs " << format_fixed(dist[2] * 100.0, 2) << "%, 4+ PCs "
        << format_fixed(dist[3] * 100.0, 2) << "%\n";
    if (!shares.empty()) txt << "Population-share series: " << shares.size() << " weeks (fig1_population_share.csv)\n";
    write_text(dir / "report.txt", txt.str());
    log << "report: wrote " << (dir / "report.json").string() << "\n";
  });
}

}  // namespace colourrisk::cli
