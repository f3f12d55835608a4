#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <map>
#include <sstream>

#include "colourrisk/cli.hpp"
#include "colourrisk/csv.hpp"
#include "colourrisk/io/serialize.hpp"
#include "oracles/oracles.hpp"
#include "synthetic.hpp"

using namespace colourrisk;
namespace fs = std::filesystem;

namespace {

struct Inputs {
  std::string dir;
  cli::RunConfig config;
};

Inputs prepare(const std::string& name, std::vector<std::string> regions) {
  Inputs in;
  in.dir = fixtures::scratch_dir(name);
  fixtures::SyntheticOptions opt;
  opt.regions = std::move(regions);
  const auto data = fixtures::make_synthetic(opt);
  fixtures::write_file(in.dir + "/daily.csv", data.daily_csv);
  fixtures::write_file(in.dir + "/labels.csv", data.labels_csv);
  fixtures::write_file(in.dir + "/populations.csv", data.populations_csv);
  in.config.daily = in.dir + "/daily.csv";
  in.config.labels = in.dir + "/labels.csv";
  in.config.populations = in.dir + "/populations.csv";
  in.config.out = in.dir + "/out";
  return in;
}

// Digest of every file under dir, keyed by relative path.
std::map<std::string, std::uint64_t> digest_tree(const fs::path& dir, const std::string& skip = "") {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (!skip.empty() && rel == skip) continue;
    out[rel] = fnv1a(fixtures::read_file(e.path().string()));
  }
  return out;
}

CsvTable read_table(const fs::path& p) {
  std::istringstream in(fixtures::read_file(p.string()));
  return read_csv(in, p.string());
}

}  // namespace

TEST_CASE("run config validation and hashing") {
  cli::RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.threshold = 0.0;
  CHECK_THROWS(c.validate());
  c.threshold = 1.0;
  c.iterations = 0;
  CHECK_THROWS(c.validate());
  c.iterations = 1;
  c.workers = 0;
  CHECK_THROWS(c.validate());

  cli::RunConfig a, b;
  b.workers = 8;
  b.out = "elsewhere";
  CHECK(a.hash() == b.hash());
  b.seed = 5;
  CHECK(a.hash() != b.hash());
  CHECK(cli::region_slug("P.A. Bolzano") == "p_a_bolzano");
  CHECK(cli::region_slug("Valle d'Aosta") == "valle_d_aosta");
}

TEST_CASE("ingest writes 21 region files and reruns byte-identically") {
  Inputs in = prepare("ingest21", fixtures::all_regions());
  const auto inputs_before = digest_tree(in.dir);
  std::ostringstream log;
  REQUIRE(cli::cmd_ingest(in.config, log) == cli::kExitOk);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(in.config.out + "/weekly")) files += e.path().extension() == ".csv";
  CHECK(files == 21);
  const auto report = nlohmann::json::parse(fixtures::read_file(in.config.out + "/ingest_report.json"));
  CHECK(report.at("indicators").size() == 16);
  CHECK(report.at("regions").size() == 21);
  for (const auto& r : report.at("regions")) CHECK(r.at("retained_weeks").get<int>() == 48);
  CHECK(report.at("provenance").at("config_hash") == in.config.hash());

  const auto first = digest_tree(in.config.out);
  REQUIRE(cli::cmd_ingest(in.config, log) == cli::kExitOk);
  CHECK(digest_tree(in.config.out) == first);

  // Inputs are untouched.
  for (const auto& [name, h] : inputs_before)
    if (name.rfind("out/", 0) != 0) CHECK(digest_tree(in.dir).at(name) == h);
}

TEST_CASE("ingest validation failures exit 2 and name the problem") {
  Inputs in = prepare("ingest_bad", {"Marche"});
  std::string daily = fixtures::read_file(in.config.daily);
  fixtures::write_file(in.dir + "/intact.csv", daily);
  const auto pos = daily.find("ingressi_terapia_intensiva");
  daily.replace(pos, std::string("ingressi_terapia_intensiva").size(), "renamed_column");
  fixtures::write_file(in.config.daily, daily);
  std::ostringstream log;
  CHECK(cli::cmd_ingest(in.config, log) == cli::kExitInput);
  CHECK(log.str().find("ingressi_terapia_intensiva") != std::string::npos);

  cli::RunConfig missing = in.config;
  missing.daily = in.dir + "/intact.csv";
  missing.labels = in.dir + "/nope.csv";
  std::ostringstream log2;
  CHECK(cli::cmd_ingest(missing, log2) == cli::kExitInput);
  CHECK(log2.str().find("nope.csv") != std::string::npos);

  cli::RunConfig bad = in.config;
  bad.threshold = 1.5;
  CHECK(cli::cmd_ingest(bad, log2) == cli::kExitInput);
}

TEST_CASE("downstream commands without an ingest cache exit 2") {
  Inputs in = prepare("no_cache", {"Marche"});
  std::ostringstream log;
  CHECK(cli::cmd_correlate(in.config, log) == cli::kExitInput);
  CHECK(cli::cmd_search(in.config, log) == cli::kExitInput);
  in.config.seed = 1;
  CHECK(cli::cmd_jackknife(in.config, log) == cli::kExitInput);
  CHECK(cli::cmd_report(in.config, log) == cli::kExitInput);
}

TEST_CASE("correlate: unit diagonal and agreement with a formula oracle") {
  Inputs in = prepare("correlate", {"Marche", "Lazio", "Umbria"});
  std::ostringstream log;
  REQUIRE(cli::cmd_ingest(in.config, log) == cli::kExitOk);
  REQUIRE(cli::cmd_correlate(in.config, log) == cli::kExitOk);
  const CsvTable t = read_table(in.config.out + "/correlation.csv");
  REQUIRE(t.rows.size() == 16);
  REQUIRE(t.header.size() == 17);
  CHECK(t.header[1] == "Hospitalized with symptoms");
  CHECK(t.rows[15][0] == "Increase in total swabs");

  // Oracle: sum the cached daily panel by date, then textbook Pearson.
  const CsvTable daily = read_table(in.config.out + "/cache/daily_panel.csv");
  std::map<std::string, oracle::Vec> totals;
  for (const auto& row : daily.rows) {
    auto& v = totals[row[1]];
    v.resize(16, 0.0);
    for (std::size_t j = 0; j < 16; ++j) v[j] += *parse_double(row[2 + j]);
  }
  oracle::Mat rows;
  for (const auto& [date, v] : totals) rows.push_back(v);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(*parse_double(t.rows[i][1 + i]) == 1.0);
    for (std::size_t j = 0; j < 16; ++j) {
      const double expect = oracle::pearson(oracle::column(rows, i), oracle::column(rows, j));
      CHECK(std::abs(*parse_double(t.rows[i][1 + j]) - expect) <= 1e-9);
    }
  }
}

TEST_CASE("search, jackknife and report on one region") {
  Inputs in = prepare("pipeline", {"Marche"});
  std::ostringstream log;
  REQUIRE(cli::cmd_ingest(in.config, log) == cli::kExitOk);
  CHECK(cli::cmd_report(in.config, log) == cli::kExitInput);  // search output missing

  in.config.workers = 1;
  REQUIRE(cli::cmd_search(in.config, log) == cli::kExitOk);
  const auto serial = digest_tree(in.config.out, "search_manifest.json");
  in.config.workers = 8;
  REQUIRE(cli::cmd_search(in.config, log) == cli::kExitOk);
  CHECK(digest_tree(in.config.out, "search_manifest.json") == serial);

  const CsvTable t1 = read_table(in.config.out + "/table1.csv");
  REQUIRE(t1.rows.size() == 1);
  const double err = *parse_double(t1.rows[0][t1.require_column("error_pct")]);
  CHECK(std::abs(err * 48.0 / 100.0 - std::round(err * 48.0 / 100.0)) <= 0.01);
  const auto best = nlohmann::json::parse(fixtures::read_file(in.config.out + "/search/marche_best.json"));
  CHECK(best.at("n_weeks") == 48);
  CHECK(best.at("variables").size() == best.at("n_vars").get<std::size_t>());
  const auto manifest = nlohmann::json::parse(fixtures::read_file(in.config.out + "/search_manifest.json"));
  CHECK(manifest.at("workers") == 8);
  CHECK(manifest.contains("wall_time_seconds"));
  CHECK(manifest.at("tie_break").get<std::string>().find("lowest error") != std::string::npos);
  const CsvTable records = read_table(in.config.out + "/search/marche_records.csv");
  CHECK(records.rows.size() == 65535);

  // Jackknife needs a seed; with one it is reproducible byte for byte.
  CHECK(cli::cmd_jackknife(in.config, log) == cli::kExitInput);
  in.config.seed = 2021;
  in.config.iterations = 200;
  in.config.svg = true;
  REQUIRE(cli::cmd_jackknife(in.config, log) == cli::kExitOk);
  const std::string first = fixtures::read_file(in.config.out + "/jackknife/marche.json");
  in.config.workers = 1;
  REQUIRE(cli::cmd_jackknife(in.config, log) == cli::kExitOk);
  CHECK(fixtures::read_file(in.config.out + "/jackknife/marche.json") == first);
  const auto jk = nlohmann::json::parse(first);
  CHECK(jk.at("converged").get<int>() + jk.at("nonconverged").get<int>() == 200);
  CHECK(jk.at("parameters").at("eta1").at("quantiles").size() == 5);
  CHECK(fs::exists(in.config.out + "/jackknife/marche.svg"));
  CHECK(fs::exists(in.config.out + "/jackknife/marche_hist.csv"));

  REQUIRE(cli::cmd_report(in.config, log) == cli::kExitOk);
  const auto report = nlohmann::json::parse(fixtures::read_file(in.config.out + "/report.json"));
  CHECK(report.at("models").size() == 1);
  CHECK(report.at("models")[0].contains("jackknife"));
  CHECK(report.at("population_share").size() == 48);
  CHECK(fs::exists(in.config.out + "/report.txt"));
}

TEST_CASE("report totals re-sum by hand and every output carries the config hash") {
  Inputs in = prepare("report", {"Marche", "Umbria"});
  std::ostringstream log;
  REQUIRE(cli::cmd_ingest(in.config, log) == cli::kExitOk);
  in.config.workers = 2;
  REQUIRE(cli::cmd_search(in.config, log) == cli::kExitOk);
  REQUIRE(cli::cmd_correlate(in.config, log) == cli::kExitOk);
  REQUIRE(cli::cmd_report(in.config, log) == cli::kExitOk);

  const CsvTable t1 = read_table(in.config.out + "/table1.csv");
  long long wrong = 0, weeks = 0;
  for (const auto& row : t1.rows) {
    wrong += *parse_integer(row[t1.require_column("n_wrong")]);
    weeks += *parse_integer(row[t1.require_column("n_weeks")]);
  }
  const auto report = nlohmann::json::parse(fixtures::read_file(in.config.out + "/report.json"));
  CHECK(report.at("totals").at("misclassified").get<long long>() == wrong);
  CHECK(report.at("totals").at("weeks").get<long long>() == 96);
  CHECK(weeks == 96);
  double pc_total = 0.0;
  for (const auto& [k, v] : report.at("pc_count_distribution_percent").items()) pc_total += v.get<double>();
  CHECK(pc_total == doctest::Approx(100.0));

  // Hand-sum the population shares of the first week from the inputs.
  const CsvTable pops = read_table(in.config.populations);
  const CsvTable labels = read_table(in.config.labels);
  std::map<std::string, double> pop;
  double total = 0.0;
  for (const auto& row : pops.rows) total += (pop[row[0]] = *parse_double(row[1]));
  std::array<double, 3> hand{};
  for (const auto& row : labels.rows) {
    if (row[1] != "2021-01-11") continue;
    const int level = row[3] == "giallo" ? 0 : (row[3] == "arancione" ? 1 : 2);
    hand[static_cast<std::size_t>(level)] += pop[row[0]] / total;
  }
  const auto& week0 = report.at("population_share")[0];
  CHECK(week0.at("week_start") == "2021-01-11");
  for (std::size_t l = 0; l < 3; ++l) CHECK(week0.at("share")[l].get<double>() == doctest::Approx(hand[l]));

  const std::string hash = in.config.hash();
  for (const auto& e : fs::recursive_directory_iterator(in.config.out)) {
    if (!e.is_regular_file()) continue;
    CAPTURE(e.path().string());
    CHECK(fixtures::read_file(e.path().string()).find(hash) != std::string::npos);
  }
}
