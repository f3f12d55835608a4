#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "colourrisk/csv.hpp"
#include "colourrisk/errors.hpp"
#include "colourrisk/panel.hpp"

namespace colourrisk {

namespace {

std::string lower(std::string_view s) {
  std::string out{trim(s)};
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<RiskLevel> parse_target(const std::string& target, const std::string& word) {
  if (target == "DROP") return std::nullopt;
  if (auto level = parse_level_code(target)) return level;
  throw InputError("colour map: '" + word + "' maps to '" + target + "', expected L, M, H or DROP");
}

}  // namespace

std::vector<std::string> LabelSeries::regions() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (out.empty() || out.back() != e.region) out.push_back(e.region);
  return out;
}

std::vector<const LabelEntry*> LabelSeries::for_region(std::string_view region) const {
  std::vector<const LabelEntry*> out;
  for (const auto& e : entries)
    if (e.region == region) out.push_back(&e);
  return out;
}

ColourMap ColourMap::defaults() {
  ColourMap map;
  map.words = {{"yellow", RiskLevel::low},
               {"orange", RiskLevel::medium},
               {"red", RiskLevel::high},
               {"white", std::nullopt}};
  return map;
}

ColourMap ColourMap::from_json_text(std::string_view text) {
  ColourMap map;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& [word, target] : doc.items()) {
      map.words[lower(word)] = parse_target(target.get<std::string>(), word);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("colour map: ") + e.what());
  }
  return map;
}

ColourMap ColourMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open colour map '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

LabelIngest parse_label_csv(std::istream& in, const ColourMap& colours,
                            const RegionCatalogue* regions, std::string source) {
  const CsvTable table = read_csv(in, std::move(source));
  if (table.header.size() < 4) throw InputError(table.source + ": expected 4 columns (region, week_start, week_end, colour)");
  // Positional columns; header names are informational.
  LabelIngest result;
  std::set<std::string> unknown;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::vector<std::string> w;
    const std::string region = normalize_region(row[0], regions, &w);
    if (!w.empty()) unknown.insert(region);
    const auto start = Date::parse(row[1]);
    const auto end = Date::parse(row[2]);
    if (!start || !end) throw InputError(table.location(r) + ": unparseable week date");
    if (*end < *start) {
      throw InputError(table.location(r) + ": week_end " + end->iso() + " precedes week_start " +
                       start->iso());
    }
    const std::string word = lower(row[3]);
    const auto it = colours.words.find(word);
    if (it == colours.words.end())
      throw InputError(table.location(r) + ": colour '" + row[3] + "' has no mapping");
    if (!it->second) {
      ++result.dropped_per_region[region];
      ++result.dropped_total;
      continue;
    }
    result.labels.entries.push_back({region, *start, *end, *it->second});
  }
  for (const auto& name : unknown)
    result.warnings.push_back("region '" + name + "' is not in the region catalogue");

  auto& entries = result.labels.entries;
  std::ranges::sort(entries, [](const LabelEntry& a, const LabelEntry& b) {
    return std::tie(a.region, a.week_start) < std::tie(b.region, b.week_start);
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const auto& prev = entries[i - 1];
    const auto& cur = entries[i];
    if (prev.region == cur.region && cur.week_start <= prev.week_end) {
      throw InputError(table.source + ": overlapping label windows for '" + cur.region + "': " +
                       prev.week_start.iso() + ".." + prev.week_end.iso() + " and " +
                       cur.week_start.iso() + ".." + cur.week_end.iso());
    }
  }
  for (const auto& e : entries) ++result.retained_per_region[e.region];
  return result;
}

void write_labels(std::ostream& out, const LabelSeries& labels) {
  out << "region,week_start,week_end,level\n";
  for (const auto& e : labels.entries) {
    out << csv_escape(e.region) << ',' << e.week_start.iso() << ',' << e.week_end.iso() << ','
        << level_code(e.level) << '\n';
  }
}

}  // namespace colourrisk
