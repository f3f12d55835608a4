#include "colourrisk/cli.hpp"

#include <cctype>

#include "colourrisk/errors.hpp"
#include "colourrisk/io/serialize.hpp"

namespace colourrisk::cli {

void RunConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw InputError("--threshold must be in (0, 1]");
  if (iterations < 1) throw InputError("--iterations must be >= 1");
  if (workers < 1) throw InputError("--workers must be >= 1");
  if (cap && *cap < 1) throw InputError("--cap must be >= 1");
  if (min_days < 2) throw InputError("--min-days must be >= 2");
  if (!Date::parse(from) || !Date::parse(to)) throw InputError("--from/--to must be ISO dates");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["daily"] = daily;
  j["labels"] = labels;
  j["populations"] = populations;
  j["column_map"] = column_map;
  j["colour_map"] = colour_map;
  j["regions"] = regions;
  j["from"] = from;
  j["to"] = to;
  j["threshold"] = threshold;
  j["cap"] = cap ? nlohmann::json(*cap) : nlohmann::json(nullptr);
  j["statistic"] = std::string(statistic_name(statistic));
  j["min_days"] = min_days;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  j["iterations"] = iterations;
  j["samples"] = samples;
  j["svg"] = svg;
  return j;
}

std::string RunConfig::hash() const { return hex64(fnv1a(to_json().dump())); }

std::string region_slug(std::string_view region) {
  std::string slug;
  for (unsigned char c : region) {
    if (std::isalnum(c)) {
      slug.push_back(static_cast<char>(std::tolower(c)));
    } else if (!slug.empty() && slug.back() != '_') {
      slug.push_back('_');
    }
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  return slug.empty() ? "region" : slug;
}

}  // namespace colourrisk::cli
