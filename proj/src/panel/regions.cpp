#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "colourrisk/csv.hpp"
#include "colourrisk/errors.hpp"
#include "colourrisk/panel.hpp"

namespace colourrisk {

namespace {

std::string fold_key(std::string_view name) {
  std::string key;
  for (unsigned char c : name) {
    if (std::isalnum(c)) key.push_back(static_cast<char>(std::tolower(c)));
  }
  return key;
}

}  // namespace

RegionCatalogue RegionCatalogue::from_json_text(std::string_view text) {
  RegionCatalogue cat;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& name : doc.at("canonical")) {
      cat.canonical_.push_back(name.get<std::string>());
      cat.lookup_[fold_key(cat.canonical_.back())] = cat.canonical_.back();
    }
    if (doc.contains("aliases")) {
      for (const auto& [alias, target] : doc.at("aliases").items()) {
        const auto t = target.get<std::string>();
        if (!cat.lookup_.contains(fold_key(t)))
          throw InputError("region alias '" + alias + "' points to unknown region '" + t + "'");
        cat.lookup_[fold_key(alias)] = cat.lookup_.at(fold_key(t));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("region catalogue: ") + e.what());
  }
  return cat;
}

RegionCatalogue RegionCatalogue::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open region catalogue '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::optional<std::string> RegionCatalogue::canonical(std::string_view name) const {
  if (auto it = lookup_.find(fold_key(name)); it != lookup_.end()) return it->second;
  return std::nullopt;
}

std::string normalize_region(std::string_view raw, const RegionCatalogue* catalogue,
                             std::vector<std::string>* warnings) {
  const std::string name{trim(raw)};
  if (name.empty()) throw InputError("empty region name");
  if (!catalogue) return name;
  if (auto canon = catalogue->canonical(name)) return *canon;
  if (warnings) warnings->push_back("region '" + name + "' is not in the region catalogue");
  return name;
}

}  // namespace colourrisk
