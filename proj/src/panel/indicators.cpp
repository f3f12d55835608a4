#include <charconv>
#include <stdexcept>

#include "colourrisk/panel.hpp"

namespace colourrisk {

const std::array<std::string_view, kIndicatorCount>& indicator_names() {
  static constexpr std::array<std::string_view, kIndicatorCount> names{
      "Hospitalized with symptoms",
      "ICU patients",
      "ICU daily admissions",
      "Home quarantine",
      "Confirmed cases",
      "Discharged healed",
      "Deaths",
      "Cases confirmed by PCR",
      "Cases confirmed by RAT",
      "Total cases",
      "Increase in total cases",
      "People Tested",
      "PCR",
      "RAT",
      "Total swabs",
      "Increase in total swabs",
  };
  return names;
}

IndicatorId::IndicatorId(int index) : index_(index) {
  if (index < 1 || index > static_cast<int>(kIndicatorCount))
    throw std::out_of_range("indicator index must be in 1..16, got " + std::to_string(index));
}

std::optional<IndicatorId> IndicatorId::parse(std::string_view code) {
  if (!code.empty() && (code.front() == 'X' || code.front() == 'x')) code.remove_prefix(1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(code.data(), code.data() + code.size(), value);
  if (code.empty() || ec != std::errc{} || ptr != code.data() + code.size()) return std::nullopt;
  if (value < 1 || value > static_cast<int>(kIndicatorCount)) return std::nullopt;
  return IndicatorId(value);
}

std::string IndicatorId::code() const { return "X" + std::to_string(index_); }

std::string_view IndicatorId::name() const { return indicator_names()[zero_based()]; }

char level_code(RiskLevel level) {
  switch (level) {
    case RiskLevel::low:
      return 'L';
    case RiskLevel::medium:
      return 'M';
    case RiskLevel::high:
      return 'H';
  }
  return '?';
}

std::optional<RiskLevel> parse_level_code(std::string_view code) {
  if (code == "L") return RiskLevel::low;
  if (code == "M") return RiskLevel::medium;
  if (code == "H") return RiskLevel::high;
  return std::nullopt;
}

std::string_view statistic_name(Statistic s) { return s == Statistic::mean ? "mean" : "sum"; }

std::optional<Statistic> parse_statistic(std::string_view name) {
  if (name == "mean") return Statistic::mean;
  if (name == "sum") return Statistic::sum;
  return std::nullopt;
}

}  // namespace colourrisk
