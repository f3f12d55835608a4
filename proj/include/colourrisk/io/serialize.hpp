#pragma once

#include <cstdint>
#include <json.hpp>
#include <string_view>

#include "colourrisk/jackknife.hpp"
#include "colourrisk/ordreg.hpp"
#include "colourrisk/pca.hpp"
#include "colourrisk/search.hpp"

namespace colourrisk {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

nlohmann::json to_json(const StandardScaler& scaler, const PcaModel& model);
void from_json(const nlohmann::json& j, StandardScaler& scaler, PcaModel& model);

nlohmann::json to_json(const OrdinalModel& model);
OrdinalModel ordinal_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FitResult& fit);

nlohmann::json to_json(const FrozenTransform& transform);
FrozenTransform frozen_transform_from_json(const nlohmann::json& j);

}  // namespace colourrisk
