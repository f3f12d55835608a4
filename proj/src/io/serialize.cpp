#include "colourrisk/io/serialize.hpp"

#include <cstdio>

#include "colourrisk/errors.hpp"

namespace colourrisk {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

nlohmann::json to_json(const StandardScaler& scaler, const PcaModel& model) {
  const std::size_t k = model.dimension();
  std::vector<double> loadings;
  loadings.reserve(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) loadings.push_back(model.loadings(i, j));
  return {{"means", scaler.means},
          {"sds", scaler.sds},
          {"sd_denominator", scaler.sample_sd ? "n-1" : "n"},
          {"loadings_row_major", loadings},
          {"eigenvalues", model.eigenvalues},
          {"explained_ratio", model.explained_ratio},
          {"cumulative_ratio", model.cumulative_ratio}};
}

void from_json(const nlohmann::json& j, StandardScaler& scaler, PcaModel& model) {
  try {
    scaler.means = j.at("means").get<std::vector<double>>();
    scaler.sds = j.at("sds").get<std::vector<double>>();
    scaler.sample_sd = j.value("sd_denominator", std::string("n-1")) == "n-1";
    model.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    model.explained_ratio = j.at("explained_ratio").get<std::vector<double>>();
    model.cumulative_ratio = j.at("cumulative_ratio").get<std::vector<double>>();
    const auto flat = j.at("loadings_row_major").get<std::vector<double>>();
    const std::size_t k = model.eigenvalues.size();
    if (flat.size() != k * k || scaler.means.size() != k || scaler.sds.size() != k)
      throw InputError("PCA model JSON: inconsistent dimensions");
    model.loadings = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t c = 0; c < k; ++c) model.loadings(i, c) = flat[i * k + c];
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("PCA model JSON: ") + e.what());
  }
}

nlohmann::json to_json(const OrdinalModel& model) {
  return {{"eta", {model.eta1, model.eta2}}, {"beta", model.beta}};
}

OrdinalModel ordinal_model_from_json(const nlohmann::json& j) {
  try {
    const auto eta = j.at("eta").get<std::vector<double>>();
    if (eta.size() != 2) throw InputError("ordinal model JSON: eta must have two entries");
    return {eta[0], eta[1], j.at("beta").get<std::vector<double>>()};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("ordinal model JSON: ") + e.what());
  }
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json j = to_json(fit.model);
  j["nll"] = fit.nll;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["separation"] = fit.separation;
  j["gradient_norm"] = fit.gradient_norm;
  return j;
}

nlohmann::json to_json(const FrozenTransform& transform) {
  nlohmann::json j = to_json(transform.scaler, transform.pca);
  j["mask"] = transform.mask.bits();
  j["components"] = transform.components;
  return j;
}

FrozenTransform frozen_transform_from_json(const nlohmann::json& j) {
  FrozenTransform t;
  from_json(j, t.scaler, t.pca);
  try {
    t.mask = SubsetMask(j.at("mask").get<std::uint32_t>());
    t.components = j.at("components").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("frozen transform JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("frozen transform JSON: ") + e.what());
  }
  if (static_cast<int>(t.pca.dimension()) != t.mask.size() || t.components < 1 ||
      t.components > t.pca.dimension())
    throw InputError("frozen transform JSON: mask, loadings and component count disagree");
  return t;
}

}  // namespace colourrisk
