#pragma once

#include <hsr/hierfit.hpp>

#include <json.hpp>

#include <filesystem>

namespace hsr {

inline constexpr int model_format_version = 1;

nlohmann::json to_json(const HierModel& model);
HierModel model_from_json(const nlohmann::json& j);

/// Writes the model; `config`, when non-null, is stored under "config".
void save_model(const std::filesystem::path& path, const HierModel& model,
                const nlohmann::json& config = nullptr);
HierModel load_model(const std::filesystem::path& path);

} // namespace hsr
