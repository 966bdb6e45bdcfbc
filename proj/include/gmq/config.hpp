#pragma once

#include <gmq/experiment.hpp>

#include <json.hpp>

#include <string>

namespace gmq {

/// Instance object: id, family, alpha and groups with "atoms", "cdf" or "arms".
/// Finite arm lists, when present, are written to `finite_means`.
BanditInstance parse_instance(const nlohmann::json& j, const std::string& path,
                              std::vector<std::vector<double>>* finite_means = nullptr);
nlohmann::json instance_to_json(const BanditInstance& instance);

/// Full experiment document. `base_dir` resolves a relative "instance_file".
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
/// Throws ValidationError naming the file when it cannot be opened or parsed.
ExperimentConfig load_config(const std::string& file);

nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace gmq
