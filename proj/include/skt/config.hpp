#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "skt/errors.hpp"
#include "skt/game_domain.hpp"
#include "skt/transfer_loop.hpp"

namespace skt {

/// Every violation found while parsing, one "path: message" entry each.
class ConfigValidationError : public ConfigError {
public:
    explicit ConfigValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// A profile source is "table1" (the built-in profile for that role),
/// "table1:expert", "table1:learner", or a path to a profile JSON file.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::string expert_profile = "table1";
    std::string learner_profile = "table1";
    double linkage_strength = kDefaultLinkageStrength;
    /// Holds the scenario, dataset window and split, learner and loop settings.
    TransferConfig transfer;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a JSON document; empty text gives the defaults. Relative profile
/// paths resolve against `base_dir` and must exist.
/// Throws ConfigValidationError listing all violations.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path);

/// Complete JSON document with every field written out.
std::string serialize_config(const ExperimentConfig& config);

/// 16 hex digits identifying everything except the seed and output directory.
std::string config_hash(const ExperimentConfig& config);

/// Resolves both profile sources. Throws ConfigError when a file is unreadable
/// or invalid.
ProfilePair load_profiles(const ExperimentConfig& config);

}  // namespace skt
