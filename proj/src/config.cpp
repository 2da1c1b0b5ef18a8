#include "skt/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "skt/io.hpp"

namespace skt {

namespace {

using io::Json;

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid configuration";
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

std::string describe(const Json& j) {
    const auto s = j.dump();
    return s.size() > 40 ? s.substr(0, 37) + "..." : s;
}

// One JSON object section. Each accessor leaves the target untouched when
// the key is absent and records a violation when the value is unusable.
class Section {
public:
    Section(const Json* obj, std::string path, std::vector<std::string>& errors,
            const std::vector<std::string_view>& known)
        : obj_(obj), path_(std::move(path)), errors_(errors) {
        if (!obj_) return;
        if (!obj_->is_object()) {
            errors_.push_back(path_ + ": expected an object");
            obj_ = nullptr;
            return;
        }
        for (const auto& [key, value] : obj_->items()) {
            bool ok = false;
            for (auto k : known) ok = ok || key == k;
            if (!ok) errors_.push_back(where(key) + ": unknown key");
        }
    }

    const Json* child(std::string_view key) const {
        if (!obj_) return nullptr;
        const auto it = obj_->find(std::string(key));
        return it == obj_->end() ? nullptr : &*it;
    }

    std::string where(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    void number(std::string_view key, double& out, const std::function<bool(double)>& ok, std::string_view rule) {
        const Json* v = child(key);
        if (!v) return;
        if (!v->is_number()) {
            errors_.push_back(where(key) + ": expected a number, got " + describe(*v));
            return;
        }
        const double x = v->get<double>();
        if (!ok(x)) {
            errors_.push_back(where(key) + ": " + std::string(rule) + ", got " + describe(*v));
            return;
        }
        out = x;
    }

    void integer(std::string_view key, std::uint64_t& out, std::uint64_t lo, std::uint64_t hi) {
        const Json* v = child(key);
        if (!v) return;
        const bool is_int = v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0);
        if (!is_int) {
            errors_.push_back(where(key) + ": expected a non-negative integer, got " + describe(*v));
            return;
        }
        const auto x = v->get<std::uint64_t>();
        if (x < lo || x > hi) {
            errors_.push_back(where(key) + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                              describe(*v));
            return;
        }
        out = x;
    }

    void size(std::string_view key, std::size_t& out, std::size_t lo, std::size_t hi) {
        std::uint64_t x = out;
        integer(key, x, lo, hi);
        out = static_cast<std::size_t>(x);
    }

    void string(std::string_view key, std::string& out) {
        const Json* v = child(key);
        if (!v) return;
        if (!v->is_string()) {
            errors_.push_back(where(key) + ": expected a string, got " + describe(*v));
            return;
        }
        auto s = v->get<std::string>();
        if (s.empty()) {
            errors_.push_back(where(key) + ": must not be empty");
            return;
        }
        out = std::move(s);
    }

private:
    const Json* obj_;
    std::string path_;
    std::vector<std::string>& errors_;
};

bool is_builtin_source(std::string_view s) { return s == "table1" || s == "table1:expert" || s == "table1:learner"; }

void resolve_profile_source(std::string& source, const std::string& path, const std::filesystem::path& base_dir,
                            std::vector<std::string>& errors) {
    if (is_builtin_source(source)) return;
    std::filesystem::path p(source);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) {
        errors.push_back(path + ": profile file not found: " + p.string());
        return;
    }
    source = p.string();
}

Json config_to_json(const ExperimentConfig& c) {
    const TransferConfig& t = c.transfer;
    Json probs = Json::object();
    for (Stimulus s : kAllStimuli) probs[std::string(stimulus_name(s))] = t.scenario[s];
    Json j = Json::object();
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["scenario"] = {{"scenario_id", t.scenario.scenario_id},
                     {"ticks_per_session", t.scenario.ticks_per_session},
                     {"probabilities", std::move(probs)}};
    j["profiles"] = {{"expert", c.expert_profile}, {"learner", c.learner_profile}, {"linkage_strength", c.linkage_strength}};
    j["dataset"] = {{"window", t.window}, {"split_ratio", t.split_ratio}};
    j["learn"] = {{"max_parents", t.learn.max_parents}, {"smoothing", t.learn.smoothing}, {"restarts", t.learn.restarts}};
    j["transfer"] = {{"learning_rate", t.learning_rate},
                     {"stop_threshold", t.stop_threshold},
                     {"max_iterations", t.max_iterations},
                     {"split_seed_policy", split_seed_policy_name(t.split_seed_policy)}};
    return j;
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> violations)
    : ConfigError(join_violations(violations)), violations_(std::move(violations)) {}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    ExperimentConfig c;
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return c;

    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigValidationError({std::string("document: ") + e.what()});
    }

    std::vector<std::string> errors;
    Section root(&doc, "", errors, {"seed", "output_dir", "scenario", "profiles", "dataset", "learn", "transfer"});
    root.integer("seed", c.seed, 0, UINT64_MAX);
    root.string("output_dir", c.output_dir);

    TransferConfig& t = c.transfer;
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };

    Section scenario(root.child("scenario"), "scenario", errors, {"scenario_id", "ticks_per_session", "probabilities"});
    scenario.string("scenario_id", t.scenario.scenario_id);
    scenario.size("ticks_per_session", t.scenario.ticks_per_session, 1, 100'000'000);
    {
        std::vector<std::string_view> names;
        for (Stimulus s : kAllStimuli) names.push_back(stimulus_name(s));
        Section probs(scenario.child("probabilities"), "scenario.probabilities", errors, names);
        for (Stimulus s : kAllStimuli) {
            probs.number(stimulus_name(s), t.scenario[s], unit, "must lie in [0, 1]");
        }
    }

    Section profiles(root.child("profiles"), "profiles", errors, {"expert", "learner", "linkage_strength"});
    profiles.string("expert", c.expert_profile);
    profiles.string("learner", c.learner_profile);
    profiles.number("linkage_strength", c.linkage_strength, [](double x) { return x > 0.0 && x <= 1.0; },
                    "must lie in (0, 1]");
    resolve_profile_source(c.expert_profile, "profiles.expert", base_dir, errors);
    resolve_profile_source(c.learner_profile, "profiles.learner", base_dir, errors);

    Section dataset(root.child("dataset"), "dataset", errors, {"window", "split_ratio"});
    dataset.size("window", t.window, 1, 1'000'000);
    dataset.number("split_ratio", t.split_ratio, [](double x) { return x > 0.0 && x < 1.0; }, "must lie in (0, 1)");

    Section learn(root.child("learn"), "learn", errors, {"max_parents", "smoothing", "restarts"});
    learn.size("max_parents", t.learn.max_parents, 1, kNumAttributes);
    learn.number("smoothing", t.learn.smoothing, [](double x) { return x > 0.0 && std::isfinite(x); },
                 "must be a positive finite number");
    learn.size("restarts", t.learn.restarts, 0, 1000);

    Section transfer(root.child("transfer"), "transfer", errors,
                     {"learning_rate", "stop_threshold", "max_iterations", "split_seed_policy"});
    transfer.number("learning_rate", t.learning_rate, [](double x) { return x > 0.0 && x <= 1.0; }, "must lie in (0, 1]");
    transfer.number("stop_threshold", t.stop_threshold, [](double x) { return x >= 0.5 && x < 1.0; },
                    "must lie in [0.5, 1)");
    transfer.size("max_iterations", t.max_iterations, 1, 100'000);
    {
        std::string policy(split_seed_policy_name(t.split_seed_policy));
        transfer.string("split_seed_policy", policy);
        if (const auto p = split_seed_policy_from_name(policy)) {
            t.split_seed_policy = *p;
        } else {
            errors.push_back("transfer.split_seed_policy: expected \"per_iteration\" or \"fixed\", got \"" + policy + "\"");
        }
    }

    if (!errors.empty()) throw ConfigValidationError(std::move(errors));
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const DataError& e) {
        throw ConfigValidationError({std::string("config: ") + e.what()});
    }
    return parse_config(text, path.parent_path());
}

std::string serialize_config(const ExperimentConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    c.seed = 0;
    c.output_dir.clear();
    const std::string text = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ProfilePair load_profiles(const ExperimentConfig& config) {
    ProfilePair builtin;
    try {
        builtin = table1_profiles(config.linkage_strength);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("profiles.linkage_strength: ") + e.what());
    }
    auto resolve = [&](const std::string& source, const PlayerProfile& role_default, std::string_view path) {
        if (source == "table1") return role_default;
        if (source == "table1:expert") return builtin.expert;
        if (source == "table1:learner") return builtin.learner;
        try {
            return io::profile_from_json(Json::parse(io::read_file(source)));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string(path) + ": " + source + ": " + e.what());
        } catch (const DataError& e) {
            throw ConfigError(std::string(path) + ": " + source + ": " + e.what());
        }
    };
    return {resolve(config.expert_profile, builtin.expert, "profiles.expert"),
            resolve(config.learner_profile, builtin.learner, "profiles.learner")};
}

}  // namespace skt
