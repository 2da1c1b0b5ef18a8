#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skt/behavior_data.hpp"
#include "skt/errors.hpp"
#include "skt/rng.hpp"

namespace skt {

struct Scenario {
    std::string scenario_id = "default";
    /// Per-stimulus occurrence probability, indexed by Stimulus.
    std::array<double, kNumStimuli> probability{};
    std::size_t ticks_per_session = 2000;

    double operator[](Stimulus s) const { return probability[static_cast<std::size_t>(s)]; }
    double& operator[](Stimulus s) { return probability[static_cast<std::size_t>(s)]; }

    /// Throws std::invalid_argument when a probability is outside [0, 1].
    void validate() const;

    static Scenario defaults();

    bool operator==(const Scenario&) const = default;
};

enum class ConditionKey : std::uint8_t {
    indoor,
    outdoor,
    person_facing,
    climbing_opportunity,
    obstacle,
    horse_available,
    soldier_present,
    civilian_present,
    default_,
};

inline constexpr std::size_t kNumConditionKeys = 9;

inline constexpr std::array<ConditionKey, kNumConditionKeys> kAllConditionKeys{
    ConditionKey::indoor,          ConditionKey::outdoor,         ConditionKey::person_facing,
    ConditionKey::climbing_opportunity, ConditionKey::obstacle,   ConditionKey::horse_available,
    ConditionKey::soldier_present, ConditionKey::civilian_present, ConditionKey::default_,
};

std::string_view condition_key_name(ConditionKey k);
std::optional<ConditionKey> condition_key_from_name(std::string_view name);

/// Stimulus that triggers a stimulus-driven key; nullopt for the location
/// keys and default.
std::optional<Stimulus> key_stimulus(ConditionKey k);

/// Behaviors a key's distribution may put mass on. Stimulus-driven keys can
/// fire alongside any other stimulus, so every behavior is allowed; the
/// location keys and default fire only when no stimulus is present and are
/// limited to behaviors that need none.
std::array<bool, kNumAttributes> allowed_behaviors(ConditionKey k);

/// Keys active in a context. Stimulus-driven keys take precedence; when none
/// is active the location key (indoor or outdoor) applies.
std::vector<ConditionKey> active_keys(const StimulusContext& ctx);

/// Categorical distribution over behaviors, indexed by slot(Attribute).
using Distribution = std::array<double, kNumAttributes>;

struct PlayerProfile {
    std::string profile_id;
    std::array<Distribution, kNumConditionKeys> distributions{};

    const Distribution& operator[](ConditionKey k) const { return distributions[static_cast<std::size_t>(k)]; }
    Distribution& operator[](ConditionKey k) { return distributions[static_cast<std::size_t>(k)]; }

    bool operator==(const PlayerProfile&) const = default;
};

/// Empty when the profile is usable: every distribution non-negative, summing
/// to 1 within 1e-9, with support inside allowed_behaviors(key).
std::vector<std::string> validate_profile(const PlayerProfile& profile);

StimulusContext sample_context(const Scenario& scenario, Rng& rng);

/// Picks one active key uniformly, then samples a behavior from its
/// distribution, redrawing infeasible picks. After 100 rejected draws the
/// default distribution restricted to feasible behaviors is used instead.
/// Throws ConfigError if that restricted default has no mass.
Attribute choose_behavior(const PlayerProfile& profile, const StimulusContext& ctx, Rng& rng);

inline constexpr int kMaxRejections = 100;

SessionLog run_session(const Scenario& scenario, const PlayerProfile& profile, PlayerId player,
                       std::uint64_t seed);

struct SessionRequest {
    const Scenario* scenario = nullptr;
    const PlayerProfile* profile = nullptr;
    PlayerId player = PlayerId::ID1;
    std::uint64_t seed = 0;
};

/// Runs independent sessions across OpenMP threads. Output order matches
/// request order and each log is identical to a serial run_session call.
std::vector<SessionLog> run_sessions(std::span<const SessionRequest> requests);

struct ProfilePair {
    PlayerProfile expert;
    PlayerProfile learner;
};

inline constexpr double kDefaultLinkageStrength = 0.7;

/// Built-in expert (ID1) and learner (ID2) profiles. Each linked behavior
/// gets `linkage_strength` mass (split evenly over a linked set) and the rest
/// is spread uniformly over the key's other allowed behaviors.
ProfilePair table1_profiles(double linkage_strength = kDefaultLinkageStrength);

}  // namespace skt
