#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skt/dataset.hpp"

namespace skt {

/// Observable in-game behaviors. Enumerator values are the attribute index
/// numbers (1..10) used throughout reports.
enum class Attribute : std::uint8_t {
    fighting = 1,
    obstacle = 2,
    riding_hrs = 3,
    facing_sol = 4,
    climbing = 5,
    location = 6,
    facing_prs = 7,
    movement = 8,
    listening = 9,
    attack_civ = 10,
};

inline constexpr std::size_t kNumAttributes = 10;

inline constexpr std::array<Attribute, kNumAttributes> kAllAttributes{
    Attribute::fighting,  Attribute::obstacle,   Attribute::riding_hrs, Attribute::facing_sol,
    Attribute::climbing,  Attribute::location,   Attribute::facing_prs, Attribute::movement,
    Attribute::listening, Attribute::attack_civ,
};

constexpr int attribute_index(Attribute a) { return static_cast<int>(a); }
/// Zero-based slot for array storage and the dataset column.
constexpr std::size_t slot(Attribute a) { return static_cast<std::size_t>(a) - 1; }
constexpr Attribute attribute_at(std::size_t slot) { return static_cast<Attribute>(slot + 1); }

std::string_view attribute_name(Attribute a);
std::optional<Attribute> attribute_from_name(std::string_view name);

enum class Stimulus : std::uint8_t {
    location_indoor,
    obstacle_present,
    soldier_present,
    civilian_present,
    horse_available,
    climbable_present,
    person_facing,
};

inline constexpr std::size_t kNumStimuli = 7;

inline constexpr std::array<Stimulus, kNumStimuli> kAllStimuli{
    Stimulus::location_indoor,  Stimulus::obstacle_present, Stimulus::soldier_present,
    Stimulus::civilian_present, Stimulus::horse_available,  Stimulus::climbable_present,
    Stimulus::person_facing,
};

std::string_view stimulus_name(Stimulus s);
std::optional<Stimulus> stimulus_from_name(std::string_view name);

struct StimulusContext {
    std::array<bool, kNumStimuli> flags{};

    bool operator[](Stimulus s) const { return flags[static_cast<std::size_t>(s)]; }
    bool& operator[](Stimulus s) { return flags[static_cast<std::size_t>(s)]; }
    bool operator==(const StimulusContext&) const = default;
};

enum class PlayerId : std::uint8_t { ID1 = 0, ID2 = 1 };

std::string_view player_name(PlayerId p);
std::optional<PlayerId> player_from_name(std::string_view name);

struct BehaviorRecord {
    PlayerId player = PlayerId::ID1;
    std::uint64_t tick = 0;
    StimulusContext context;
    Attribute behavior = Attribute::movement;

    bool operator==(const BehaviorRecord&) const = default;
};

struct SessionLog {
    PlayerId player = PlayerId::ID1;
    std::uint64_t seed = 0;
    std::string scenario_id;
    std::vector<BehaviorRecord> records;

    bool operator==(const SessionLog&) const = default;
};

/// The stimulus a behavior needs in order to be possible, if any.
/// listening and facing_prs both need person_facing.
std::optional<Stimulus> required_stimulus(Attribute a);

bool is_feasible(Attribute a, const StimulusContext& ctx);

struct Violation {
    std::uint64_t tick = 0;
    std::string rule;
};

std::vector<Violation> validate_session(const SessionLog& log);

// Dataset encoding of windows of behavior records.
enum class Occurrence : std::uint8_t { absent = 0, occurred = 1 };
enum class LocationValue : std::uint8_t { indoor = 0, outdoor = 1 };
enum class MovementValue : std::uint8_t { none = 0, walk = 1, run = 2 };

/// Column index of the player-ID class variable in behavior datasets.
inline constexpr std::size_t kClassColumn = kNumAttributes;

/// Ten attribute columns in index order followed by "ID".
std::vector<Variable> behavior_variables();
DataSet empty_behavior_dataset();

/// One row per non-overlapping window of `window` consecutive records;
/// trailing partial windows are dropped.
DataSet to_dataset(std::span<const SessionLog> logs, std::size_t window);

}  // namespace skt
