#include "skt/behavior_data.hpp"

#include <stdexcept>

namespace skt {

namespace {

constexpr std::array<std::string_view, kNumAttributes> kAttributeNames{
    "fighting", "obstacle",   "riding_hrs", "facing_sol", "climbing",
    "location", "facing_prs", "movement",   "listening",  "attack_civ",
};

constexpr std::array<std::string_view, kNumStimuli> kStimulusNames{
    "location_indoor",  "obstacle_present",  "soldier_present", "civilian_present",
    "horse_available",  "climbable_present", "person_facing",
};

}  // namespace

std::string_view attribute_name(Attribute a) { return kAttributeNames.at(slot(a)); }

std::optional<Attribute> attribute_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        if (kAttributeNames[i] == name) return attribute_at(i);
    }
    return std::nullopt;
}

std::string_view stimulus_name(Stimulus s) { return kStimulusNames.at(static_cast<std::size_t>(s)); }

std::optional<Stimulus> stimulus_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNumStimuli; ++i) {
        if (kStimulusNames[i] == name) return kAllStimuli[i];
    }
    return std::nullopt;
}

std::string_view player_name(PlayerId p) { return p == PlayerId::ID1 ? "ID1" : "ID2"; }

std::optional<PlayerId> player_from_name(std::string_view name) {
    if (name == "ID1") return PlayerId::ID1;
    if (name == "ID2") return PlayerId::ID2;
    return std::nullopt;
}

std::optional<Stimulus> required_stimulus(Attribute a) {
    switch (a) {
        case Attribute::riding_hrs: return Stimulus::horse_available;
        case Attribute::facing_sol: return Stimulus::soldier_present;
        case Attribute::attack_civ: return Stimulus::civilian_present;
        case Attribute::climbing: return Stimulus::climbable_present;
        case Attribute::listening:
        case Attribute::facing_prs: return Stimulus::person_facing;
        default: return std::nullopt;
    }
}

bool is_feasible(Attribute a, const StimulusContext& ctx) {
    const auto need = required_stimulus(a);
    return !need || ctx[*need];
}

std::vector<Violation> validate_session(const SessionLog& log) {
    std::vector<Violation> out;
    bool have_prev = false;
    std::uint64_t prev = 0;
    for (const auto& rec : log.records) {
        if (have_prev && rec.tick <= prev) {
            out.push_back({rec.tick, "tick not strictly increasing (previous " + std::to_string(prev) + ")"});
        }
        if (rec.player != log.player) {
            out.push_back({rec.tick, "record player " + std::string(player_name(rec.player)) +
                                         " differs from log player " + std::string(player_name(log.player))});
        }
        if (!is_feasible(rec.behavior, rec.context)) {
            out.push_back({rec.tick, std::string(attribute_name(rec.behavior)) + " requires " +
                                         std::string(stimulus_name(*required_stimulus(rec.behavior)))});
        }
        have_prev = true;
        prev = rec.tick;
    }
    return out;
}

std::vector<Variable> behavior_variables() {
    std::vector<Variable> vars;
    vars.reserve(kNumAttributes + 1);
    for (Attribute a : kAllAttributes) {
        Variable v{std::string(attribute_name(a)), {}};
        if (a == Attribute::location) {
            v.states = {"indoor", "outdoor"};
        } else if (a == Attribute::movement) {
            v.states = {"none", "walk", "run"};
        } else {
            v.states = {"absent", "occurred"};
        }
        vars.push_back(std::move(v));
    }
    vars.push_back({"ID", {"ID1", "ID2"}});
    return vars;
}

DataSet empty_behavior_dataset() { return DataSet(behavior_variables(), kClassColumn); }

DataSet to_dataset(std::span<const SessionLog> logs, std::size_t window) {
    if (window == 0) throw std::invalid_argument("window must be at least 1");
    if (logs.empty()) throw std::invalid_argument("to_dataset needs at least one session log");

    DataSet data = empty_behavior_dataset();
    std::size_t total = 0;
    for (const auto& log : logs) total += log.records.size() / window;
    data.reserve(total);

    std::array<std::uint8_t, kNumAttributes + 1> row{};
    for (const auto& log : logs) {
        const std::size_t windows = log.records.size() / window;
        for (std::size_t w = 0; w < windows; ++w) {
            std::array<bool, kNumAttributes> seen{};
            std::size_t indoor = 0;
            std::array<std::size_t, 3> moves{};  // none, walk, run
            for (std::size_t i = w * window; i < (w + 1) * window; ++i) {
                const auto& rec = log.records[i];
                seen[slot(rec.behavior)] = true;
                const bool in = rec.context[Stimulus::location_indoor];
                indoor += in ? 1 : 0;
                if (rec.behavior == Attribute::movement) {
                    ++moves[in ? 1 : 2];
                } else {
                    ++moves[0];
                }
            }
            for (std::size_t s = 0; s < kNumAttributes; ++s) {
                row[s] = static_cast<std::uint8_t>(seen[s] ? Occurrence::occurred : Occurrence::absent);
            }
            // Ties favour indoor.
            row[slot(Attribute::location)] = static_cast<std::uint8_t>(
                2 * indoor >= window ? LocationValue::indoor : LocationValue::outdoor);
            // Ties resolve walk, then run, then none.
            MovementValue mv = MovementValue::walk;
            std::size_t best = moves[1];
            if (moves[2] > best) {
                mv = MovementValue::run;
                best = moves[2];
            }
            if (moves[0] > best) mv = MovementValue::none;
            row[slot(Attribute::movement)] = static_cast<std::uint8_t>(mv);
            row[kClassColumn] = static_cast<std::uint8_t>(log.player);
            data.add_row(row);
        }
    }
    return data;
}

}  // namespace skt
