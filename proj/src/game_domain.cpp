#include "skt/game_domain.hpp"

#include <cmath>
#include <exception>
#include <initializer_list>
#include <stdexcept>

namespace skt {

namespace {

constexpr std::array<std::string_view, kNumConditionKeys> kKeyNames{
    "indoor",          "outdoor",         "person_facing", "climbing_opportunity", "obstacle",
    "horse_available", "soldier_present", "civilian_present", "default",
};

constexpr std::array<ConditionKey, 6> kStimulusKeys{
    ConditionKey::person_facing,   ConditionKey::climbing_opportunity, ConditionKey::obstacle,
    ConditionKey::horse_available, ConditionKey::soldier_present,      ConditionKey::civilian_present,
};

// `linked` gets `strength` split evenly; the remaining allowed behaviors share
// the rest.
Distribution linked_distribution(ConditionKey key, std::initializer_list<Attribute> linked, double strength) {
    const auto allowed = allowed_behaviors(key);
    Distribution d{};
    std::array<bool, kNumAttributes> is_linked{};
    for (Attribute a : linked) is_linked[slot(a)] = true;
    std::size_t n_rest = 0;
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        if (allowed[i] && !is_linked[i]) ++n_rest;
    }
    const double each_linked = linked.size() ? strength / static_cast<double>(linked.size()) : 0.0;
    const double rest_mass = linked.size() ? 1.0 - strength : 1.0;
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        if (is_linked[i]) {
            d[i] = each_linked;
        } else if (allowed[i] && n_rest > 0) {
            d[i] = rest_mass / static_cast<double>(n_rest);
        }
    }
    return d;
}

Distribution uniform_distribution(ConditionKey key) { return linked_distribution(key, {}, 0.0); }

}  // namespace

void Scenario::validate() const {
    for (std::size_t i = 0; i < kNumStimuli; ++i) {
        const double p = probability[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("scenario probability for " + std::string(stimulus_name(kAllStimuli[i])) +
                                        " must lie in [0, 1]");
        }
    }
}

Scenario Scenario::defaults() {
    Scenario s;
    // A stimulus-dense world: most ticks offer several conditions at once,
    // so condition-linked behaviors get many chances to show.
    s[Stimulus::location_indoor] = 0.5;
    s[Stimulus::obstacle_present] = 0.9;
    s[Stimulus::soldier_present] = 0.9;
    s[Stimulus::civilian_present] = 0.5;
    s[Stimulus::horse_available] = 0.9;
    s[Stimulus::climbable_present] = 0.5;
    s[Stimulus::person_facing] = 0.9;
    return s;
}

std::string_view condition_key_name(ConditionKey k) { return kKeyNames.at(static_cast<std::size_t>(k)); }

std::optional<ConditionKey> condition_key_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNumConditionKeys; ++i) {
        if (kKeyNames[i] == name) return kAllConditionKeys[i];
    }
    return std::nullopt;
}

std::optional<Stimulus> key_stimulus(ConditionKey k) {
    switch (k) {
        case ConditionKey::person_facing: return Stimulus::person_facing;
        case ConditionKey::climbing_opportunity: return Stimulus::climbable_present;
        case ConditionKey::obstacle: return Stimulus::obstacle_present;
        case ConditionKey::horse_available: return Stimulus::horse_available;
        case ConditionKey::soldier_present: return Stimulus::soldier_present;
        case ConditionKey::civilian_present: return Stimulus::civilian_present;
        default: return std::nullopt;
    }
}

std::array<bool, kNumAttributes> allowed_behaviors(ConditionKey k) {
    std::array<bool, kNumAttributes> out{};
    const bool stimulus_driven = key_stimulus(k).has_value();
    for (Attribute a : kAllAttributes) {
        out[slot(a)] = stimulus_driven || !required_stimulus(a).has_value();
    }
    return out;
}

std::vector<ConditionKey> active_keys(const StimulusContext& ctx) {
    std::vector<ConditionKey> keys;
    for (ConditionKey k : kStimulusKeys) {
        if (ctx[*key_stimulus(k)]) keys.push_back(k);
    }
    if (keys.empty()) {
        keys.push_back(ctx[Stimulus::location_indoor] ? ConditionKey::indoor : ConditionKey::outdoor);
    }
    return keys;
}

std::vector<std::string> validate_profile(const PlayerProfile& profile) {
    std::vector<std::string> problems;
    for (ConditionKey k : kAllConditionKeys) {
        const auto& d = profile[k];
        const auto allowed = allowed_behaviors(k);
        const std::string where = "profile '" + profile.profile_id + "' key " + std::string(condition_key_name(k));
        double total = 0.0;
        for (std::size_t i = 0; i < kNumAttributes; ++i) {
            if (!(d[i] >= 0.0) || !std::isfinite(d[i])) {
                problems.push_back(where + ": probability of " + std::string(attribute_name(attribute_at(i))) +
                                   " is not a non-negative number");
            } else if (d[i] > 0.0 && !allowed[i]) {
                problems.push_back(where + ": " + std::string(attribute_name(attribute_at(i))) +
                                   " is not possible when this key applies");
            }
            total += d[i];
        }
        if (!(std::abs(total - 1.0) <= 1e-9)) {
            problems.push_back(where + ": probabilities sum to " + std::to_string(total));
        }
    }
    return problems;
}

StimulusContext sample_context(const Scenario& scenario, Rng& rng) {
    StimulusContext ctx;
    for (std::size_t i = 0; i < kNumStimuli; ++i) ctx.flags[i] = rng.bernoulli(scenario.probability[i]);
    return ctx;
}

Attribute choose_behavior(const PlayerProfile& profile, const StimulusContext& ctx, Rng& rng) {
    Distribution fallback = profile[ConditionKey::default_];
    double fallback_mass = 0.0;
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        if (!is_feasible(attribute_at(i), ctx)) fallback[i] = 0.0;
        fallback_mass += fallback[i];
    }
    if (!(fallback_mass > 0.0)) {
        throw ConfigError("profile '" + profile.profile_id + "': default key has no feasible behavior");
    }

    const auto keys = active_keys(ctx);
    const ConditionKey key = keys[rng.below(keys.size())];
    const auto& dist = profile[key];
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        const Attribute b = attribute_at(rng.categorical(dist));
        if (is_feasible(b, ctx)) return b;
    }
    return attribute_at(rng.categorical(fallback));
}

SessionLog run_session(const Scenario& scenario, const PlayerProfile& profile, PlayerId player,
                       std::uint64_t seed) {
    scenario.validate();
    SessionLog log;
    log.player = player;
    log.seed = seed;
    log.scenario_id = scenario.scenario_id;
    log.records.reserve(scenario.ticks_per_session);
    Rng rng(seed);
    for (std::size_t t = 0; t < scenario.ticks_per_session; ++t) {
        BehaviorRecord rec;
        rec.player = player;
        rec.tick = t;
        rec.context = sample_context(scenario, rng);
        rec.behavior = choose_behavior(profile, rec.context, rng);
        log.records.push_back(rec);
    }
    return log;
}

std::vector<SessionLog> run_sessions(std::span<const SessionRequest> requests) {
    std::vector<SessionLog> logs(requests.size());
    const auto n = static_cast<std::ptrdiff_t>(requests.size());
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const auto& r = requests[static_cast<std::size_t>(i)];
            logs[static_cast<std::size_t>(i)] = run_session(*r.scenario, *r.profile, r.player, r.seed);
        } catch (...) {
#pragma omp critical(skt_run_sessions_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return logs;
}

ProfilePair table1_profiles(double s) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("linkage strength must lie in (0, 1]");
    using A = Attribute;
    using K = ConditionKey;

    PlayerProfile expert;
    expert.profile_id = "table1-expert";
    expert[K::default_] = uniform_distribution(K::default_);
    // Location does not change the expert's behavior.
    expert[K::indoor] = expert[K::default_];
    expert[K::outdoor] = expert[K::default_];
    expert[K::person_facing] = linked_distribution(K::person_facing, {A::facing_sol}, s);
    // No social behavior around climbables: weight goes to climbing and moving.
    expert[K::climbing_opportunity] = linked_distribution(K::climbing_opportunity, {A::climbing, A::movement}, s);
    expert[K::obstacle] = linked_distribution(K::obstacle, {A::fighting}, s);
    expert[K::horse_available] = linked_distribution(K::horse_available, {A::facing_sol}, s);
    expert[K::soldier_present] = uniform_distribution(K::soldier_present);
    expert[K::civilian_present] = uniform_distribution(K::civilian_present);

    PlayerProfile learner;
    learner.profile_id = "table1-learner";
    learner[K::default_] = uniform_distribution(K::default_);
    // Walks indoors, runs outdoors: both are movement events.
    learner[K::indoor] = linked_distribution(K::indoor, {A::movement}, s);
    learner[K::outdoor] = linked_distribution(K::outdoor, {A::movement}, s);
    learner[K::person_facing] = linked_distribution(K::person_facing, {A::riding_hrs, A::climbing, A::attack_civ}, s);
    learner[K::climbing_opportunity] = linked_distribution(K::climbing_opportunity, {A::attack_civ}, s);
    learner[K::obstacle] = linked_distribution(K::obstacle, {A::listening}, s);
    learner[K::horse_available] = linked_distribution(K::horse_available, {A::listening}, s);
    learner[K::soldier_present] = uniform_distribution(K::soldier_present);
    learner[K::civilian_present] = uniform_distribution(K::civilian_present);

    return {expert, learner};
}

}  // namespace skt
