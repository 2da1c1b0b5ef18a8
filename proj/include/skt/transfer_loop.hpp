#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "skt/bayes.hpp"
#include "skt/behavior_data.hpp"
#include "skt/game_domain.hpp"

namespace skt {

enum class SplitSeedPolicy : std::uint8_t {
    per_iteration,  ///< a fresh split seed for every iteration
    fixed,          ///< the iteration-0 split seed reused throughout
};

std::string_view split_seed_policy_name(SplitSeedPolicy p);
std::optional<SplitSeedPolicy> split_seed_policy_from_name(std::string_view name);

struct TransferConfig {
    double learning_rate = 0.5;
    double stop_threshold = 0.55;
    std::size_t max_iterations = 50;
    std::size_t window = 5;
    double split_ratio = 0.5;
    SplitSeedPolicy split_seed_policy = SplitSeedPolicy::per_iteration;
    /// Base stimulus scenario; its ticks_per_session sets the session length.
    Scenario scenario = Scenario::defaults();
    LearnConfig learn;

    /// Throws std::invalid_argument for out-of-range fields.
    void validate() const;

    bool operator==(const TransferConfig&) const = default;
};

/// Stimulus probability raised for a scheduled attribute.
inline constexpr double kScheduleBoost = 0.8;

struct StimulusSchedule {
    Scenario scenario;
    std::set<Attribute> targeted_attributes;
};

/// Stimulus a schedule raises to elicit an attribute; nullopt for location
/// and movement, which no stimulus gates.
std::optional<Stimulus> eliciting_stimulus(Attribute a);

StimulusSchedule build_schedule(const std::set<Attribute>& targets, const Scenario& base);

/// Markov blanket of the class node, mapped to attributes. Expects a network
/// over the behavior dataset schema.
std::set<Attribute> discriminative_attributes(const BayesNet& bn);

/// Keys on which the two profiles give `a` different probability (by more
/// than 1e-12). These are the keys a nudge must move to change how often the
/// learner shows `a`.
std::set<ConditionKey> linked_keys(Attribute a, const PlayerProfile& learner, const PlayerProfile& expert);

/// Linear pull toward the expert on `keys`:
///   learner'[k] = (1 - eta) learner[k] + eta expert[k].
/// Throws std::invalid_argument for eta outside (0, 1] or an invalid profile.
PlayerProfile nudge_profile(const PlayerProfile& learner, const PlayerProfile& expert,
                            const std::set<ConditionKey>& keys, double eta);

/// KL(p || q) in nats. Infinite when p has mass where q has none.
double kl_divergence(const Distribution& p, const Distribution& q);

/// Mean over all condition keys of KL(learner[k] || expert[k]).
double profile_divergence(const PlayerProfile& learner, const PlayerProfile& expert);

enum class TerminalReason : std::uint8_t { threshold_reached, max_iterations };

std::string_view terminal_reason_name(TerminalReason r);
std::optional<TerminalReason> terminal_reason_from_name(std::string_view name);

struct IterationRecord {
    std::size_t iteration = 1;  ///< 1-based
    double accuracy = 0.0;
    double divergence = 0.0;
    std::set<Attribute> targeted;
    /// Keys nudged at the end of this iteration; empty on the last one.
    std::set<ConditionKey> nudged_keys;
    /// Learner profile that produced this iteration's session.
    PlayerProfile learner;
    /// Stimulus scenario used for this iteration's sessions.
    Scenario scenario;

    bool operator==(const IterationRecord&) const = default;
};

struct TransferTrace {
    std::uint64_t seed = 0;
    PlayerProfile expert;
    std::vector<IterationRecord> iterations;
    TerminalReason terminal_reason = TerminalReason::max_iterations;

    bool operator==(const TransferTrace&) const = default;
};

/// Everything one identification pass produces.
struct Identification {
    BayesNet network;
    double accuracy = 0.0;
    std::set<Attribute> discriminative;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
};

/// Sessions for both players under `scenario`, with iteration-derived seeds.
std::vector<SessionLog> simulate_pair(const PlayerProfile& expert, const PlayerProfile& learner,
                                      const Scenario& scenario, std::uint64_t master_seed, std::uint64_t iteration);

/// Split, learn, fit and evaluate on a behavior dataset.
Identification identify(const DataSet& data, const TransferConfig& config, std::uint64_t master_seed,
                        std::uint64_t iteration);

/// The closed skill-transfer loop. Iteration i (0-based counter) uses
/// derive_seed(seed, i, stream) for both sessions, the split and the
/// structure search.
TransferTrace run_transfer(const PlayerProfile& expert, const PlayerProfile& learner0, const TransferConfig& config,
                           std::uint64_t seed);

/// Behavior tracked on each key's curve: the expert's most likely behavior
/// under that key (lowest index on ties).
Attribute reference_behavior(const PlayerProfile& expert, ConditionKey key);

/// Rows are (player, iteration) pairs; columns are the condition keys in
/// kAllConditionKeys order. Each value is P(reference behavior | key).
struct CurveTable {
    struct Row {
        PlayerId player = PlayerId::ID1;
        std::size_t iteration = 1;
        std::array<double, kNumConditionKeys> values{};
    };
    std::array<Attribute, kNumConditionKeys> reference{};
    std::vector<Row> rows;
};

CurveTable behavioral_curves(const TransferTrace& trace);
CurveTable behavioral_curves(const PlayerProfile& expert, const PlayerProfile& learner);

}  // namespace skt
