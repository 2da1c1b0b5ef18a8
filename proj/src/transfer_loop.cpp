#include "skt/transfer_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skt/rng.hpp"

namespace skt {

namespace {

void require_valid(const PlayerProfile& p) {
    const auto problems = validate_profile(p);
    if (!problems.empty()) throw ConfigError(problems.front());
}

// x log x - x + 1, accurate near x = 1.
double bregman_term(double x) {
    const double u = x - 1.0;
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return u2 * (0.5 - u / 6.0 + u2 / 12.0 - u2 * u / 20.0);
    }
    return x * std::log(x) - x + 1.0;
}

}  // namespace

std::string_view split_seed_policy_name(SplitSeedPolicy p) {
    return p == SplitSeedPolicy::fixed ? "fixed" : "per_iteration";
}

std::optional<SplitSeedPolicy> split_seed_policy_from_name(std::string_view name) {
    if (name == "per_iteration") return SplitSeedPolicy::per_iteration;
    if (name == "fixed") return SplitSeedPolicy::fixed;
    return std::nullopt;
}

std::string_view terminal_reason_name(TerminalReason r) {
    return r == TerminalReason::threshold_reached ? "threshold_reached" : "max_iterations";
}

std::optional<TerminalReason> terminal_reason_from_name(std::string_view name) {
    if (name == "threshold_reached") return TerminalReason::threshold_reached;
    if (name == "max_iterations") return TerminalReason::max_iterations;
    return std::nullopt;
}

void TransferConfig::validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw std::invalid_argument("learning_rate must lie in (0, 1]");
    if (!(stop_threshold >= 0.5 && stop_threshold < 1.0)) throw std::invalid_argument("stop_threshold must lie in [0.5, 1)");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (window < 1) throw std::invalid_argument("window must be at least 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw std::invalid_argument("split_ratio must lie in (0, 1)");
    if (scenario.ticks_per_session < 1) throw std::invalid_argument("ticks_per_session must be at least 1");
    scenario.validate();
    learn.validate();
}

std::optional<Stimulus> eliciting_stimulus(Attribute a) {
    switch (a) {
        case Attribute::fighting:
        case Attribute::obstacle: return Stimulus::obstacle_present;
        case Attribute::location:
        case Attribute::movement: return std::nullopt;
        default: return required_stimulus(a);
    }
}

StimulusSchedule build_schedule(const std::set<Attribute>& targets, const Scenario& base) {
    StimulusSchedule schedule{base, targets};
    for (Attribute a : targets) {
        if (const auto s = eliciting_stimulus(a)) schedule.scenario[*s] = std::max(base[*s], kScheduleBoost);
    }
    return schedule;
}

std::set<Attribute> discriminative_attributes(const BayesNet& bn) {
    std::set<Attribute> out;
    for (std::size_t v : markov_blanket(bn.dag(), bn.class_index())) {
        if (const auto a = attribute_from_name(bn.variables()[v].name)) out.insert(*a);
    }
    return out;
}

std::set<ConditionKey> linked_keys(Attribute a, const PlayerProfile& learner, const PlayerProfile& expert) {
    std::set<ConditionKey> keys;
    for (ConditionKey k : kAllConditionKeys) {
        if (std::abs(learner[k][slot(a)] - expert[k][slot(a)]) > 1e-12) keys.insert(k);
    }
    return keys;
}

PlayerProfile nudge_profile(const PlayerProfile& learner, const PlayerProfile& expert,
                            const std::set<ConditionKey>& keys, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("learning rate must lie in (0, 1]");
    for (const auto* p : {&learner, &expert}) {
        const auto problems = validate_profile(*p);
        if (!problems.empty()) throw std::invalid_argument(problems.front());
    }
    PlayerProfile out = learner;
    for (ConditionKey k : keys) {
        auto& d = out[k];
        for (std::size_t i = 0; i < kNumAttributes; ++i) {
            d[i] = eta == 1.0 ? expert[k][i] : (1.0 - eta) * learner[k][i] + eta * expert[k][i];
        }
    }
    return out;
}

double kl_divergence(const Distribution& p, const Distribution& q) {
    // Bregman form sum_i q_i phi(p_i / q_i): every term is non-negative, so
    // small divergences keep their relative precision.
    double total = 0.0;
    for (std::size_t i = 0; i < kNumAttributes; ++i) {
        if (q[i] == 0.0) {
            if (p[i] > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        total += q[i] * bregman_term(p[i] / q[i]);
    }
    return total;
}

double profile_divergence(const PlayerProfile& learner, const PlayerProfile& expert) {
    double total = 0.0;
    for (ConditionKey k : kAllConditionKeys) total += kl_divergence(learner[k], expert[k]);
    return total / static_cast<double>(kNumConditionKeys);
}

std::vector<SessionLog> simulate_pair(const PlayerProfile& expert, const PlayerProfile& learner,
                                      const Scenario& scenario, std::uint64_t master_seed, std::uint64_t iteration) {
    const std::array<SessionRequest, 2> requests{{
        {&scenario, &expert, PlayerId::ID1, derive_seed(master_seed, iteration, Stream::expert_session)},
        {&scenario, &learner, PlayerId::ID2, derive_seed(master_seed, iteration, Stream::learner_session)},
    }};
    return run_sessions(requests);
}

Identification identify(const DataSet& data, const TransferConfig& config, std::uint64_t master_seed,
                        std::uint64_t iteration) {
    const std::uint64_t split_counter = config.split_seed_policy == SplitSeedPolicy::fixed ? 0 : iteration;
    auto [train, test] = split(data, config.split_ratio, derive_seed(master_seed, split_counter, Stream::split));
    LearnConfig learn = config.learn;
    learn.seed = derive_seed(master_seed, iteration, Stream::structure);
    const Dag dag = learn_structure(train, learn);
    BayesNet bn = fit_cpts(dag, train, learn.smoothing);
    const double acc = accuracy(bn, test);
    auto disc = discriminative_attributes(bn);
    return {std::move(bn), acc, std::move(disc), train.num_rows(), test.num_rows()};
}

TransferTrace run_transfer(const PlayerProfile& expert, const PlayerProfile& learner0, const TransferConfig& config,
                           std::uint64_t seed) {
    config.validate();
    require_valid(expert);
    require_valid(learner0);

    TransferTrace trace;
    trace.seed = seed;
    trace.expert = expert;
    PlayerProfile learner = learner0;
    StimulusSchedule schedule = build_schedule({}, config.scenario);

    for (std::size_t i = 0; i < config.max_iterations; ++i) {
        const auto logs = simulate_pair(expert, learner, schedule.scenario, seed, i);
        const DataSet data = to_dataset(logs, config.window);
        const Identification id = identify(data, config, seed, i);

        IterationRecord rec;
        rec.iteration = i + 1;
        rec.accuracy = id.accuracy;
        rec.divergence = profile_divergence(learner, expert);
        rec.targeted = id.discriminative;
        rec.learner = learner;
        rec.scenario = schedule.scenario;

        if (id.accuracy <= config.stop_threshold || id.discriminative.empty()) {
            trace.iterations.push_back(std::move(rec));
            trace.terminal_reason = TerminalReason::threshold_reached;
            return trace;
        }
        if (i + 1 == config.max_iterations) {
            trace.iterations.push_back(std::move(rec));
            break;
        }

        for (Attribute a : id.discriminative) {
            const auto keys = linked_keys(a, learner, expert);
            rec.nudged_keys.insert(keys.begin(), keys.end());
        }
        learner = nudge_profile(learner, expert, rec.nudged_keys, config.learning_rate);
        schedule = build_schedule(id.discriminative, config.scenario);
        trace.iterations.push_back(std::move(rec));
    }
    trace.terminal_reason = TerminalReason::max_iterations;
    return trace;
}

Attribute reference_behavior(const PlayerProfile& expert, ConditionKey key) {
    const auto& d = expert[key];
    return attribute_at(static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin()));
}

CurveTable behavioral_curves(const TransferTrace& trace) {
    CurveTable table;
    for (std::size_t k = 0; k < kNumConditionKeys; ++k) {
        table.reference[k] = reference_behavior(trace.expert, kAllConditionKeys[k]);
    }
    auto row_for = [&](PlayerId player, std::size_t iteration, const PlayerProfile& profile) {
        CurveTable::Row row{player, iteration, {}};
        for (std::size_t k = 0; k < kNumConditionKeys; ++k) row.values[k] = profile.distributions[k][slot(table.reference[k])];
        return row;
    };
    for (const auto& rec : trace.iterations) {
        table.rows.push_back(row_for(PlayerId::ID1, rec.iteration, trace.expert));
        table.rows.push_back(row_for(PlayerId::ID2, rec.iteration, rec.learner));
    }
    return table;
}

CurveTable behavioral_curves(const PlayerProfile& expert, const PlayerProfile& learner) {
    TransferTrace trace;
    trace.expert = expert;
    IterationRecord rec;
    rec.learner = learner;
    trace.iterations.push_back(std::move(rec));
    return behavioral_curves(trace);
}

}  // namespace skt
