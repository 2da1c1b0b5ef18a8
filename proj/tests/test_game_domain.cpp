#include <doctest.h>

#include <cmath>

#include "skt/errors.hpp"
#include "skt/game_domain.hpp"
#include "skt/rng.hpp"
#include "support/oracles.hpp"

using namespace skt;

namespace {

Scenario flat(double p) {
    Scenario s;
    s.probability.fill(p);
    return s;
}

PlayerProfile point_mass_profile(Attribute on_obstacle, Attribute by_default) {
    PlayerProfile p;
    p.profile_id = "point";
    for (ConditionKey k : kAllConditionKeys) p[k][slot(by_default)] = 1.0;
    p[ConditionKey::obstacle] = {};
    p[ConditionKey::obstacle][slot(on_obstacle)] = 1.0;
    return p;
}

StimulusContext only(Stimulus s) {
    StimulusContext c;
    c[s] = true;
    return c;
}

}  // namespace

TEST_CASE("sample_context") {
    Rng rng(1);
    const auto all = sample_context(flat(1.0), rng);
    for (bool b : all.flags) CHECK(b);
    const auto none = sample_context(flat(0.0), rng);
    for (bool b : none.flags) CHECK_FALSE(b);

    Scenario half = flat(0.0);
    half[Stimulus::obstacle_present] = 0.5;
    int hits = 0;
    for (int i = 0; i < 10000; ++i) hits += sample_context(half, rng)[Stimulus::obstacle_present];
    CHECK(std::abs(hits / 10000.0 - 0.5) <= 0.03);
}

TEST_CASE("active keys: stimulus keys take precedence over location") {
    StimulusContext c;
    CHECK(active_keys(c) == std::vector<ConditionKey>{ConditionKey::outdoor});
    c[Stimulus::location_indoor] = true;
    CHECK(active_keys(c) == std::vector<ConditionKey>{ConditionKey::indoor});
    c[Stimulus::obstacle_present] = true;
    c[Stimulus::person_facing] = true;
    CHECK(active_keys(c) == std::vector<ConditionKey>{ConditionKey::person_facing, ConditionKey::obstacle});
}

TEST_CASE("choose_behavior examples") {
    Rng rng(3);
    const auto fighter = point_mass_profile(Attribute::fighting, Attribute::movement);
    CHECK(validate_profile(fighter).empty());
    CHECK(choose_behavior(fighter, only(Stimulus::obstacle_present), rng) == Attribute::fighting);
    for (int i = 0; i < 50; ++i) CHECK(choose_behavior(fighter, StimulusContext{}, rng) == Attribute::movement);
}

TEST_CASE("choose_behavior: obstacle-only context with the built-in expert") {
    // Only fighting, obstacle, location and movement are possible here, so
    // rejection sampling renormalizes the obstacle row over those four.
    const auto expert = table1_profiles().expert;
    const auto& row = expert[ConditionKey::obstacle];
    const double feasible_mass = row[slot(Attribute::fighting)] + row[slot(Attribute::obstacle)] +
                                 row[slot(Attribute::location)] + row[slot(Attribute::movement)];
    const double expected = row[slot(Attribute::fighting)] / feasible_mass;
    CHECK(expected == doctest::Approx(0.875));

    Rng rng(11);
    StimulusContext ctx = only(Stimulus::obstacle_present);
    int fights = 0;
    for (int i = 0; i < 10000; ++i) fights += choose_behavior(expert, ctx, rng) == Attribute::fighting;
    CHECK(std::abs(fights / 10000.0 - expected) <= 0.03);
}

TEST_CASE("choose_behavior falls back to the default key after 100 rejections") {
    PlayerProfile p = point_mass_profile(Attribute::fighting, Attribute::obstacle);
    // Horse key puts all mass on riding; without a horse nothing is feasible.
    p[ConditionKey::soldier_present] = {};
    p[ConditionKey::soldier_present][slot(Attribute::riding_hrs)] = 1.0;
    Rng rng(5);
    CHECK(choose_behavior(p, only(Stimulus::soldier_present), rng) == Attribute::obstacle);
}

TEST_CASE("choose_behavior rejects a default key with no feasible behavior") {
    PlayerProfile p = point_mass_profile(Attribute::fighting, Attribute::movement);
    p[ConditionKey::default_] = {};
    p[ConditionKey::default_][slot(Attribute::climbing)] = 1.0;
    Rng rng(5);
    CHECK_THROWS_AS(choose_behavior(p, StimulusContext{}, rng), ConfigError);
    CHECK_FALSE(validate_profile(p).empty());
}

TEST_CASE("run_session") {
    const auto profiles = table1_profiles();
    Scenario sc = Scenario::defaults();
    sc.ticks_per_session = 0;
    CHECK(run_session(sc, profiles.expert, PlayerId::ID1, 1).records.empty());

    sc.ticks_per_session = 1000;
    const auto a = run_session(sc, profiles.expert, PlayerId::ID1, 99);
    const auto b = run_session(sc, profiles.expert, PlayerId::ID1, 99);
    CHECK(a == b);
    CHECK(a.records.size() == 1000);
    CHECK(validate_session(a).empty());
    CHECK_FALSE(run_session(sc, profiles.expert, PlayerId::ID1, 100) == a);
}

TEST_CASE("run_sessions matches serial runs in request order") {
    const auto profiles = table1_profiles();
    const Scenario sc = Scenario::defaults();
    std::vector<SessionRequest> reqs;
    for (std::uint64_t i = 0; i < 6; ++i) {
        reqs.push_back({&sc, i % 2 ? &profiles.learner : &profiles.expert, i % 2 ? PlayerId::ID2 : PlayerId::ID1, 1000 + i});
    }
    const auto logs = run_sessions(reqs);
    REQUIRE(logs.size() == reqs.size());
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        CHECK(logs[i] == run_session(sc, *reqs[i].profile, reqs[i].player, reqs[i].seed));
    }
}

TEST_CASE("empirical frequencies match the exact tick law within 3 sigma") {
    const auto profiles = table1_profiles();
    for (const auto* profile : {&profiles.expert, &profiles.learner}) {
        for (const Scenario& sc : {Scenario::defaults(), flat(0.2)}) {
            Scenario s = sc;
            s.ticks_per_session = 10000;
            const auto law = oracle::tick_law(*profile, s);
            double total = 0.0;
            for (double p : law) total += p;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            const auto log = run_session(s, *profile, PlayerId::ID1, 2024);
            std::array<int, kNumAttributes> counts{};
            for (const auto& r : log.records) ++counts[slot(r.behavior)];
            for (std::size_t i = 0; i < kNumAttributes; ++i) {
                const double sigma = std::sqrt(law[i] * (1.0 - law[i]) / 10000.0);
                CHECK(std::abs(counts[i] / 10000.0 - law[i]) <= 3.0 * sigma + 1e-12);
            }
        }
    }
}

TEST_CASE("table1 profiles realize every linkage as an argmax") {
    const auto [expert, learner] = table1_profiles();
    CHECK(validate_profile(expert).empty());
    CHECK(validate_profile(learner).empty());
    using A = Attribute;
    using K = ConditionKey;
    auto argmax = [](const Distribution& d) {
        return attribute_at(static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin()));
    };
    CHECK(argmax(expert[K::obstacle]) == A::fighting);
    CHECK(argmax(expert[K::person_facing]) == A::facing_sol);
    CHECK(argmax(expert[K::horse_available]) == A::facing_sol);
    CHECK(expert[K::indoor] == expert[K::default_]);
    CHECK(expert[K::outdoor] == expert[K::default_]);
    const auto expert_climb = argmax(expert[K::climbing_opportunity]);
    CHECK((expert_climb == A::climbing || expert_climb == A::movement));
    CHECK(expert[K::climbing_opportunity][slot(A::climbing)] + expert[K::climbing_opportunity][slot(A::movement)] ==
          doctest::Approx(0.7));

    CHECK(argmax(learner[K::indoor]) == A::movement);
    CHECK(argmax(learner[K::outdoor]) == A::movement);
    CHECK(argmax(learner[K::climbing_opportunity]) == A::attack_civ);
    CHECK(argmax(learner[K::obstacle]) == A::listening);
    CHECK(argmax(learner[K::horse_available]) == A::listening);
    for (A a : {A::riding_hrs, A::climbing, A::attack_civ}) {
        CHECK(learner[K::person_facing][slot(a)] == doctest::Approx(0.7 / 3.0));
    }

    for (double s : {0.05, 0.3, 0.7, 1.0}) {
        const auto pair = table1_profiles(s);
        CHECK(validate_profile(pair.expert).empty());
        CHECK(validate_profile(pair.learner).empty());
        CHECK(pair.expert[K::obstacle][slot(A::fighting)] == doctest::Approx(s));
    }
    CHECK_THROWS_AS(table1_profiles(0.0), std::invalid_argument);
    CHECK_THROWS_AS(table1_profiles(1.5), std::invalid_argument);
}

TEST_CASE("validate_profile catches bad rows") {
    auto p = table1_profiles().expert;
    p[ConditionKey::obstacle][0] += 0.01;
    CHECK(validate_profile(p).size() == 1);
    p = table1_profiles().expert;
    p[ConditionKey::indoor] = {};
    p[ConditionKey::indoor][slot(Attribute::riding_hrs)] = 1.0;
    CHECK(validate_profile(p).size() == 1);
    p[ConditionKey::outdoor][0] = -0.1;
    CHECK(validate_profile(p).size() >= 2);
}

TEST_CASE("scenario validation") {
    Scenario s = Scenario::defaults();
    CHECK_NOTHROW(s.validate());
    s[Stimulus::horse_available] = 1.2;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
