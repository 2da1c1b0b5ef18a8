#include <doctest.h>

#include <charconv>
#include <random>
#include <sstream>

#include "skt/errors.hpp"
#include "skt/io.hpp"
#include "skt/rng.hpp"
#include "support/oracles.hpp"

using namespace skt;

namespace {

std::string dump(const io::Json& j) { return j.dump(2); }

TransferTrace short_trace() {
    const auto [expert, learner] = table1_profiles();
    TransferConfig cfg;
    cfg.max_iterations = 3;
    return run_transfer(expert, learner, cfg, 2);
}

}  // namespace

TEST_CASE("format_double is shortest and exact") {
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1.0) == "1");
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = i % 2 ? u(gen) : u(gen) * 1e-12;
        const auto s = io::format_double(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
}

TEST_CASE("session logs round-trip through JSON Lines") {
    const auto profiles = table1_profiles();
    Scenario sc = Scenario::defaults();
    sc.ticks_per_session = 300;
    const auto log = run_session(sc, profiles.learner, PlayerId::ID2, 8);
    std::stringstream ss;
    io::write_session_jsonl(ss, log);
    const auto text = ss.str();
    CHECK(text.rfind("{\"tick\":0,\"player\":\"ID2\",\"context\":{\"location_indoor\":", 0) == 0);
    const auto back = io::read_session_jsonl(ss, log.seed, log.scenario_id);
    CHECK(back == log);
    std::stringstream again;
    io::write_session_jsonl(again, back);
    CHECK(again.str() == text);
}

TEST_CASE("session reader reports the bad line") {
    const std::string good =
        R"({"tick":0,"player":"ID1","context":{"location_indoor":true,"obstacle_present":false,"soldier_present":false,"civilian_present":false,"horse_available":false,"climbable_present":false,"person_facing":false},"behavior":"fighting"})";
    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return io::read_session_jsonl(in);
    };
    CHECK(read(good + "\n").records.size() == 1);
    CHECK_THROWS_WITH_AS(read(good + "\nnot json\n"), doctest::Contains("line 2"), DataError);
    std::string bad_behavior = good;
    bad_behavior.replace(bad_behavior.find("fighting"), 8, "flying");
    CHECK_THROWS_AS(read(bad_behavior), DataError);
    std::string extra = good;
    extra.insert(1, "\"note\":1,");
    CHECK_THROWS_WITH_AS(read(extra), doctest::Contains("note"), DataError);
    std::string missing = good;
    missing.erase(missing.find("\"person_facing\""), std::string("\"person_facing\":false").size());
    missing.erase(missing.find(",}"), 1);
    CHECK_THROWS_WITH_AS(read(missing), doctest::Contains("person_facing"), DataError);
}

TEST_CASE("datasets round-trip through CSV") {
    const auto profiles = table1_profiles();
    const auto pair = simulate_pair(profiles.expert, profiles.learner, Scenario::defaults(), 4, 0);
    const DataSet d = to_dataset(pair, 5);
    std::stringstream ss;
    io::write_dataset_csv(ss, d);
    const auto text = ss.str();
    CHECK(text.rfind("fighting,obstacle,riding_hrs,facing_sol,climbing,location,facing_prs,movement,listening,attack_civ,ID\n", 0) == 0);
    CHECK(io::read_dataset_csv(ss) == d);

    std::istringstream bad_header("fighting,ID\n");
    CHECK_THROWS_AS(io::read_dataset_csv(bad_header), DataError);
    std::istringstream bad_value(text.substr(0, text.find('\n') + 1) +
                                 "occurred,absent,absent,absent,absent,indoor,absent,jog,absent,absent,ID1\n");
    CHECK_THROWS_WITH_AS(io::read_dataset_csv(bad_value), doctest::Contains("movement"), DataError);
}

TEST_CASE("profiles round-trip byte for byte") {
    Rng rng(3);
    std::vector<PlayerProfile> profiles{table1_profiles().expert, table1_profiles(0.33).learner};
    for (int i = 0; i < 20; ++i) {
        PlayerProfile p;
        p.profile_id = "r" + std::to_string(i);
        for (ConditionKey k : kAllConditionKeys) {
            const auto allowed = allowed_behaviors(k);
            double total = 0.0;
            for (std::size_t a = 0; a < kNumAttributes; ++a) total += p[k][a] = allowed[a] ? rng.uniform() : 0.0;
            for (double& x : p[k]) x /= total;
        }
        if (validate_profile(p).empty()) profiles.push_back(p);
    }
    for (const auto& p : profiles) {
        const auto text = dump(io::profile_to_json(p));
        const auto back = io::profile_from_json(io::Json::parse(text));
        CHECK(back == p);
        CHECK(dump(io::profile_to_json(back)) == text);
    }
    auto j = io::profile_to_json(profiles[0]);
    j["distributions"]["obstacle"]["fighting"] = 0.9;
    CHECK_THROWS_AS(io::profile_from_json(j), DataError);
    j = io::profile_to_json(profiles[0]);
    j["distributions"].erase("default");
    CHECK_THROWS_WITH_AS(io::profile_from_json(j), doctest::Contains("default"), DataError);
}

TEST_CASE("scenarios round-trip") {
    Scenario s = Scenario::defaults();
    s.scenario_id = "dense";
    s.ticks_per_session = 1234;
    CHECK(io::scenario_from_json(io::scenario_to_json(s)) == s);
    auto j = io::scenario_to_json(s);
    j["probabilities"]["horse_available"] = 3;
    CHECK_THROWS_AS(io::scenario_from_json(j), DataError);
}

TEST_CASE("networks round-trip") {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 20; ++i) {
        const BayesNet bn = oracle::random_network(gen, 2 + static_cast<std::size_t>(i) % 10);
        const auto text = dump(io::network_to_json(bn));
        const BayesNet back = io::network_from_json(io::Json::parse(text));
        CHECK(back == bn);
        CHECK(dump(io::network_to_json(back)) == text);
    }
    const auto profiles = table1_profiles();
    const auto pair = simulate_pair(profiles.expert, profiles.learner, Scenario::defaults(), 6, 0);
    const DataSet d = to_dataset(pair, 5);
    const BayesNet bn = fit_cpts(learn_structure(d, LearnConfig{}), d, 1.0);
    const auto j = io::network_to_json(bn);
    CHECK(io::network_from_json(j) == bn);
    CHECK(j["class"] == "ID");

    auto broken = j;
    broken["cpts"][0]["rows"][0]["probabilities"][0] = 0.99;
    CHECK_THROWS_AS(io::network_from_json(broken), DataError);
    broken = j;
    broken["edges"].push_back({"ID", "nowhere"});
    CHECK_THROWS_WITH_AS(io::network_from_json(broken), doctest::Contains("nowhere"), DataError);
}

TEST_CASE("traces and curves") {
    const auto trace = short_trace();
    const auto text = dump(io::trace_to_json(trace));
    const auto back = io::trace_from_json(io::Json::parse(text));
    CHECK(back == trace);
    CHECK(dump(io::trace_to_json(back)) == text);

    std::ostringstream csv;
    io::write_trace_csv(csv, trace);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "iteration,accuracy,divergence,targeted,terminal_reason");
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == trace.iterations.size());
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) CHECK(rows[i].back() == ',');
    CHECK(rows.back().substr(rows.back().rfind(',') + 1) == terminal_reason_name(trace.terminal_reason));

    std::ostringstream curves;
    io::write_curves_csv(curves, behavioral_curves(trace));
    std::istringstream cl(curves.str());
    std::size_t n_lines = 0;
    while (std::getline(cl, line)) {
        ++n_lines;
        CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) == 1 + 2 * trace.iterations.size());
    }
    CHECK(n_lines == 1 + kNumConditionKeys);
    CHECK(curves.str().rfind("condition,reference_behavior,ID1@1,ID2@1", 0) == 0);
}
