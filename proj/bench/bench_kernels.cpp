// Serial reference vs OpenMP kernels on simulated behavior data.
#include <benchmark/benchmark.h>

#include <map>

#include "skt/bayes.hpp"
#include "skt/behavior_data.hpp"
#include "skt/game_domain.hpp"
#include "skt/kernels.hpp"
#include "skt/rng.hpp"

namespace {

using namespace skt;

const DataSet& data_with_rows(std::size_t rows) {
    static std::map<std::size_t, DataSet> cache;
    auto it = cache.find(rows);
    if (it != cache.end()) return it->second;
    const auto profiles = table1_profiles();
    Scenario scenario = Scenario::defaults();
    scenario.ticks_per_session = rows / 2 * 5;
    const std::array<SessionRequest, 2> reqs{{
        {&scenario, &profiles.expert, PlayerId::ID1, derive_seed(7, 0, Stream::expert_session)},
        {&scenario, &profiles.learner, PlayerId::ID2, derive_seed(7, 0, Stream::learner_session)},
    }};
    const auto logs = run_sessions(reqs);
    return cache.emplace(rows, to_dataset(logs, 5)).first->second;
}

std::vector<kernels::Family> all_families(std::size_t n, std::size_t max_parents) {
    std::vector<kernels::Family> out;
    for (std::size_t child = 0; child < n; ++child) {
        out.push_back({child, {}});
        for (std::size_t a = 0; a < n; ++a) {
            if (a == child) continue;
            out.push_back({child, {a}});
            if (max_parents < 2) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (b != child) out.push_back({child, {a, b}});
            }
        }
    }
    return out;
}

const std::vector<std::size_t> kParents{0, 3, 9};

void BM_FamilyCountsSerial(benchmark::State& state) {
    const auto& data = data_with_rows(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::family_counts(data, kClassColumn, kParents));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FamilyCountsParallel(benchmark::State& state) {
    const auto& data = data_with_rows(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::family_counts(data, kClassColumn, kParents));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FamilyScoresSerial(benchmark::State& state) {
    const auto& data = data_with_rows(static_cast<std::size_t>(state.range(0)));
    const auto fams = all_families(data.num_vars(), 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::family_scores(data, fams));
}

void BM_FamilyScoresParallel(benchmark::State& state) {
    const auto& data = data_with_rows(static_cast<std::size_t>(state.range(0)));
    const auto fams = all_families(data.num_vars(), 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::family_scores(data, fams));
}

const BayesNet& fitted(std::size_t rows) {
    static std::map<std::size_t, BayesNet> cache;
    auto it = cache.find(rows);
    if (it != cache.end()) return it->second;
    const auto& data = data_with_rows(rows);
    LearnConfig cfg;
    cfg.restarts = 0;
    return cache.emplace(rows, fit_cpts(learn_structure(data, cfg), data, 1.0)).first->second;
}

void BM_AccuracySerial(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto& bn = fitted(rows);
    const auto& data = data_with_rows(rows);
    for (auto _ : state) benchmark::DoNotOptimize(serial::accuracy(bn, data));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AccuracyParallel(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto& bn = fitted(rows);
    const auto& data = data_with_rows(rows);
    for (auto _ : state) benchmark::DoNotOptimize(accuracy(bn, data));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<SessionRequest> session_requests(const Scenario& scenario, const ProfilePair& profiles, std::size_t n) {
    std::vector<SessionRequest> reqs;
    for (std::size_t i = 0; i < n; ++i) {
        reqs.push_back({&scenario, i % 2 ? &profiles.learner : &profiles.expert, i % 2 ? PlayerId::ID2 : PlayerId::ID1,
                        derive_seed(11, i, Stream::expert_session)});
    }
    return reqs;
}

void BM_SessionsSerial(benchmark::State& state) {
    const auto profiles = table1_profiles();
    const Scenario scenario = Scenario::defaults();
    const auto reqs = session_requests(scenario, profiles, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        for (const auto& r : reqs) benchmark::DoNotOptimize(run_session(*r.scenario, *r.profile, r.player, r.seed));
    }
}

void BM_SessionsParallel(benchmark::State& state) {
    const auto profiles = table1_profiles();
    const Scenario scenario = Scenario::defaults();
    const auto reqs = session_requests(scenario, profiles, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_sessions(reqs));
}

}  // namespace

BENCHMARK(BM_FamilyCountsSerial)->Arg(1 << 12)->Arg(1 << 17);
BENCHMARK(BM_FamilyCountsParallel)->Arg(1 << 12)->Arg(1 << 17);
BENCHMARK(BM_FamilyScoresSerial)->Arg(800)->Arg(1 << 15);
BENCHMARK(BM_FamilyScoresParallel)->Arg(800)->Arg(1 << 15);
BENCHMARK(BM_AccuracySerial)->Arg(800)->Arg(1 << 17);
BENCHMARK(BM_AccuracyParallel)->Arg(800)->Arg(1 << 17);
BENCHMARK(BM_SessionsSerial)->Arg(8);
BENCHMARK(BM_SessionsParallel)->Arg(8);

BENCHMARK_MAIN();
