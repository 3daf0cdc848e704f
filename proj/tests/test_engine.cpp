#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "asuman/analytics.hpp"
#include "asuman/engine.hpp"
#include "asuman/errors.hpp"

using namespace asuman;

namespace {

// Stationary mean of an age that rises at rate `up` and resets to 0 at rate
// `reset`: the chain is geometric, P(k) = (1 - q) q^k with q = up / (up + reset).
double birth_reset_mean(double up, double reset) {
    const double q = up / (up + reset);
    double mean = 0.0, pk = 1.0 - q;
    for (int k = 0; k < 100000 && pk > 0.0; ++k) {
        mean += k * pk;
        pk *= q;
    }
    return mean;
}

SimConfig base_config(std::size_t n, Scheme scheme) {
    SimConfig cfg;
    cfg.n = n;
    cfg.lambda_e = 1.0;
    cfg.lambda = 1.0;
    cfg.budget = static_cast<double>(n);
    cfg.scheme = scheme;
    cfg.horizon = 2000.0;
    cfg.seed = 17;
    return cfg;
}

std::string error_of(const SimConfig& cfg) {
    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

bool is_member(const MinAgeSet& s, NodeId id) {
    return std::find(s.members.begin(), s.members.end(), id) != s.members.end();
}

} // namespace

TEST_CASE("config validation names the field") {
    auto cfg = base_config(4, NoGossip{});
    CHECK(error_of(cfg).empty());

    auto bad = cfg;
    bad.n = 0;
    CHECK(error_of(bad).find("'n'") != std::string::npos);
    bad = cfg;
    bad.lambda_e = 0.0;
    CHECK(error_of(bad).find("lambda_e") != std::string::npos);
    bad = cfg;
    bad.lambda = -1.0;
    CHECK(error_of(bad).find("'lambda'") != std::string::npos);
    bad = cfg;
    bad.budget = -1.0;
    CHECK(error_of(bad).find("budget") != std::string::npos);
    bad = cfg;
    bad.horizon = 0.0;
    CHECK(error_of(bad).find("horizon") != std::string::npos);
    bad = cfg;
    bad.warmup_fraction = 1.0;
    CHECK(error_of(bad).find("warmup_fraction") != std::string::npos);
    bad = base_config(1, Uniform{});
    CHECK(error_of(bad).find("scheme") != std::string::npos);
    bad.budget = 0.0;
    CHECK(error_of(bad).empty());

    CHECK_THROWS_AS(run_simulation(base_config(0, NoGossip{})), InvalidInput);
    CHECK_THROWS_AS(CRule::fixed(0.0), InvalidInput);
    CHECK_THROWS_AS(parse_scheme("flooding"), InvalidInput);
}

TEST_CASE("scheme labels and C rules") {
    CHECK(scheme_label(Asuman{}) == "asuman");
    CHECK(scheme_label(Uniform{}) == "uniform");
    CHECK(scheme_label(NoGossip{}) == "nogossip");
    CHECK(scheme_key(Asuman{CRule::fixed(0.5)}) != scheme_key(Asuman{}));
    CHECK(CRule::over_n().resolve(8) == 0.125);
    CHECK(CRule::fixed(0.3).resolve(8) == 0.3);
    CHECK(parse_scheme("asuman", CRule::fixed(2.0)) == Scheme{Asuman{CRule::fixed(2.0)}});
}

TEST_CASE("identical config gives an identical result") {
    for (const Scheme& s : {Scheme{Asuman{}}, Scheme{Uniform{}}, Scheme{NoGossip{}}}) {
        auto cfg = base_config(20, s);
        cfg.record_epoch_trace = true;
        const auto a = run_simulation(cfg);
        const auto b = run_simulation(cfg);
        CHECK(a == b);
        cfg.seed += 1;
        CHECK(!(run_simulation(cfg) == a));
    }
}

TEST_CASE("result invariants") {
    auto cfg = base_config(30, Asuman{});
    cfg.record_epoch_trace = true;
    const auto r = run_simulation(cfg);
    REQUIRE(r.per_node_time_avg_age.size() == 30);
    double sum = 0.0;
    for (double a : r.per_node_time_avg_age) {
        CHECK(a >= 0.0);
        sum += a;
    }
    CHECK(r.network_mean_age == doctest::Approx(sum / 30).epsilon(1e-12));
    CHECK(r.effective_horizon == cfg.horizon);
    CHECK(r.window_start == doctest::Approx(0.1 * cfg.horizon));

    const auto& trace = epoch_min_age_trace(r);
    REQUIRE(!trace.empty());
    CHECK(trace.size() == r.counts.self_updates);
    CHECK(trace.front().k == 1);
    CHECK(trace.front().min_age == 1);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i].k == trace[i - 1].k + 1);
    CHECK(r.counts.gossip_deliveries > 0);
    CHECK(r.counts.gossip_phases <= r.counts.self_updates + 1);
}

TEST_CASE("epoch trace must be requested") {
    const auto r = run_simulation(base_config(3, NoGossip{}));
    CHECK_THROWS_AS(epoch_min_age_trace(r), AbsentData);
}

TEST_CASE("max_epochs stops at the requested self-update") {
    auto cfg = base_config(5, Asuman{});
    cfg.horizon = 1e9;
    cfg.max_epochs = 5;
    cfg.record_epoch_trace = true;
    const auto r = run_simulation(cfg);
    CHECK(r.counts.self_updates == 5);
    CHECK(epoch_min_age_trace(r).size() == 5);
    CHECK(r.effective_horizon < 1e9);
    CHECK(r.window_start == 0.0);
    for (double a : r.per_node_time_avg_age) CHECK(a >= 0.0);
}

TEST_CASE("no-gossip single node matches the birth-reset oracle") {
    auto cfg = base_config(1, NoGossip{});
    cfg.horizon = 1e5;
    cfg.seed = 7;
    const double expected = birth_reset_mean(1.0, 1.0);
    CHECK(expected == doctest::Approx(1.0).epsilon(1e-9));
    const auto r = run_simulation(cfg);
    CHECK(std::abs(r.network_mean_age - expected) <= 0.02 * expected);
}

TEST_CASE("no-gossip four nodes: per-node reset rate lambda / n") {
    auto cfg = base_config(4, NoGossip{});
    cfg.horizon = 1e5;
    const double expected = birth_reset_mean(1.0, 1.0 / 4);
    CHECK(expected == doctest::Approx(4.0).epsilon(1e-9));
    const auto r = run_simulation(cfg);
    CHECK(std::abs(r.network_mean_age - expected) <= 0.1);
}

TEST_CASE("asuman interval: fresh node means no sensing phase") {
    SimStreams rng(1);
    const auto out = simulate_interval_asuman(AgeVector({0, 3, 2}), 0.8, 0.5, 3.0, 1.0, rng);
    CHECK(out.stats.min_set.min_age == 0);
    CHECK(out.stats.sensing_length == 0.0);
    CHECK(out.stats.gossip_length == doctest::Approx(0.8));
    CHECK(out.stats.per_sender_rate == 3.0);
}

TEST_CASE("asuman interval: source updates before sensing ends, so no gossip") {
    SimStreams rng(2);
    for (int i = 0; i < 200; ++i) {
        // C * min_age = 0.5 * 4 = 2 > tau
        const AgeVector start({4, 6, 5, 9});
        const auto out = simulate_interval_asuman(start, 1.5, 0.5, 100.0, 1.0, rng);
        CHECK(out.stats.gossip_events == 0);
        CHECK(out.stats.gossip_length == 0.0);
        CHECK(out.stats.transmitters.empty());
        CHECK(out.stats.sensing_length == 1.5);
        // only source resets may have happened
        for (std::size_t j = 1; j <= 4; ++j) {
            const NodeId id{j};
            CHECK((out.ages[id] == start[id] || out.ages[id] == 0));
        }
    }
}

TEST_CASE("asuman interval: gossip count is Poisson with mean B * L") {
    // n = 2, only node 1 is in the min set, B = 2, phase length L = tau.
    SimStreams rng(3);
    const int intervals = 20000;
    const double tau = 0.75;
    double count = 0.0;
    for (int i = 0; i < intervals; ++i) {
        const auto out = simulate_interval_asuman(AgeVector({0, 5}), tau, 0.1, 2.0, 1.0, rng);
        for (const auto t : out.stats.transmitters) CHECK(t == NodeId{1});
        count += static_cast<double>(out.stats.gossip_events);
    }
    const double mean = 2.0 * tau;
    const double se = std::sqrt(mean / intervals);
    CHECK(std::abs(count / intervals - mean) < 4 * se);
}

TEST_CASE("asuman interval: only min-age nodes transmit and they share B") {
    SimStreams rng(4);
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + gen() % 20;
        std::vector<Age> raw(n);
        for (auto& a : raw) a = 1 + gen() % 4;
        const AgeVector start(raw);
        const double budget = static_cast<double>(n);
        const auto out = simulate_interval_asuman(start, 2.0, 1.0 / n, budget, 1.0, rng);
        const auto expected_set = min_age_set(start);
        CHECK(out.stats.min_set.members == expected_set.members);
        for (const auto t : out.stats.transmitters) CHECK(is_member(expected_set, t));
        if (out.stats.gossip_length > 0.0) {
            CHECK(out.stats.per_sender_rate * static_cast<double>(expected_set.members.size()) ==
                  doctest::Approx(budget).epsilon(1e-12));
        }
        // no increases inside an interval
        for (std::size_t j = 1; j <= n; ++j) CHECK(out.ages[NodeId{j}] <= start[NodeId{j}]);
    }
}

TEST_CASE("uniform interval: per-link rate lambda when B = n lambda, n = 2") {
    SimStreams rng(5);
    const int intervals = 20000;
    const double tau = 0.5;
    double events = 0.0;
    std::set<std::size_t> senders;
    for (int i = 0; i < intervals; ++i) {
        const auto out = simulate_interval_uniform(AgeVector({3, 3}), tau, 1.0, 2.0, rng);
        events += static_cast<double>(out.stats.gossip_events);
        for (const auto t : out.stats.transmitters) senders.insert(t.value);
    }
    // two directed links, each rate 1
    const double mean = 2.0 * tau;
    CHECK(std::abs(events / intervals - mean) < 4 * std::sqrt(mean / intervals));
    CHECK(senders == std::set<std::size_t>{1, 2});
}

TEST_CASE("uniform interval: stale gossip never overwrites fresher state") {
    SimStreams rng(6);
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + gen() % 10;
        std::vector<Age> raw(n);
        for (auto& a : raw) a = gen() % 8;
        const AgeVector start(raw);
        const auto out = simulate_interval_uniform(start, 1.0, 1.0, static_cast<double>(n), rng);
        const auto lo = min_age_set(start).min_age;
        for (std::size_t j = 1; j <= n; ++j) {
            const NodeId id{j};
            CHECK(out.ages[id] <= start[id]);
            // every new value comes from the source (0) or from another node
            CHECK((out.ages[id] == start[id] || out.ages[id] == 0 || out.ages[id] >= lo));
        }
    }
    CHECK_THROWS_AS(simulate_interval_uniform(AgeVector({1}), 1.0, 1.0, 1.0, rng), InvalidInput);
    CHECK_THROWS_AS(simulate_interval_uniform(AgeVector({1, 1}), 0.0, 1.0, 1.0, rng), InvalidInput);
}

TEST_CASE("uniform gossip with zero budget reproduces no-gossip") {
    auto u = base_config(6, Uniform{});
    u.budget = 0.0;
    auto g = base_config(6, NoGossip{});
    g.budget = 0.0;
    const auto ru = run_simulation(u);
    const auto rg = run_simulation(g);
    CHECK(ru.per_node_time_avg_age == rg.per_node_time_avg_age);
    CHECK(ru.counts == rg.counts);
}

TEST_CASE("epoch min ages follow the closed-form mean") {
    const analytics::RateParams p{1.0, 1.0, 20.0, 20};
    const std::uint64_t ks[] = {1, 2, 3, 5};
    for (const Scheme& scheme : {Scheme{Asuman{}}, Scheme{Uniform{}}, Scheme{NoGossip{}}}) {
        const int reps = 20000;
        double sum[6] = {}, sq[6] = {};
        for (int r = 0; r < reps; ++r) {
            auto cfg = base_config(20, scheme);
            cfg.horizon = 1e9;
            cfg.max_epochs = 5;
            cfg.record_epoch_trace = true;
            cfg.seed = 1000 + static_cast<std::uint64_t>(r);
            const auto result = run_simulation(cfg);
            const auto& trace = epoch_min_age_trace(result);
            for (const auto& s : trace) {
                sum[s.k] += static_cast<double>(s.min_age);
                sq[s.k] += static_cast<double>(s.min_age * s.min_age);
            }
        }
        for (auto k : ks) {
            const double mean = sum[k] / reps;
            const double var = sq[k] / reps - mean * mean;
            const double se = std::sqrt(std::max(var, 1e-300) / reps);
            const double expected = analytics::min_age_mean(k, p);
            if (k == 1) {
                CHECK(mean == 1.0);
            } else {
                CHECK(std::abs(mean - expected) <= 3 * se);
            }
        }
    }
}

TEST_CASE("asuman at n = 600 stays under the asymptotic bound") {
    auto cfg = base_config(600, Asuman{});
    cfg.horizon = 2e4;
    const auto r = run_simulation(cfg);
    CHECK(r.network_mean_age <= 3.0);
    CHECK(r.counts.suppressed_nodes > 0);
}
