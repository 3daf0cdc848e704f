#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "asuman/core_model.hpp"
#include "asuman/random.hpp"

namespace asuman {

// Back-off constant C: either 1/n or a fixed positive value.
class CRule {
public:
    static CRule over_n() { return CRule{}; }
    static CRule fixed(double c);

    bool is_over_n() const noexcept { return !fixed_.has_value(); }
    double resolve(std::size_t n) const;
    std::string label() const;

    bool operator==(const CRule&) const = default;

private:
    std::optional<double> fixed_;
};

struct Asuman {
    CRule c_rule = CRule::over_n();
    bool operator==(const Asuman&) const = default;
};
struct Uniform {
    bool operator==(const Uniform&) const = default;
};
struct NoGossip {
    bool operator==(const NoGossip&) const = default;
};

using Scheme = std::variant<Asuman, Uniform, NoGossip>;

// "asuman", "uniform" or "nogossip".
std::string scheme_label(const Scheme& scheme);
// Label plus the back-off rule, unique per distinct scheme.
std::string scheme_key(const Scheme& scheme);
Scheme parse_scheme(const std::string& label, CRule c_rule = CRule::over_n());

struct SimConfig {
    std::size_t n = 1;
    double lambda_e = 1.0;
    double lambda = 1.0;
    double budget = 0.0;
    Scheme scheme = NoGossip{};
    double horizon = 1e4;
    double warmup_fraction = 0.1;
    std::uint64_t seed = 0;
    bool record_epoch_trace = false;
    // Stop right after this many source self-updates; 0 means run to horizon.
    std::uint64_t max_epochs = 0;

    // Throws InvalidInput naming the offending field.
    void validate() const;
};

struct EpochSample {
    std::uint64_t k = 0;
    Age min_age = 0;
    bool operator==(const EpochSample&) const = default;
};

struct EventCounts {
    std::uint64_t self_updates = 0;
    std::uint64_t source_deliveries = 0;
    std::uint64_t gossip_deliveries = 0;
    // Sum over intervals of nodes that stayed silent (ASUMAN only).
    std::uint64_t suppressed_nodes = 0;
    // Intervals that reached their gossiping phase (ASUMAN only).
    std::uint64_t gossip_phases = 0;
    bool operator==(const EventCounts&) const = default;
};

struct SimResult {
    std::vector<double> per_node_time_avg_age;
    double network_mean_age = 0.0;
    std::optional<std::vector<EpochSample>> epoch_min_ages;
    EventCounts counts;
    // Simulated time actually covered (horizon, or the stopping epoch).
    double effective_horizon = 0.0;
    // Start of the time-averaging window.
    double window_start = 0.0;

    bool operator==(const SimResult&) const = default;
};

struct IntervalStats {
    // Min-age set at the start of the interval (empty for uniform gossip).
    MinAgeSet min_set;
    double sensing_length = 0.0;
    double gossip_length = 0.0;
    // Total gossip rate of each transmitting node.
    double per_sender_rate = 0.0;
    std::uint64_t source_deliveries = 0;
    std::uint64_t gossip_events = 0;
    // Nodes that transmitted at least once, ascending.
    std::vector<NodeId> transmitters;
};

struct IntervalOutcome {
    AgeVector ages;
    IntervalStats stats;
};

// One inter-update interval of length tau under ASUMAN. `ages` is the state
// right after the self-update that opens the interval; the result is the state
// just before the next one. Source deliveries run at total rate `lambda` in
// both phases.
IntervalOutcome simulate_interval_asuman(AgeVector ages, double tau, double c, double budget,
                                         double lambda, SimStreams& streams);

// One interval under uniform gossip: every ordered pair (i, j) is a Poisson
// link of rate budget / (n (n - 1)) for the whole interval.
IntervalOutcome simulate_interval_uniform(AgeVector ages, double tau, double lambda,
                                          double budget, SimStreams& streams);

SimResult run_simulation(const SimConfig& config);

// Throws AbsentData if the run did not record the trace.
const std::vector<EpochSample>& epoch_min_age_trace(const SimResult& result);
const std::vector<EpochSample>& epoch_min_age_trace(SimResult&&) = delete;

} // namespace asuman
