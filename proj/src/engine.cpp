#include "asuman/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "asuman/errors.hpp"

namespace asuman {

CRule CRule::fixed(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("fixed back-off constant C must be > 0");
    CRule rule;
    rule.fixed_ = c;
    return rule;
}

double CRule::resolve(std::size_t n) const {
    return fixed_ ? *fixed_ : 1.0 / static_cast<double>(n);
}

std::string CRule::label() const {
    if (!fixed_) return "over-n";
    std::ostringstream os;
    os.precision(17);
    os << *fixed_;
    return os.str();
}

std::string scheme_label(const Scheme& scheme) {
    struct Visitor {
        std::string operator()(const Asuman&) const { return "asuman"; }
        std::string operator()(const Uniform&) const { return "uniform"; }
        std::string operator()(const NoGossip&) const { return "nogossip"; }
    };
    return std::visit(Visitor{}, scheme);
}

std::string scheme_key(const Scheme& scheme) {
    if (const auto* a = std::get_if<Asuman>(&scheme)) return "asuman/" + a->c_rule.label();
    return scheme_label(scheme);
}

Scheme parse_scheme(const std::string& label, CRule c_rule) {
    if (label == "asuman") return Asuman{c_rule};
    if (label == "uniform") return Uniform{};
    if (label == "nogossip") return NoGossip{};
    throw InvalidInput("unknown scheme '" + label + "' (expected asuman, uniform or nogossip)");
}

void SimConfig::validate() const {
    auto positive_rate = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidInput(std::string("config field '") + field + "' must be a finite positive rate");
        }
    };
    if (n < 1) throw InvalidInput("config field 'n' must be >= 1");
    positive_rate(lambda_e, "lambda_e");
    positive_rate(lambda, "lambda");
    if (!(budget >= 0.0) || !std::isfinite(budget)) {
        throw InvalidInput("config field 'budget' must be finite and >= 0");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw InvalidInput("config field 'horizon' must be finite and > 0");
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
        throw InvalidInput("config field 'warmup_fraction' must lie in [0, 1)");
    }
    if (std::holds_alternative<Uniform>(scheme) && n < 2 && budget > 0.0) {
        throw InvalidInput("config field 'scheme': uniform gossip with budget > 0 needs n >= 2");
    }
}

namespace {

// Exact integral of each node's piecewise-constant age, both over [0, t] and
// over the measurement window [window_start, t].
class AgeIntegrator {
public:
    AgeIntegrator(std::size_t n, double window_start)
        : window_start_(window_start), last_(n, 0.0), total_(n, 0.0), windowed_(n, 0.0) {}

    // Accounts for node `i` holding `age` up to time t.
    void advance(std::size_t i, double t, Age age) {
        const double a = static_cast<double>(age);
        total_[i] += a * (t - last_[i]);
        const double from = std::max(last_[i], window_start_);
        if (t > from) windowed_[i] += a * (t - from);
        last_[i] = t;
    }

    void advance_all(const AgeVector& ages, double t) {
        const auto values = ages.values();
        for (std::size_t i = 0; i < values.size(); ++i) advance(i, t, values[i]);
    }

    std::vector<double> averages(double end, double& window_used) const {
        std::vector<double> out(total_.size());
        if (end > window_start_) {
            window_used = window_start_;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = windowed_[i] / (end - window_start_);
        } else {
            window_used = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = end > 0.0 ? total_[i] / end : 0.0;
        }
        return out;
    }

private:
    double window_start_;
    std::vector<double> last_;
    std::vector<double> total_;
    std::vector<double> windowed_;
};

struct IntervalRun {
    AgeVector& ages;
    SimStreams& rng;
    double lambda;
    AgeIntegrator* integrator;  // null outside run_simulation
    IntervalStats& stats;
    std::vector<char>* transmitted;  // null when transmitters are not tracked

    // Events of the source-delivery process (rate lambda) and of one gossip
    // process (total rate gossip_rate) on [start, end). Memorylessness lets
    // every phase start from fresh exponential clocks.
    template <class PickLink>
    void run_phase(double start, double end, double gossip_rate, PickLink&& pick_link) {
        constexpr double never = std::numeric_limits<double>::infinity();
        const std::size_t n = ages.size();
        double next_delivery = start + rng.delivery.exponential(lambda);
        double next_gossip = gossip_rate > 0.0 ? start + rng.gossip.exponential(gossip_rate) : never;
        while (next_delivery < end || next_gossip < end) {
            if (next_delivery <= next_gossip) {
                const std::size_t i = rng.delivery.index(n);
                const NodeId id{i + 1};
                if (ages[id] != 0) {
                    if (integrator) integrator->advance(i, next_delivery, ages[id]);
                    ages.reset(id);
                }
                ++stats.source_deliveries;
                next_delivery += rng.delivery.exponential(lambda);
            } else {
                const auto [sender, receiver] = pick_link();
                const Age before = ages[receiver];
                if (ages[sender] < before) {
                    if (integrator) integrator->advance(receiver.value - 1, next_gossip, before);
                    ages.merge(sender, receiver);
                }
                if (transmitted) (*transmitted)[sender.value - 1] = 1;
                ++stats.gossip_events;
                next_gossip += rng.gossip.exponential(gossip_rate);
            }
        }
    }

    // Receiver uniform over the n - 1 nodes other than `sender`.
    NodeId other_node(NodeId sender) {
        const std::size_t r = rng.gossip.index(ages.size() - 1) + 1;
        return NodeId{r >= sender.value ? r + 1 : r};
    }

    void asuman(double start, double end, double c, double budget) {
        stats.min_set = min_age_set(ages);
        const double sensing = c * static_cast<double>(stats.min_set.min_age);
        const double gossip_start = start + sensing;
        stats.sensing_length = std::min(sensing, end - start);
        const bool can_gossip = ages.size() >= 2 && budget > 0.0;
        if (gossip_start >= end || !can_gossip) {
            run_phase(start, end, 0.0, [] { return std::pair<NodeId, NodeId>{}; });
            return;
        }
        const auto& members = stats.min_set.members;
        stats.gossip_length = end - gossip_start;
        stats.per_sender_rate = budget / static_cast<double>(members.size());
        run_phase(start, gossip_start, 0.0, [] { return std::pair<NodeId, NodeId>{}; });
        // Every member gossips to every other node at budget / (|M| (n - 1)):
        // superposed, the sender is uniform over M and the receiver uniform
        // over the rest.
        run_phase(gossip_start, end, budget, [&] {
            const NodeId sender = members[rng.gossip.index(members.size())];
            return std::pair{sender, other_node(sender)};
        });
    }

    void uniform(double start, double end, double budget) {
        const std::size_t n = ages.size();
        const double rate = n >= 2 ? budget : 0.0;
        if (rate > 0.0) {
            stats.gossip_length = end - start;
            stats.per_sender_rate = rate / static_cast<double>(n);
        }
        run_phase(start, end, rate, [&] {
            const NodeId sender{rng.gossip.index(n) + 1};
            return std::pair{sender, other_node(sender)};
        });
    }

    void no_gossip(double start, double end) {
        run_phase(start, end, 0.0, [] { return std::pair<NodeId, NodeId>{}; });
    }
};

void collect_transmitters(const std::vector<char>& transmitted, IntervalStats& stats) {
    for (std::size_t i = 0; i < transmitted.size(); ++i) {
        if (transmitted[i]) stats.transmitters.emplace_back(i + 1);
    }
}

void require_interval(const AgeVector& ages, double tau) {
    if (ages.empty()) throw InvalidInput("interval simulation needs at least one node");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInput("interval length tau must be > 0");
}

} // namespace

IntervalOutcome simulate_interval_asuman(AgeVector ages, double tau, double c, double budget,
                                         double lambda, SimStreams& streams) {
    require_interval(ages, tau);
    if (!(c >= 0.0) || !(budget >= 0.0) || !(lambda > 0.0)) {
        throw InvalidInput("asuman interval needs C >= 0, B >= 0, lambda > 0");
    }
    IntervalOutcome out{std::move(ages), {}};
    std::vector<char> transmitted(out.ages.size(), 0);
    IntervalRun run{out.ages, streams, lambda, nullptr, out.stats, &transmitted};
    run.asuman(0.0, tau, c, budget);
    collect_transmitters(transmitted, out.stats);
    return out;
}

IntervalOutcome simulate_interval_uniform(AgeVector ages, double tau, double lambda,
                                          double budget, SimStreams& streams) {
    require_interval(ages, tau);
    if (ages.size() < 2) throw InvalidInput("uniform gossip needs n >= 2");
    if (!(budget >= 0.0) || !(lambda > 0.0)) {
        throw InvalidInput("uniform interval needs B >= 0, lambda > 0");
    }
    IntervalOutcome out{std::move(ages), {}};
    std::vector<char> transmitted(out.ages.size(), 0);
    IntervalRun run{out.ages, streams, lambda, nullptr, out.stats, &transmitted};
    run.uniform(0.0, tau, budget);
    collect_transmitters(transmitted, out.stats);
    return out;
}

SimResult run_simulation(const SimConfig& config) {
    config.validate();
    const std::size_t n = config.n;
    SimStreams streams(config.seed);
    AgeVector ages(n);
    AgeIntegrator integrator(n, config.warmup_fraction * config.horizon);
    const double c = std::holds_alternative<Asuman>(config.scheme)
                         ? std::get<Asuman>(config.scheme).c_rule.resolve(n)
                         : 0.0;

    SimResult result;
    if (config.record_epoch_trace) result.epoch_min_ages.emplace();

    double t = 0.0;
    std::uint64_t k = 0;
    for (;;) {
        const double tau = streams.self_update.exponential(config.lambda_e);
        const double next = t + tau;
        const double end = std::min(next, config.horizon);

        IntervalStats stats;
        IntervalRun run{ages, streams, config.lambda, &integrator, stats, nullptr};
        if (std::holds_alternative<Asuman>(config.scheme)) {
            run.asuman(t, end, c, config.budget);
            result.counts.suppressed_nodes += n - stats.min_set.members.size();
            if (stats.gossip_length > 0.0) ++result.counts.gossip_phases;
        } else if (std::holds_alternative<Uniform>(config.scheme)) {
            run.uniform(t, end, config.budget);
        } else {
            run.no_gossip(t, end);
        }
        result.counts.source_deliveries += stats.source_deliveries;
        result.counts.gossip_deliveries += stats.gossip_events;

        if (next >= config.horizon) {
            t = config.horizon;
            break;
        }
        t = next;
        ++k;
        integrator.advance_all(ages, t);
        ages.increment_all();
        ++result.counts.self_updates;
        if (result.epoch_min_ages) {
            const auto values = ages.values();
            result.epoch_min_ages->push_back({k, *std::min_element(values.begin(), values.end())});
        }
        if (config.max_epochs != 0 && k >= config.max_epochs) break;
    }

    integrator.advance_all(ages, t);
    result.effective_horizon = t;
    result.per_node_time_avg_age = integrator.averages(t, result.window_start);
    result.network_mean_age =
        std::accumulate(result.per_node_time_avg_age.begin(), result.per_node_time_avg_age.end(), 0.0) /
        static_cast<double>(n);
    return result;
}

const std::vector<EpochSample>& epoch_min_age_trace(const SimResult& result) {
    if (!result.epoch_min_ages) {
        throw AbsentData("epoch min-age trace was not recorded (enable record_epoch_trace)");
    }
    return *result.epoch_min_ages;
}

} // namespace asuman
