#pragma once

#include <cstddef>
#include <cstdint>

// Closed-form age recursions and upper bounds for opportunistic gossip.
//
// Notation: r = lambda_e / (lambda_e + lambda) is the probability that no node
// hears from the source during one inter-update interval.

namespace asuman::analytics {

struct RateParams {
    double lambda_e = 1.0;  // source self-update rate
    double lambda = 1.0;    // total source -> network rate
    double budget = 0.0;    // total gossip rate B
    std::size_t n = 1;

    // Throws InvalidInput naming the offending field.
    void validate() const;

    // B = n * lambda, the budget used for every headline result.
    static RateParams with_default_budget(double lambda_e, double lambda, std::size_t n);
};

// Mean minimum age at the k-th source self-update (k = 0 is the cold start).
double min_age_mean(std::uint64_t k, const RateParams& p);

// (lambda_e + lambda) / lambda.
double min_age_mean_limit(const RateParams& p);

// Upper bound on a node's mean age during the gossiping phase of interval k.
// Requires n >= 2.
double gossip_phase_bound(std::uint64_t k, const RateParams& p);

// gossip_phase_bound as k -> infinity, for any budget. Requires n >= 2.
double gossip_phase_bound_limit(const RateParams& p);

// Finite-n steady-state bound in the form obtained after substituting
// B = n * lambda into the denominator; only a valid bound under that budget.
// Requires n >= 2.
double steady_state_bound_finite_n(const RateParams& p);

// n -> infinity bound under B = n * lambda: 2 lambda_e / lambda + 1.
double asymptotic_bound(const RateParams& p);

// Dominating sequence for the sensing-phase age, k >= 1.
double sensing_bound_seq(std::uint64_t k, const RateParams& p);

// 2 (lambda_e / lambda + 1).
double sensing_bound_limit(const RateParams& p);

} // namespace asuman::analytics
