#include "asuman/analytics.hpp"

#include <cmath>
#include <string>

#include "asuman/errors.hpp"

namespace asuman::analytics {
namespace {

double stay_ratio(const RateParams& p) { return p.lambda_e / (p.lambda_e + p.lambda); }

// sum_{l=0}^{terms-1} r^l, evaluated in closed form.
double geometric_sum(double r, std::uint64_t terms) {
    if (terms == 0) return 0.0;
    return -std::expm1(static_cast<double>(terms) * std::log(r)) / (1.0 - r);
}

void require_links(const RateParams& p) {
    if (p.n < 2) {
        throw InvalidInput("n = " + std::to_string(p.n) + ": gossip bounds need n >= 2");
    }
}

} // namespace

void RateParams::validate() const {
    if (!(lambda_e > 0.0) || !std::isfinite(lambda_e)) {
        throw InvalidInput("lambda_e must be a finite positive rate");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("lambda must be a finite positive rate");
    }
    if (!(budget >= 0.0) || !std::isfinite(budget)) {
        throw InvalidInput("budget must be finite and >= 0");
    }
    if (n < 1) throw InvalidInput("n must be >= 1");
}

RateParams RateParams::with_default_budget(double lambda_e, double lambda, std::size_t n) {
    return RateParams{lambda_e, lambda, static_cast<double>(n) * lambda, n};
}

double min_age_mean(std::uint64_t k, const RateParams& p) {
    p.validate();
    return geometric_sum(stay_ratio(p), k);
}

double min_age_mean_limit(const RateParams& p) {
    p.validate();
    return (p.lambda_e + p.lambda) / p.lambda;
}

double gossip_phase_bound(std::uint64_t k, const RateParams& p) {
    p.validate();
    require_links(p);
    const double per_link = p.budget / static_cast<double>(p.n - 1);
    return (p.lambda_e + per_link * min_age_mean(k, p)) /
           (p.lambda / static_cast<double>(p.n) + per_link);
}

double gossip_phase_bound_limit(const RateParams& p) {
    p.validate();
    require_links(p);
    const double per_link = p.budget / static_cast<double>(p.n - 1);
    return (p.lambda_e + per_link * min_age_mean_limit(p)) /
           (p.lambda / static_cast<double>(p.n) + per_link);
}

double steady_state_bound_finite_n(const RateParams& p) {
    p.validate();
    require_links(p);
    const double n = static_cast<double>(p.n);
    const double numerator = 1.0 + p.budget / (n - 1.0) * (1.0 / p.lambda + 1.0 / p.lambda_e);
    const double denominator = 1.0 / n + n / (n - 1.0);
    return p.lambda_e / p.lambda * numerator / denominator;
}

double asymptotic_bound(const RateParams& p) {
    p.validate();
    return 2.0 * p.lambda_e / p.lambda + 1.0;
}

double sensing_bound_seq(std::uint64_t k, const RateParams& p) {
    p.validate();
    if (k < 1) throw InvalidInput("sensing_bound_seq is defined for k >= 1");
    const double r = stay_ratio(p);
    return 2.0 * geometric_sum(r, k - 1) + std::pow(r, static_cast<double>(k - 1));
}

double sensing_bound_limit(const RateParams& p) {
    p.validate();
    return 2.0 * (p.lambda_e / p.lambda + 1.0);
}

} // namespace asuman::analytics
