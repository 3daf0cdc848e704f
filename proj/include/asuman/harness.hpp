#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asuman/engine.hpp"

namespace asuman::harness {

struct SweepSpec {
    std::vector<std::size_t> n_values;  // strictly increasing
    std::vector<Scheme> schemes;
    // lambda_e / lambda is the swept rate ratio; lambda is 1 by convention.
    double lambda_e = 1.0;
    double lambda = 1.0;
    // Explicit total gossip budget; unset means B = n * lambda.
    std::optional<double> budget;
    std::size_t replications = 20;
    // Unset means max(2e4, 50 n) / lambda.
    std::optional<double> horizon;
    double warmup_fraction = 0.1;
    std::uint64_t base_seed = 0;
    // 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
    // Wall-clock time is not reproducible, so it is written as 0 unless asked.
    bool record_wall_time = false;

    void validate() const;
    double rate_ratio() const { return lambda_e / lambda; }
    double budget_for(std::size_t n) const;
    double horizon_for(std::size_t n) const;
};

struct SweepRow {
    std::string scheme;
    std::size_t n = 0;
    double lambda_e = 0.0;
    double lambda = 0.0;
    double budget = 0.0;
    std::optional<double> c;
    std::size_t replications = 0;
    double mean_age = 0.0;
    double ci_half_width_95 = 0.0;
    std::optional<double> bound_finite_n;
    std::optional<double> bound_asymptotic;
    double wall_time_s = 0.0;

    bool operator==(const SweepRow&) const = default;
};

struct ReplicationSummary {
    double mean = 0.0;
    double ci_half_width_95 = 0.0;
};

// Normal-approximation 95% interval; one replication gives a zero width.
ReplicationSummary summarize_replications(std::span<const double> values);

std::uint64_t replication_seed(std::uint64_t base_seed, const Scheme& scheme, std::size_t n,
                               std::size_t rep);

// The exact configuration run_sweep uses for one replication.
SimConfig replication_config(const SweepSpec& spec, const Scheme& scheme, std::size_t n,
                             std::size_t rep);

// Row for one (scheme, n) point from its per-replication network mean ages,
// indexed by replication.
SweepRow make_row(const SweepSpec& spec, const Scheme& scheme, std::size_t n,
                  std::span<const double> replication_means, double wall_time_s = 0.0);

// Rows are scheme-major (spec order), n ascending.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

struct ScalingFit {
    double slope_vs_log_n = 0.0;
    double r_squared = 0.0;
};

// OLS of mean_age on ln(n). Needs >= 3 rows with distinct n.
ScalingFit scaling_fit(std::span<const SweepRow> rows);

inline constexpr const char* kCsvHeader =
    "scheme,n,lambda_e,lambda,B,C,replications,mean_age,ci_half_width_95,"
    "bound_finite_n,bound_asymptotic,wall_time_s";

std::string format_csv(std::span<const SweepRow> rows);
void write_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);
std::vector<SweepRow> parse_csv(const std::string& text);
std::vector<SweepRow> read_csv(const std::filesystem::path& path);

} // namespace asuman::harness
