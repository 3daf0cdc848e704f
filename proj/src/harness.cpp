#include "asuman/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "asuman/analytics.hpp"
#include "asuman/errors.hpp"
#include "asuman/random.hpp"

namespace asuman::harness {
namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

std::string context(const Scheme& scheme, std::size_t n, std::size_t rep) {
    return "scheme=" + scheme_key(scheme) + " n=" + std::to_string(n) + " rep=" + std::to_string(rep);
}

} // namespace

void SweepSpec::validate() const {
    if (n_values.empty()) throw InvalidInput("sweep: n_values must not be empty");
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] < 1) throw InvalidInput("sweep: n_values must be positive");
        if (i > 0 && n_values[i] <= n_values[i - 1]) {
            throw InvalidInput("sweep: n_values must be strictly increasing");
        }
    }
    if (schemes.empty()) throw InvalidInput("sweep: at least one scheme is required");
    if (replications < 1) throw InvalidInput("sweep: replications must be >= 1");
    if (!(lambda_e > 0.0) || !(lambda > 0.0)) throw InvalidInput("sweep: rates must be > 0");
    if (budget && !(*budget >= 0.0)) throw InvalidInput("sweep: budget must be >= 0");
    if (horizon && !(*horizon > 0.0)) throw InvalidInput("sweep: horizon must be > 0");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
        throw InvalidInput("sweep: warmup_fraction must lie in [0, 1)");
    }
}

double SweepSpec::budget_for(std::size_t n) const {
    return budget ? *budget : static_cast<double>(n) * lambda;
}

double SweepSpec::horizon_for(std::size_t n) const {
    return horizon ? *horizon : std::max(2e4, 50.0 * static_cast<double>(n)) / lambda;
}

ReplicationSummary summarize_replications(std::span<const double> values) {
    ReplicationSummary s;
    if (values.empty()) return s;
    const double count = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
    if (values.size() < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.ci_half_width_95 = 1.959963984540054 * std::sqrt(ss / (count - 1.0) / count);
    return s;
}

std::uint64_t replication_seed(std::uint64_t base_seed, const Scheme& scheme, std::size_t n,
                               std::size_t rep) {
    std::uint64_t h = mix64(fnv1a(scheme_key(scheme)));
    h = mix64(h ^ static_cast<std::uint64_t>(n));
    h = mix64(h ^ static_cast<std::uint64_t>(rep));
    return base_seed + h;
}

SimConfig replication_config(const SweepSpec& spec, const Scheme& scheme, std::size_t n,
                             std::size_t rep) {
    SimConfig cfg;
    cfg.n = n;
    cfg.lambda_e = spec.lambda_e;
    cfg.lambda = spec.lambda;
    cfg.budget = spec.budget_for(n);
    cfg.scheme = scheme;
    cfg.horizon = spec.horizon_for(n);
    cfg.warmup_fraction = spec.warmup_fraction;
    cfg.seed = replication_seed(spec.base_seed, scheme, n, rep);
    return cfg;
}

SweepRow make_row(const SweepSpec& spec, const Scheme& scheme, std::size_t n,
                  std::span<const double> replication_means, double wall_time_s) {
    const auto summary = summarize_replications(replication_means);
    SweepRow row;
    row.scheme = scheme_label(scheme);
    row.n = n;
    row.lambda_e = spec.lambda_e;
    row.lambda = spec.lambda;
    row.budget = spec.budget_for(n);
    row.replications = replication_means.size();
    row.mean_age = summary.mean;
    row.ci_half_width_95 = summary.ci_half_width_95;
    row.wall_time_s = wall_time_s;
    if (const auto* a = std::get_if<Asuman>(&scheme)) {
        row.c = a->c_rule.resolve(n);
        if (n >= 2) {
            const analytics::RateParams p{spec.lambda_e, spec.lambda, row.budget, n};
            if (spec.budget) {
                row.bound_finite_n = analytics::gossip_phase_bound_limit(p);
            } else {
                row.bound_finite_n = analytics::steady_state_bound_finite_n(p);
                row.bound_asymptotic = analytics::asymptotic_bound(p);
            }
        }
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    struct Job {
        std::size_t point;
        std::size_t rep;
    };
    struct Point {
        const Scheme* scheme;
        std::size_t n;
    };
    std::vector<Point> points;
    for (const auto& scheme : spec.schemes) {
        for (std::size_t n : spec.n_values) points.push_back({&scheme, n});
    }
    // Every config is validated up front so a bad point fails before any work.
    for (const auto& p : points) {
        try {
            replication_config(spec, *p.scheme, p.n, 0).validate();
        } catch (const InvalidInput& e) {
            throw InvalidInput(context(*p.scheme, p.n, 0) + ": " + e.what());
        }
    }

    std::vector<Job> jobs;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t r = 0; r < spec.replications; ++r) jobs.push_back({p, r});
    }
    // Larger networks first keeps the tail of the schedule short.
    std::stable_sort(jobs.begin(), jobs.end(), [&](const Job& a, const Job& b) {
        return points[a.point].n > points[b.point].n;
    });

    std::vector<double> means(points.size() * spec.replications, 0.0);
    std::vector<double> seconds(means.size(), 0.0);
    std::vector<std::exception_ptr> errors(means.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto [p, rep] = jobs[j];
            const std::size_t slot = p * spec.replications + rep;
            try {
                const auto started = std::chrono::steady_clock::now();
                const auto cfg = replication_config(spec, *points[p].scheme, points[p].n, rep);
                means[slot] = run_simulation(cfg).network_mean_age;
                seconds[slot] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        }
    };

    unsigned threads = spec.threads != 0 ? spec.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (std::size_t slot = 0; slot < errors.size(); ++slot) {
        if (!errors[slot]) continue;
        const auto& pt = points[slot / spec.replications];
        const std::string where = context(*pt.scheme, pt.n, slot % spec.replications);
        try {
            std::rethrow_exception(errors[slot]);
        } catch (const InvalidInput& e) {
            throw InvalidInput(where + ": " + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    }

    std::vector<SweepRow> rows;
    rows.reserve(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        const std::span<const double> rep_means(means.data() + p * spec.replications, spec.replications);
        double wall = 0.0;
        if (spec.record_wall_time) {
            for (std::size_t r = 0; r < spec.replications; ++r) wall += seconds[p * spec.replications + r];
        }
        rows.push_back(make_row(spec, *points[p].scheme, points[p].n, rep_means, wall));
    }
    return rows;
}

ScalingFit scaling_fit(std::span<const SweepRow> rows) {
    if (rows.size() < 3) throw InvalidInput("scaling_fit needs at least 3 rows");
    std::set<std::size_t> distinct;
    for (const auto& r : rows) {
        if (r.n < 1) throw InvalidInput("scaling_fit: n must be positive");
        distinct.insert(r.n);
    }
    if (distinct.size() != rows.size()) throw InvalidInput("scaling_fit: n values must be distinct");

    const double count = static_cast<double>(rows.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& r : rows) {
        mean_x += std::log(static_cast<double>(r.n));
        mean_y += r.mean_age;
    }
    mean_x /= count;
    mean_y /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& r : rows) {
        const double dx = std::log(static_cast<double>(r.n)) - mean_x;
        const double dy = r.mean_age - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ScalingFit fit;
    fit.slope_vs_log_n = sxy / sxx;
    // A flat response has no variance to explain; report 0.
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
    return fit;
}

std::string format_csv(std::span<const SweepRow> rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.scheme + ',' + std::to_string(r.n) + ',' + format_number(r.lambda_e) + ',' +
               format_number(r.lambda) + ',' + format_number(r.budget) + ',' + format_optional(r.c) +
               ',' + std::to_string(r.replications) + ',' + format_number(r.mean_age) + ',' +
               format_number(r.ci_half_width_95) + ',' + format_optional(r.bound_finite_n) + ',' +
               format_optional(r.bound_asymptotic) + ',' + format_number(r.wall_time_s) + '\n';
    }
    return out;
}

void write_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << format_csv(rows);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<SweepRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw InvalidInput("CSV header does not match: expected '" + std::string(kCsvHeader) + "'");
    }
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            f.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (f.size() != 12) {
            throw InvalidInput("CSV line " + std::to_string(line_no) + ": expected 12 fields, got " +
                               std::to_string(f.size()));
        }
        auto num = [&](const std::string& s) {
            try {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return v;
            } catch (const std::exception&) {
                throw InvalidInput("CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
            }
        };
        auto opt = [&](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return num(s);
        };
        SweepRow r;
        r.scheme = f[0];
        r.n = static_cast<std::size_t>(num(f[1]));
        r.lambda_e = num(f[2]);
        r.lambda = num(f[3]);
        r.budget = num(f[4]);
        r.c = opt(f[5]);
        r.replications = static_cast<std::size_t>(num(f[6]));
        r.mean_age = num(f[7]);
        r.ci_half_width_95 = num(f[8]);
        r.bound_finite_n = opt(f[9]);
        r.bound_asymptotic = opt(f[10]);
        r.wall_time_s = num(f[11]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<SweepRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

} // namespace asuman::harness
