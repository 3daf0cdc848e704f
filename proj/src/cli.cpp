#include "asuman/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "asuman/analytics.hpp"
#include "asuman/engine.hpp"
#include "asuman/errors.hpp"
#include "asuman/harness.hpp"

namespace asuman::cli {
namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

CRule parse_c_rule(const std::string& text) {
    if (text == "over-n") return CRule::over_n();
    std::size_t used = 0;
    double c = 0.0;
    try {
        c = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw InvalidInput("--c must be 'over-n' or a positive number, got '" + text + "'");
    }
    return CRule::fixed(c);
}

struct RateFlags {
    double lambda_e = 1.0;
    double lambda = 1.0;
    std::optional<double> budget;
    std::string c_rule = "over-n";
    double warmup = 0.1;
    std::uint64_t seed = 0;
};

// Registered for --help only; the file is expanded into flags before parsing.
void add_config(CLI::App& sub) {
    sub.add_option("--config", "Flat key=value file using the long flag names; flags override it [path]");
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splices `--config FILE` into ordinary flags. Keys are long flag names
// without dashes; a key also given on the command line is skipped so the flag
// wins. Unknown keys are errors.
std::vector<std::string> expand_config(std::vector<std::string> args, CLI::App& app) {
    std::size_t sub_pos = 0;
    CLI::App* sub = nullptr;
    for (; sub_pos < args.size(); ++sub_pos) {
        sub = app.get_subcommand_no_throw(args[sub_pos]);
        if (sub) break;
    }
    if (!sub) return args;

    std::optional<std::string> path;
    std::vector<std::string> user;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
            path = args[i + 1];
            ++i;
            continue;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            continue;
        }
        user.push_back(args[i]);
    }
    if (!path) return args;

    std::set<std::string> given;
    for (const auto& a : user) {
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
    }

    std::ifstream in(*path);
    if (!in) throw UsageError("cannot read config file '" + *path + "'");
    std::vector<std::string> from_file;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(*path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config" || key == "help") {
            throw UsageError(*path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (given.count(key)) continue;
        if (opt->get_expected_max() == 0) {
            if (value == "true" || value == "1" || value == "yes") {
                from_file.push_back("--" + key);
            } else if (value != "false" && value != "0" && value != "no") {
                throw UsageError(*path + ":" + std::to_string(line_no) + ": flag '" + key +
                                 "' takes true or false");
            }
        } else {
            from_file.push_back("--" + key);
            from_file.push_back(value);
        }
    }

    std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1);
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), user.begin(), user.end());
    return out;
}

void add_rates(CLI::App& sub, RateFlags& f) {
    sub.add_option("--lambda-e", f.lambda_e, "Source self-update rate [events/time]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--lambda", f.lambda, "Total source-to-network update rate [events/time]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

void add_sim_flags(CLI::App& sub, RateFlags& f) {
    sub.add_option("--budget", f.budget, "Total gossip rate B [events/time] (default: n * lambda)")
        ->check(CLI::NonNegativeNumber);
    sub.add_option("--c", f.c_rule, "ASUMAN back-off constant C [time/version]: 'over-n' (1/n) or a number")
        ->capture_default_str();
    sub.add_option("--warmup", f.warmup, "Fraction of the horizon excluded from averages [0,1)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub.add_option("--seed", f.seed, "Root random seed [unsigned 64-bit]")->capture_default_str();
}

int run_simulate(const RateFlags& f, std::size_t n, const std::string& scheme_name, double horizon,
                 bool epoch_trace, std::uint64_t max_epochs, int verbosity, std::ostream& out,
                 std::ostream& err) {
    SimConfig cfg;
    cfg.n = n;
    cfg.lambda_e = f.lambda_e;
    cfg.lambda = f.lambda;
    cfg.budget = f.budget ? *f.budget : static_cast<double>(n) * f.lambda;
    cfg.scheme = parse_scheme(scheme_name, parse_c_rule(f.c_rule));
    cfg.horizon = horizon;
    cfg.warmup_fraction = f.warmup;
    cfg.seed = f.seed;
    cfg.record_epoch_trace = epoch_trace;
    cfg.max_epochs = max_epochs;
    if (verbosity > 0) {
        err << "simulating " << scheme_key(cfg.scheme) << " n=" << n << " horizon=" << num(horizon)
            << " seed=" << cfg.seed << '\n';
    }
    const SimResult r = run_simulation(cfg);

    double lo = r.per_node_time_avg_age.front();
    double hi = lo;
    for (double a : r.per_node_time_avg_age) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    out << "scheme: " << scheme_label(cfg.scheme) << '\n'
        << "n: " << n << '\n'
        << "lambda_e: " << num(cfg.lambda_e) << '\n'
        << "lambda: " << num(cfg.lambda) << '\n'
        << "budget: " << num(cfg.budget) << '\n';
    if (const auto* a = std::get_if<Asuman>(&cfg.scheme)) out << "C: " << num(a->c_rule.resolve(n)) << '\n';
    out << "seed: " << cfg.seed << '\n'
        << "effective_horizon: " << num(r.effective_horizon) << '\n'
        << "window_start: " << num(r.window_start) << '\n'
        << "network_mean_age: " << num(r.network_mean_age) << '\n'
        << "node_age_min: " << num(lo) << '\n'
        << "node_age_max: " << num(hi) << '\n'
        << "self_updates: " << r.counts.self_updates << '\n'
        << "source_deliveries: " << r.counts.source_deliveries << '\n'
        << "gossip_deliveries: " << r.counts.gossip_deliveries << '\n';
    if (std::holds_alternative<Asuman>(cfg.scheme)) {
        out << "gossip_phases: " << r.counts.gossip_phases << '\n'
            << "suppressed_nodes: " << r.counts.suppressed_nodes << '\n';
    }
    if (epoch_trace) {
        const auto& trace = epoch_min_age_trace(r);
        double sum = 0.0;
        std::size_t counted = 0;
        for (const auto& s : trace) {
            if (s.k > trace.size() / 10) {
                sum += static_cast<double>(s.min_age);
                ++counted;
            }
        }
        out << "epochs: " << trace.size() << '\n'
            << "epoch_min_age_mean: " << num(counted ? sum / static_cast<double>(counted) : 0.0) << '\n'
            << "epoch_min_age_head:";
        for (std::size_t i = 0; i < trace.size() && i < 10; ++i) out << ' ' << trace[i].min_age;
        out << '\n';
    }
    return 0;
}

int run_sweep_cmd(const RateFlags& f, const std::vector<std::size_t>& n_values,
                  const std::vector<std::string>& scheme_names, std::optional<double> horizon,
                  std::size_t reps, unsigned threads, bool wall_time, const std::string& output,
                  int verbosity, std::ostream& out, std::ostream& err) {
    harness::SweepSpec spec;
    spec.n_values = n_values;
    const CRule rule = parse_c_rule(f.c_rule);
    for (const auto& s : scheme_names) spec.schemes.push_back(parse_scheme(s, rule));
    spec.lambda_e = f.lambda_e;
    spec.lambda = f.lambda;
    spec.budget = f.budget;
    spec.replications = reps;
    spec.horizon = horizon;
    spec.warmup_fraction = f.warmup;
    spec.base_seed = f.seed;
    spec.threads = threads;
    spec.record_wall_time = wall_time;
    if (verbosity > 0) {
        err << "sweep: " << spec.schemes.size() << " scheme(s) x " << n_values.size() << " n value(s) x "
            << reps << " replication(s)\n";
    }
    const auto rows = harness::run_sweep(spec);
    harness::write_csv(rows, output);
    for (const auto& r : rows) {
        out << r.scheme << " n=" << r.n << " mean_age=" << num(r.mean_age) << " ci95=+/-"
            << num(r.ci_half_width_95);
        if (r.bound_finite_n) out << " bound_finite_n=" << num(*r.bound_finite_n);
        if (r.bound_asymptotic) out << " bound_asymptotic=" << num(*r.bound_asymptotic);
        out << '\n';
    }
    out << "wrote " << rows.size() << " row(s) to " << output << '\n';
    return 0;
}

int run_bounds(const RateFlags& f, std::optional<std::size_t> n, std::uint64_t k_max, std::ostream& out) {
    analytics::RateParams p{f.lambda_e, f.lambda, 0.0, n.value_or(1)};
    p.budget = f.budget ? *f.budget : static_cast<double>(p.n) * p.lambda;
    const bool finite_n = n && *n >= 2;

    out << "lambda_e: " << num(p.lambda_e) << '\n'
        << "lambda: " << num(p.lambda) << '\n'
        << "rate_ratio: " << num(p.lambda_e / p.lambda) << '\n'
        << "min_age_mean_limit: " << num(analytics::min_age_mean_limit(p)) << '\n'
        << "asymptotic_bound: " << num(analytics::asymptotic_bound(p)) << '\n'
        << "sensing_bound_limit: " << num(analytics::sensing_bound_limit(p)) << '\n';
    if (finite_n) {
        out << "n: " << p.n << '\n'
            << "budget: " << num(p.budget) << '\n'
            << "steady_state_bound_finite_n: " << num(analytics::steady_state_bound_finite_n(p)) << '\n'
            << "gossip_phase_bound_limit: " << num(analytics::gossip_phase_bound_limit(p)) << '\n';
    }
    out << "k,min_age_mean,sensing_bound" << (finite_n ? ",gossip_phase_bound" : "") << '\n';
    for (std::uint64_t k = 0; k <= k_max; ++k) {
        out << k << ',' << num(analytics::min_age_mean(k, p)) << ','
            << (k >= 1 ? num(analytics::sensing_bound_seq(k, p)) : std::string{});
        if (finite_n) out << ',' << num(analytics::gossip_phase_bound(k, p));
        out << '\n';
    }
    return 0;
}

} // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Version-age gossip simulator: ASUMAN opportunistic gossip, uniform gossip, analytic bounds",
                 "asuman"};
    app.require_subcommand(1);
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Progress messages on stderr (repeat for more)");

    RateFlags sim_flags;
    std::size_t sim_n = 1;
    std::string sim_scheme = "asuman";
    double sim_horizon = 2e4;
    bool sim_trace = false;
    std::uint64_t sim_max_epochs = 0;
    auto* simulate = app.add_subcommand("simulate", "Run one simulation and print a summary");
    add_config(*simulate);
    simulate->add_option("--n", sim_n, "Number of nodes [count]")->check(CLI::PositiveNumber)->capture_default_str();
    add_rates(*simulate, sim_flags);
    add_sim_flags(*simulate, sim_flags);
    simulate->add_option("--scheme", sim_scheme, "Gossip scheme: asuman | uniform | nogossip")
        ->check(CLI::IsMember({"asuman", "uniform", "nogossip"}))
        ->capture_default_str();
    simulate->add_option("--horizon", sim_horizon, "Simulated duration [time]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_flag("--epoch-trace", sim_trace, "Record and summarize the min age at each source self-update");
    simulate->add_option("--max-epochs", sim_max_epochs, "Stop after this many source self-updates, 0 = none [count]")
        ->capture_default_str();

    RateFlags sweep_flags;
    std::vector<std::size_t> sweep_n;
    std::vector<std::string> sweep_schemes{"asuman", "uniform"};
    std::optional<double> sweep_horizon;
    std::size_t sweep_reps = 20;
    unsigned sweep_threads = 0;
    bool sweep_wall = false;
    std::string sweep_output;
    auto* sweep = app.add_subcommand("sweep", "Replicated sweep over n and scheme, written as CSV");
    add_config(*sweep);
    sweep->add_option("--n-values", sweep_n, "Network sizes, comma separated, strictly increasing [count]")
        ->delimiter(',')
        ->required()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--scheme", sweep_schemes, "Schemes, comma separated: asuman, uniform, nogossip")
        ->delimiter(',')
        ->check(CLI::IsMember({"asuman", "uniform", "nogossip"}))
        ->capture_default_str();
    add_rates(*sweep, sweep_flags);
    add_sim_flags(*sweep, sweep_flags);
    sweep->add_option("--horizon", sweep_horizon, "Simulated duration per replication [time] (default: max(2e4, 50 n) / lambda)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--reps", sweep_reps, "Replications per (scheme, n) [count]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--threads", sweep_threads, "Worker threads, 0 = all cores [count]")->capture_default_str();
    sweep->add_flag("--wall-time", sweep_wall, "Fill wall_time_s [s]; makes the CSV non-reproducible");
    sweep->add_option("--output", sweep_output, "CSV destination [path]")->required();

    RateFlags bounds_flags;
    std::optional<std::size_t> bounds_n;
    std::uint64_t bounds_k = 10;
    auto* bounds = app.add_subcommand("bounds", "Print closed-form min-age means and age bounds");
    add_config(*bounds);
    add_rates(*bounds, bounds_flags);
    bounds->add_option("--n", bounds_n, "Number of nodes for finite-n bounds [count]")->check(CLI::PositiveNumber);
    bounds->add_option("--budget", bounds_flags.budget, "Total gossip rate B [events/time] (default: n * lambda)")
        ->check(CLI::NonNegativeNumber);
    bounds->add_option("--k-max", bounds_k, "Last interval index in the tables [count]")->capture_default_str();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(std::move(args), app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help("", CLI::AppFormatMode::All) : app.help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const CLI::App* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << failing->help();
        return 2;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(sim_flags, sim_n, sim_scheme, sim_horizon, sim_trace, sim_max_epochs,
                                verbosity, out, err);
        }
        if (sweep->parsed()) {
            return run_sweep_cmd(sweep_flags, sweep_n, sweep_schemes, sweep_horizon, sweep_reps,
                                 sweep_threads, sweep_wall, sweep_output, verbosity, out, err);
        }
        return run_bounds(bounds_flags, bounds_n, bounds_k, out);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace asuman::cli
