#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "asuman/analytics.hpp"
#include "asuman/core_model.hpp"
#include "asuman/engine.hpp"
#include "asuman/errors.hpp"
#include "asuman/harness.hpp"

namespace py = pybind11;
using namespace asuman;
namespace an = asuman::analytics;
namespace hs = asuman::harness;

namespace {

CRule make_c_rule(std::optional<double> c) {
    return c ? CRule::fixed(*c) : CRule::over_n();
}

std::vector<Age> to_list(const AgeVector& ages) {
    return {ages.values().begin(), ages.values().end()};
}

std::vector<std::size_t> ids(const std::vector<NodeId>& nodes) {
    std::vector<std::size_t> out;
    out.reserve(nodes.size());
    for (auto id : nodes) out.push_back(id.value);
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Version-age gossip models: closed-form bounds, event simulation and sweeps";

    py::register_exception<AbsentData>(m, "AbsentData", PyExc_LookupError);

    py::class_<an::RateParams>(m, "RateParams")
        .def(py::init([](double lambda_e, double lambda_, double budget, std::size_t n) {
                 an::RateParams p{lambda_e, lambda_, budget, n};
                 p.validate();
                 return p;
             }),
             py::arg("lambda_e"), py::arg("lambda_"), py::arg("budget") = 0.0, py::arg("n") = 1)
        .def_static("with_default_budget", &an::RateParams::with_default_budget, py::arg("lambda_e"),
                    py::arg("lambda_"), py::arg("n"))
        .def_readonly("lambda_e", &an::RateParams::lambda_e)
        .def_readonly("lambda_", &an::RateParams::lambda)
        .def_readonly("budget", &an::RateParams::budget)
        .def_readonly("n", &an::RateParams::n);

    m.def("min_age_mean", &an::min_age_mean, py::arg("k"), py::arg("params"));
    m.def("min_age_mean_limit", &an::min_age_mean_limit, py::arg("params"));
    m.def("gossip_phase_bound", &an::gossip_phase_bound, py::arg("k"), py::arg("params"));
    m.def("gossip_phase_bound_limit", &an::gossip_phase_bound_limit, py::arg("params"));
    m.def("steady_state_bound_finite_n", &an::steady_state_bound_finite_n, py::arg("params"));
    m.def("asymptotic_bound", &an::asymptotic_bound, py::arg("params"));
    m.def("sensing_bound_seq", &an::sensing_bound_seq, py::arg("k"), py::arg("params"));
    m.def("sensing_bound_limit", &an::sensing_bound_limit, py::arg("params"));

    // Node ids are 1-based, ages are plain lists of ints.
    m.def("source_self_update", [](std::vector<Age> ages) { return to_list(source_self_update(AgeVector(std::move(ages)))); },
          py::arg("ages"));
    m.def("source_update_node",
          [](std::vector<Age> ages, std::size_t node) {
              return to_list(source_update_node(AgeVector(std::move(ages)), NodeId(node)));
          },
          py::arg("ages"), py::arg("node"));
    m.def("gossip_merge",
          [](std::vector<Age> ages, std::size_t sender, std::size_t receiver) {
              return to_list(gossip_merge(AgeVector(std::move(ages)), NodeId(sender), NodeId(receiver)));
          },
          py::arg("ages"), py::arg("sender"), py::arg("receiver"));
    m.def("min_age_set",
          [](std::vector<Age> ages) {
              const auto s = min_age_set(AgeVector(std::move(ages)));
              return py::make_tuple(s.min_age, ids(s.members));
          },
          py::arg("ages"), "Returns (min_age, members).");

    py::class_<EventCounts>(m, "EventCounts")
        .def_readonly("self_updates", &EventCounts::self_updates)
        .def_readonly("source_deliveries", &EventCounts::source_deliveries)
        .def_readonly("gossip_deliveries", &EventCounts::gossip_deliveries)
        .def_readonly("suppressed_nodes", &EventCounts::suppressed_nodes)
        .def_readonly("gossip_phases", &EventCounts::gossip_phases);

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("per_node_time_avg_age", &SimResult::per_node_time_avg_age)
        .def_readonly("network_mean_age", &SimResult::network_mean_age)
        .def_readonly("counts", &SimResult::counts)
        .def_readonly("effective_horizon", &SimResult::effective_horizon)
        .def_readonly("window_start", &SimResult::window_start)
        .def_property_readonly("epoch_min_ages",
                               [](const SimResult& r) {
                                   std::vector<std::pair<std::uint64_t, Age>> out;
                                   for (const auto& s : epoch_min_age_trace(r)) out.emplace_back(s.k, s.min_age);
                                   return out;
                               })
        .def("__eq__", [](const SimResult& a, const SimResult& b) { return a == b; });

    m.def(
        "run_simulation",
        [](std::size_t n, double lambda_e, double lambda_, std::optional<double> budget, const std::string& scheme,
           std::optional<double> c, double horizon, double warmup_fraction, std::uint64_t seed, bool epoch_trace,
           std::uint64_t max_epochs) {
            SimConfig cfg;
            cfg.n = n;
            cfg.lambda_e = lambda_e;
            cfg.lambda = lambda_;
            cfg.budget = budget.value_or(static_cast<double>(n) * lambda_);
            cfg.scheme = parse_scheme(scheme, make_c_rule(c));
            cfg.horizon = horizon;
            cfg.warmup_fraction = warmup_fraction;
            cfg.seed = seed;
            cfg.record_epoch_trace = epoch_trace;
            cfg.max_epochs = max_epochs;
            py::gil_scoped_release release;
            return run_simulation(cfg);
        },
        py::arg("n"), py::arg("lambda_e") = 1.0, py::arg("lambda_") = 1.0, py::arg("budget") = py::none(),
        py::arg("scheme") = "asuman", py::arg("c") = py::none(), py::arg("horizon") = 1e4,
        py::arg("warmup_fraction") = 0.1, py::arg("seed") = 0, py::arg("epoch_trace") = false,
        py::arg("max_epochs") = 0,
        "budget defaults to n * lambda_, c to 1/n.");

    py::class_<hs::SweepRow>(m, "SweepRow")
        .def_readonly("scheme", &hs::SweepRow::scheme)
        .def_readonly("n", &hs::SweepRow::n)
        .def_readonly("lambda_e", &hs::SweepRow::lambda_e)
        .def_readonly("lambda_", &hs::SweepRow::lambda)
        .def_readonly("budget", &hs::SweepRow::budget)
        .def_readonly("c", &hs::SweepRow::c)
        .def_readonly("replications", &hs::SweepRow::replications)
        .def_readonly("mean_age", &hs::SweepRow::mean_age)
        .def_readonly("ci_half_width_95", &hs::SweepRow::ci_half_width_95)
        .def_readonly("bound_finite_n", &hs::SweepRow::bound_finite_n)
        .def_readonly("bound_asymptotic", &hs::SweepRow::bound_asymptotic)
        .def_readonly("wall_time_s", &hs::SweepRow::wall_time_s)
        .def("__eq__", [](const hs::SweepRow& a, const hs::SweepRow& b) { return a == b; })
        .def("__repr__", [](const hs::SweepRow& r) {
            return "SweepRow(" + r.scheme + ", n=" + std::to_string(r.n) + ", mean_age=" + std::to_string(r.mean_age) + ")";
        });

    m.def(
        "run_sweep",
        [](std::vector<std::size_t> n_values, const std::vector<std::string>& schemes, double lambda_e,
           double lambda_, std::optional<double> budget, std::size_t replications, std::optional<double> horizon,
           double warmup_fraction, std::uint64_t base_seed, unsigned threads, std::optional<double> c) {
            hs::SweepSpec spec;
            spec.n_values = std::move(n_values);
            for (const auto& s : schemes) spec.schemes.push_back(parse_scheme(s, make_c_rule(c)));
            spec.lambda_e = lambda_e;
            spec.lambda = lambda_;
            spec.budget = budget;
            spec.replications = replications;
            spec.horizon = horizon;
            spec.warmup_fraction = warmup_fraction;
            spec.base_seed = base_seed;
            spec.threads = threads;
            py::gil_scoped_release release;
            return hs::run_sweep(spec);
        },
        py::arg("n_values"), py::arg("schemes") = std::vector<std::string>{"asuman", "uniform"},
        py::arg("lambda_e") = 1.0, py::arg("lambda_") = 1.0, py::arg("budget") = py::none(),
        py::arg("replications") = 20, py::arg("horizon") = py::none(), py::arg("warmup_fraction") = 0.1,
        py::arg("base_seed") = 0, py::arg("threads") = 0, py::arg("c") = py::none());

    m.def(
        "scaling_fit",
        [](const std::vector<hs::SweepRow>& rows) {
            const auto f = hs::scaling_fit(rows);
            return py::make_tuple(f.slope_vs_log_n, f.r_squared);
        },
        py::arg("rows"), "Returns (slope vs ln n, r_squared).");

    m.attr("CSV_HEADER") = hs::kCsvHeader;
    m.def("format_csv", [](const std::vector<hs::SweepRow>& rows) { return hs::format_csv(rows); }, py::arg("rows"));
    m.def("write_csv", [](const std::vector<hs::SweepRow>& rows, const std::filesystem::path& p) { hs::write_csv(rows, p); },
          py::arg("rows"), py::arg("path"));
    m.def("parse_csv", &hs::parse_csv, py::arg("text"));
    m.def("read_csv", &hs::read_csv, py::arg("path"));
}
