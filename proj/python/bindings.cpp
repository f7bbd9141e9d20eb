#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "kpsa/errors.hpp"
#include "kpsa/frank_wolfe.hpp"
#include "kpsa/metrics.hpp"
#include "kpsa/network.hpp"
#include "kpsa/solver.hpp"
#include "kpsa/tntp.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

PYBIND11_MODULE(_kpsa, m) {
    m.doc() = "k-paths subtracting-adding traffic assignment";

    py::register_exception<kpsa::ParseError>(m, "ParseError");
    py::register_exception<kpsa::InvalidInputError>(m, "InvalidInputError");
    py::register_exception<kpsa::IoError>(m, "IoError");
    py::register_exception<kpsa::UnreachableOdError>(m, "UnreachableOdError");

    py::class_<kpsa::OdPair>(m, "OdPair")
        .def_readonly("origin", &kpsa::OdPair::origin)
        .def_readonly("destination", &kpsa::OdPair::destination)
        .def("__eq__",
             [](const kpsa::OdPair& a, const kpsa::OdPair& b) { return a == b; })
        .def("__repr__", [](const kpsa::OdPair& od) {
            return "OdPair(" + std::to_string(od.origin) + ", " +
                   std::to_string(od.destination) + ")";
        });

    py::class_<kpsa::Network>(m, "Network")
        .def_property_readonly("node_count", &kpsa::Network::node_count)
        .def_property_readonly("link_count", &kpsa::Network::link_count)
        .def_readonly("zone_count", &kpsa::Network::zone_count)
        .def_readonly("first_thru_node", &kpsa::Network::first_thru_node)
        .def("__repr__", [](const kpsa::Network& net) {
            return "Network(nodes=" + std::to_string(net.node_count()) +
                   ", links=" + std::to_string(net.link_count()) +
                   ", zones=" + std::to_string(net.zone_count) + ")";
        });

    py::class_<kpsa::DemandMatrix>(m, "DemandMatrix")
        .def("__len__", &kpsa::DemandMatrix::size)
        .def_property_readonly("total", &kpsa::DemandMatrix::total)
        .def("entries", [](const kpsa::DemandMatrix& demand) {
            std::vector<std::tuple<int, int, double>> out;
            out.reserve(demand.size());
            for (const kpsa::OdEntry& e : demand.entries()) {
                out.emplace_back(e.od.origin, e.od.destination, e.demand);
            }
            return out;
        });

    py::class_<kpsa::ParsedInstance>(m, "ParsedInstance")
        .def_readonly("name", &kpsa::ParsedInstance::name)
        .def_readonly("network", &kpsa::ParsedInstance::network)
        .def_readonly("demand", &kpsa::ParsedInstance::demand);

    py::class_<kpsa::OdPathSet>(m, "OdPathSet")
        .def_property_readonly("od", &kpsa::OdPathSet::od)
        .def_property_readonly("demand", &kpsa::OdPathSet::demand)
        .def_property_readonly("path_count", &kpsa::OdPathSet::path_count)
        .def("paths", [](const kpsa::OdPathSet& set) { return set.paths(); })
        .def("flows", &kpsa::OdPathSet::flows);

    py::class_<kpsa::Solution>(m, "Solution")
        .def_readonly("cpu_ms", &kpsa::Solution::cpu_ms)
        .def_readonly("path_sets", &kpsa::Solution::path_sets)
        .def_property_readonly(
            "k", [](const kpsa::Solution& s) { return s.config.k; })
        .def_property_readonly(
            "link_flows", [](const kpsa::Solution& s) { return s.link_state.flow; })
        .def_property_readonly(
            "link_times", [](const kpsa::Solution& s) { return s.link_state.time; });

    py::class_<kpsa::OdMetric>(m, "OdMetric")
        .def_readonly("od", &kpsa::OdMetric::od)
        .def_readonly("avg_time", &kpsa::OdMetric::avg_time)
        .def_readonly("shortest_time", &kpsa::OdMetric::shortest_time)
        .def_readonly("deviation_percent", &kpsa::OdMetric::deviation_percent);

    py::class_<kpsa::HistogramBin>(m, "HistogramBin")
        .def_readonly("lo", &kpsa::HistogramBin::lo)
        .def_readonly("hi", &kpsa::HistogramBin::hi)
        .def_readonly("count", &kpsa::HistogramBin::count)
        .def_readonly("rel_freq", &kpsa::HistogramBin::rel_freq);

    py::class_<kpsa::AssignmentReport>(m, "AssignmentReport")
        .def_readonly("instance", &kpsa::AssignmentReport::instance)
        .def_readonly("k", &kpsa::AssignmentReport::k)
        .def_readonly("e_percent", &kpsa::AssignmentReport::e_percent)
        .def_readonly("pearson_r", &kpsa::AssignmentReport::pearson_r)
        .def_readonly("ue_grade", &kpsa::AssignmentReport::ue_grade)
        .def_readonly("od_count", &kpsa::AssignmentReport::od_count)
        .def_readonly("degenerate_od_count", &kpsa::AssignmentReport::degenerate_od_count)
        .def_readonly("cpu_ms", &kpsa::AssignmentReport::cpu_ms)
        .def_readonly("report_ms", &kpsa::AssignmentReport::report_ms)
        .def_readonly("od_metrics", &kpsa::AssignmentReport::od_metrics)
        .def_property_readonly("histogram", [](const kpsa::AssignmentReport& report) {
            return std::vector<kpsa::HistogramBin>(report.histogram.begin(),
                                                   report.histogram.end());
        });

    py::class_<kpsa::OracleResult>(m, "OracleResult")
        .def_readonly("link_flows", &kpsa::OracleResult::link_flows)
        .def_readonly("relative_gap", &kpsa::OracleResult::relative_gap)
        .def_readonly("iterations", &kpsa::OracleResult::iterations)
        .def_readonly("total_system_time", &kpsa::OracleResult::total_system_time)
        .def_readonly("converged", &kpsa::OracleResult::converged);

    m.def(
        "load_instance",
        [](const std::string& net_path, const std::string& trips_path,
           const std::string& name) {
            return kpsa::load_instance(net_path, trips_path, name);
        },
        "net_path"_a, "trips_path"_a, "name"_a = "",
        py::call_guard<py::gil_scoped_release>(),
        "Parse a TNTP network/trips pair into an instance.");

    m.def(
        "solve",
        [](const kpsa::Network& network, const kpsa::DemandMatrix& demand, int k,
           int threads) {
            kpsa::SolverConfig config = kpsa::SolverConfig::defaults(k);
            config.threads = threads;
            return kpsa::solve(network, demand, config);
        },
        "network"_a, "demand"_a, "k"_a = 4, "threads"_a = 0,
        py::call_guard<py::gil_scoped_release>(),
        "Assign demand over up to k stored paths per OD pair.");

    m.def("build_report", &kpsa::build_report, "solution"_a, "network"_a, "demand"_a,
          "threads"_a = 0, py::call_guard<py::gil_scoped_release>(),
          "Grade a solution: deviations, correlation, histogram.");

    m.def("scatter_data", &kpsa::scatter_data, "report"_a,
          "Per-OD (average time, shortest time) pairs.");

    m.def("frank_wolfe_solve", &kpsa::frank_wolfe_solve, "network"_a, "demand"_a,
          "gap_tol"_a = 1e-4, "max_iter"_a = 100000, "threads"_a = 0,
          py::call_guard<py::gil_scoped_release>(),
          "Link-flow user-equilibrium reference via Frank-Wolfe.");
}
