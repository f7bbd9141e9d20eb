#include "kpsa/frank_wolfe.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kpsa/shortest_path.hpp"
#include "parallel.hpp"

namespace kpsa {

namespace {

constexpr std::size_t kOriginChunk = 128;

// All-or-nothing link loads under fixed times: every OD pair's demand rides
// its current shortest path. Trees are built concurrently in chunks, flows
// accumulated in origin order so the result is thread-count independent.
std::vector<double> aon_link_flows(const Network& network, const DemandMatrix& demand,
                                   const std::vector<OriginRange>& ranges,
                                   std::span<const double> times, int threads) {
    const auto& entries = demand.entries();
    std::vector<double> flows(network.links.size(), 0.0);
    std::vector<ShortestPathTree> trees(std::min(kOriginChunk, ranges.size()));
    for (std::size_t chunk = 0; chunk < ranges.size(); chunk += kOriginChunk) {
        std::size_t count = std::min(kOriginChunk, ranges.size() - chunk);
        detail::parallel_for(count, threads, 1, [&](std::size_t j) {
            trees[j] = one_to_all(network, ranges[chunk + j].origin, times);
        });
        for (std::size_t j = 0; j < count; ++j) {
            const OriginRange& range = ranges[chunk + j];
            const ShortestPathTree& tree = trees[j];
            for (std::size_t i = range.begin; i < range.end; ++i) {
                NodeId node = entries[i].od.destination;
                if (!tree.reached(node)) {
                    throw UnreachableOdError(range.origin, node);
                }
                double q = entries[i].demand;
                while (tree.pred_link[node] != -1) {
                    LinkId a = tree.pred_link[node];
                    flows[a] += q;
                    node = network.links[a].tail;
                }
            }
        }
    }
    return flows;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
    return total;
}

// Directional derivative of the Beckmann objective at v + theta * (y - v).
double directional_derivative(const Network& network, std::span<const double> v,
                              std::span<const double> y, double theta) {
    double g = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) {
        double d = y[a] - v[a];
        g += d * link_travel_time(network.links[a], v[a] + theta * d);
    }
    return g;
}

}  // namespace

double beckmann_objective(const Network& network, std::span<const double> flows) {
    if (flows.size() != network.links.size()) {
        throw InvalidInputError("flow vector size does not match link count");
    }
    double total = 0.0;
    for (std::size_t a = 0; a < flows.size(); ++a) {
        const Link& link = network.links[a];
        double v = flows[a];
        total += link.free_flow_time * v;
        if (link.bpr_power > 0 && link.bpr_b > 0) {
            double p1 = link.bpr_power + 1.0;
            total += link.free_flow_time * link.bpr_b * link.capacity *
                     std::pow(v / link.capacity, p1) / p1;
        }
    }
    return total;
}

OracleResult frank_wolfe_solve(const Network& network, const DemandMatrix& demand,
                               double gap_tol, int max_iter, int threads) {
    if (gap_tol < 0) throw InvalidInputError("negative gap tolerance");
    if (max_iter < 1) throw InvalidInputError("iteration budget must be at least 1");

    auto ranges = origin_ranges(demand);
    std::vector<double> free_flow =
        all_link_times(network, std::vector<double>(network.links.size(), 0.0));
    std::vector<double> v = aon_link_flows(network, demand, ranges, free_flow, threads);

    OracleResult result;
    for (int iter = 1;; ++iter) {
        std::vector<double> t = all_link_times(network, v);
        std::vector<double> y = aon_link_flows(network, demand, ranges, t, threads);
        double tstt = dot(v, t);
        double sptt = dot(y, t);
        // Relative gap 1 - SPTT/TSTT: SPTT is the total time the same demand
        // would take along currently-shortest paths, a lower bound on TSTT
        // that both meet exactly at user equilibrium.
        double gap = tstt > 0 ? 1.0 - sptt / tstt : 0.0;
        result.iterations = iter;
        result.relative_gap = gap;
        if (gap <= gap_tol) {
            result.converged = true;
            break;
        }
        if (iter >= max_iter) break;

        double theta = 1.0;
        if (directional_derivative(network, v, y, 1.0) > 0) {
            double lo = 0.0;
            double hi = 1.0;
            for (int step = 0; step < 64; ++step) {
                double mid = 0.5 * (lo + hi);
                if (directional_derivative(network, v, y, mid) <= 0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            theta = 0.5 * (lo + hi);
        }
        for (std::size_t a = 0; a < v.size(); ++a) v[a] += theta * (y[a] - v[a]);
    }

    std::vector<double> final_times = all_link_times(network, v);
    result.total_system_time = dot(v, final_times);
    result.link_flows = std::move(v);
    return result;
}

}  // namespace kpsa
