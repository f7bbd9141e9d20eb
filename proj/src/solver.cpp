#include "kpsa/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kpsa/shortest_path.hpp"
#include "parallel.hpp"

namespace kpsa {

namespace {

// Fractions of q_rs moved per iteration when growing to 2..5 paths; halves
// for every further path.
constexpr double kBaseAlphas[] = {0.01, 0.005, 0.002, 0.001};
constexpr int kDefaultIterations = 100;

std::vector<std::vector<double>> compute_path_times(const std::vector<OdPathSet>& path_sets,
                                                    const std::vector<double>& times,
                                                    int threads) {
    std::vector<std::vector<double>> path_times(path_sets.size());
    detail::parallel_for(path_sets.size(), threads, 512, [&](std::size_t i) {
        const OdPathSet& set = path_sets[i];
        std::vector<double> row(set.path_count());
        for (std::size_t p = 0; p < set.path_count(); ++p) {
            row[p] = path_travel_time(set.path(p), times);
        }
        path_times[i] = std::move(row);
    });
    return path_times;
}

}  // namespace

SolverConfig SolverConfig::defaults(int k) {
    SolverConfig config;
    config.k = k;
    double alpha = kBaseAlphas[std::size(kBaseAlphas) - 1];
    for (int n = 2; n <= k; ++n) {
        if (n - 2 < static_cast<int>(std::size(kBaseAlphas))) {
            alpha = kBaseAlphas[n - 2];
        } else {
            alpha /= 2;
        }
        config.schedule.push_back({kDefaultIterations, alpha});
    }
    return config;
}

void SolverConfig::validate() const {
    if (k < 1) throw InvalidInputError("path count k must be at least 1");
    if (schedule.size() != static_cast<std::size_t>(k - 1)) {
        throw InvalidInputError("schedule must cover every round 2.." + std::to_string(k));
    }
    for (const RoundParams& round : schedule) {
        if (round.iterations < 0) throw InvalidInputError("negative iteration count");
        if (round.alpha <= 0 || round.alpha >= 1) {
            throw InvalidInputError("shift fraction must lie in (0, 1)");
        }
    }
    if (threads < 0) throw InvalidInputError("negative thread count");
}

std::pair<std::vector<OdPathSet>, LinkState> all_or_nothing(const Network& network,
                                                            const DemandMatrix& demand,
                                                            int threads) {
    std::vector<double> free_flow =
        all_link_times(network, std::vector<double>(network.links.size(), 0.0));
    const auto& entries = demand.entries();
    std::vector<OdPathSet> path_sets;
    path_sets.reserve(entries.size());
    for (const OdEntry& e : entries) path_sets.emplace_back(e.od, e.demand);

    auto ranges = origin_ranges(demand);
    detail::parallel_for(ranges.size(), threads, 1, [&](std::size_t r) {
        ShortestPathTree tree = one_to_all(network, ranges[r].origin, free_flow);
        for (std::size_t i = ranges[r].begin; i < ranges[r].end; ++i) {
            Path path = extract_path(network, tree, entries[i].od.destination);
            path_sets[i].add_path(std::move(path), OdPathSet::kFlowDenom);
        }
    });
    LinkState state = loaded_state(network, path_sets);
    return {std::move(path_sets), std::move(state)};
}

void generate_new_paths(const Network& network, const DemandMatrix& demand,
                        std::vector<OdPathSet>& path_sets, const LinkState& link_state,
                        int threads) {
    const auto& entries = demand.entries();
    if (path_sets.size() != entries.size()) {
        throw InvalidInputError("path sets do not match demand entries");
    }
    auto ranges = origin_ranges(demand);
    detail::parallel_for(ranges.size(), threads, 1, [&](std::size_t r) {
        ShortestPathTree tree = one_to_all(network, ranges[r].origin, link_state.time);
        for (std::size_t i = ranges[r].begin; i < ranges[r].end; ++i) {
            Path path = extract_path(network, tree, entries[i].od.destination);
            path_sets[i].add_path(std::move(path), 0);
        }
    });
}

void subtract_add_pass(std::vector<OdPathSet>& path_sets,
                       const std::vector<std::vector<double>>& path_times, double alpha,
                       int threads) {
    if (alpha <= 0 || alpha >= 1) throw InvalidInputError("shift fraction must lie in (0, 1)");
    if (path_times.size() != path_sets.size()) {
        throw InvalidInputError("path times do not match path sets");
    }
    std::int64_t shift = std::llround(alpha * static_cast<double>(OdPathSet::kFlowDenom));
    detail::parallel_for(path_sets.size(), threads, 512, [&](std::size_t i) {
        OdPathSet& set = path_sets[i];
        const std::vector<double>& t = path_times[i];
        if (set.path_count() < 2) return;
        // The donor is the slowest path that still carries flow; an empty
        // path has nothing to give, and treating it as the donor would lock
        // the whole pair in place. The receiver is the fastest path overall.
        std::size_t slowest = set.path_count();
        std::size_t fastest = 0;
        for (std::size_t p = 0; p < set.path_count(); ++p) {
            if (set.flow_units(p) > 0 &&
                (slowest == set.path_count() || t[p] > t[slowest])) {
                slowest = p;
            }
            if (t[p] < t[fastest]) fastest = p;
        }
        if (slowest == set.path_count() || slowest == fastest) return;
        set.shift_units(slowest, fastest, shift);
    });
}

LinkState subtract_add(const Network& network, std::vector<OdPathSet>& path_sets,
                       int iterations, double alpha, int threads) {
    for (int it = 0; it < iterations; ++it) {
        LinkState state = loaded_state(network, path_sets);
        auto path_times = compute_path_times(path_sets, state.time, threads);
        subtract_add_pass(path_sets, path_times, alpha, threads);
    }
    return loaded_state(network, path_sets);
}

Solution solve(const Network& network, const DemandMatrix& demand,
               const SolverConfig& config) {
    config.validate();
    auto start = std::chrono::steady_clock::now();

    auto [path_sets, state] = all_or_nothing(network, demand, config.threads);
    for (int n = 2; n <= config.k; ++n) {
        generate_new_paths(network, demand, path_sets, state, config.threads);
        const RoundParams& round = config.schedule[n - 2];
        state = subtract_add(network, path_sets, round.iterations, round.alpha,
                             config.threads);
    }

    auto elapsed = std::chrono::steady_clock::now() - start;
    Solution solution;
    solution.path_sets = std::move(path_sets);
    solution.link_state = std::move(state);
    solution.cpu_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    solution.config = config;
    return solution;
}

}  // namespace kpsa
