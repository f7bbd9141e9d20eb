#pragma once

#include <utility>
#include <vector>

#include "kpsa/network.hpp"

namespace kpsa {

// Shift parameters for one round of the subtracting-adding procedure.
struct RoundParams {
    int iterations = 100;  // N_n
    double alpha = 0.0;    // share of q_rs moved per iteration, in (0, 1)
};

struct SolverConfig {
    int k = 4;                          // target paths per OD pair
    std::vector<RoundParams> schedule;  // entry i drives the round that adds path i+2
    int threads = 0;                    // worker count, 0 = hardware concurrency

    // N_n = 100 throughout; alpha = 0.01, 0.005, 0.002, 0.001 for rounds
    // 2..5, halving beyond that.
    static SolverConfig defaults(int k);

    // Throws InvalidInputError unless k >= 1, the schedule has k-1 rounds,
    // every alpha lies in (0, 1) and every iteration count is >= 0.
    void validate() const;
};

struct Solution {
    std::vector<OdPathSet> path_sets;  // demand order
    LinkState link_state;
    double cpu_ms = 0.0;  // wall-clock solve time
    SolverConfig config;
};

// Loads each OD pair's full demand onto its shortest path under free-flow
// times. Throws UnreachableOdError naming the first disconnected pair.
std::pair<std::vector<OdPathSet>, LinkState> all_or_nothing(const Network& network,
                                                            const DemandMatrix& demand,
                                                            int threads = 0);

// Finds the shortest path per OD pair under link_state.time and appends it
// with zero flow wherever it is not already stored.
void generate_new_paths(const Network& network, const DemandMatrix& demand,
                        std::vector<OdPathSet>& path_sets, const LinkState& link_state,
                        int threads = 0);

// One subtracting-adding iteration: for each OD pair, move
// min(alpha * q_rs, donor's flow) from the slowest flow-carrying path to
// the fastest stored path (ties to the lower path index). Path times are
// fixed for the whole pass, so OD pairs are independent.
void subtract_add_pass(std::vector<OdPathSet>& path_sets,
                       const std::vector<std::vector<double>>& path_times, double alpha,
                       int threads = 0);

// Runs `iterations` passes, recomputing link flows, link times and path
// times before each one. Returns the loaded state after the final pass.
LinkState subtract_add(const Network& network, std::vector<OdPathSet>& path_sets,
                       int iterations, double alpha, int threads = 0);

// Full run: all-or-nothing seed, then for n = 2..k one new path per OD pair
// followed by a subtracting-adding round with that round's parameters.
Solution solve(const Network& network, const DemandMatrix& demand,
               const SolverConfig& config);

}  // namespace kpsa
