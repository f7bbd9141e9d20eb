#pragma once

#include <span>
#include <vector>

#include "kpsa/network.hpp"

namespace kpsa {

struct OracleResult {
    std::vector<double> link_flows;
    double relative_gap = 0.0;
    int iterations = 0;
    double total_system_time = 0.0;  // sum of flow * time over links
    bool converged = false;
};

// Beckmann objective: sum over links of the integral of the volume-delay
// curve from 0 to the link's flow.
double beckmann_objective(const Network& network, std::span<const double> flows);

// Frank-Wolfe user-equilibrium reference with exact line search (64
// bisection steps on the directional derivative). The relative gap is
// 1 - SPTT/TSTT, where TSTT = sum(v_a * t_a(v)) and SPTT = sum(y_a * t_a(v))
// for the all-or-nothing target y at current times; SPTT is the total time
// the same demand would incur if every trip took a currently-shortest path,
// so the ratio reaching 1 certifies Wardrop equilibrium. Returns the
// best-so-far flows with converged = false when max_iter runs out.
OracleResult frank_wolfe_solve(const Network& network, const DemandMatrix& demand,
                               double gap_tol, int max_iter, int threads = 0);

}  // namespace kpsa
