#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpsa/network.hpp"
#include "kpsa/solver.hpp"

namespace kpsa {

// Quality of one OD pair's assignment under the final link times.
struct OdMetric {
    OdPair od;
    double avg_time = 0.0;           // flow-weighted mean over the stored paths
    double shortest_time = 0.0;      // fresh shortest-path time on the loaded network
    double deviation_percent = 0.0;  // 100 * (avg - shortest) / shortest
};

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;  // infinity for the open-ended last bin
    int count = 0;
    double rel_freq = 0.0;
};

inline constexpr int kHistogramBins = 7;
inline constexpr std::array<double, kHistogramBins> kHistogramEdges = {0.0,  5.0,  10.0, 15.0,
                                                                       20.0, 25.0, 30.0};

struct AssignmentReport {
    std::string instance;
    int k = 0;
    std::vector<OdMetric> od_metrics;             // demand order
    double e_percent = 0.0;                       // mean deviation
    std::optional<double> pearson_r;              // empty when undefined (zero variance)
    std::string ue_grade;                         // e.g. "0.99UE"; empty when r undefined
    std::array<HistogramBin, kHistogramBins> histogram{};
    int od_count = 0;
    int degenerate_od_count = 0;  // pairs with shortest_time == 0, excluded from E/r/bins
    double cpu_ms = 0.0;          // copied from the solution
    double report_ms = 0.0;       // time spent building this report
    SolverConfig config;
};

// Flow-weighted mean travel time of the stored paths. Demand must be positive.
double average_path_time(const OdPathSet& path_set, std::span<const double> times);

// 100 * (avg - shortest) / shortest; requires shortest > 0. Values within
// rounding noise below zero clamp to zero.
double od_deviation(double avg_time, double shortest_time);

// Sample Pearson correlation. Throws InvalidInputError on length mismatch,
// fewer than two points, or zero variance in either series.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

// Index of the bin a deviation falls into: [0,5), [5,10), ... [30, inf).
int histogram_bin(double deviation_percent);

// Correlation grade label, e.g. 0.98941 -> "0.99UE" (half-up to 2 decimals).
std::string ue_grade_label(double r);

// Re-derives shortest times on the loaded network, then fills deviations,
// E, r, ue_grade and the deviation histogram.
AssignmentReport build_report(const Solution& solution, const Network& network,
                              const DemandMatrix& demand, int threads = 0);

// (avg_time, shortest_time) pairs in OD order, for external plotting.
std::vector<std::pair<double, double>> scatter_data(const AssignmentReport& report);

}  // namespace kpsa
