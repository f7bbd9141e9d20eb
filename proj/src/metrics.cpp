#include "kpsa/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "kpsa/shortest_path.hpp"
#include "parallel.hpp"

namespace kpsa {

double average_path_time(const OdPathSet& path_set, std::span<const double> times) {
    if (path_set.path_count() == 0) {
        throw InvalidInputError("OD (" + std::to_string(path_set.od().origin) + ", " +
                                std::to_string(path_set.od().destination) +
                                ") holds no paths");
    }
    double weighted = 0.0;
    for (std::size_t p = 0; p < path_set.path_count(); ++p) {
        weighted += static_cast<double>(path_set.flow_units(p)) *
                    path_travel_time(path_set.path(p), times);
    }
    return weighted / static_cast<double>(OdPathSet::kFlowDenom);
}

double od_deviation(double avg_time, double shortest_time) {
    if (shortest_time <= 0) {
        throw InvalidInputError("degenerate OD pair: shortest time is not positive");
    }
    double deviation = (avg_time - shortest_time) / shortest_time * 100.0;
    if (deviation < 0) {
        if (deviation < -1e-7) {
            throw InvalidInputError("average path time below the shortest time");
        }
        return 0.0;
    }
    return deviation;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidInputError("series lengths differ");
    if (xs.size() < 2) throw InvalidInputError("correlation needs at least two points");
    std::size_t n = xs.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0) throw InvalidInputError("zero variance, correlation undefined");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

int histogram_bin(double deviation_percent) {
    if (deviation_percent < 0) throw InvalidInputError("negative deviation");
    double width = kHistogramEdges[1] - kHistogramEdges[0];
    int idx = static_cast<int>(deviation_percent / width);
    return std::min(idx, kHistogramBins - 1);
}

std::string ue_grade_label(double r) {
    long long hundredths = std::llround(r * 100.0);
    long long mag = std::llabs(hundredths);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%lld.%02lldUE", hundredths < 0 ? "-" : "", mag / 100,
                  mag % 100);
    return buf;
}

AssignmentReport build_report(const Solution& solution, const Network& network,
                              const DemandMatrix& demand, int threads) {
    auto start = std::chrono::steady_clock::now();
    const auto& entries = demand.entries();
    const auto& path_sets = solution.path_sets;
    if (path_sets.size() != entries.size()) {
        throw InvalidInputError("solution path sets do not match demand entries");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(path_sets[i].od() == entries[i].od)) {
            throw InvalidInputError("solution path sets out of demand order");
        }
    }

    std::vector<double> times = all_link_times(network, solution.link_state.flow);

    std::vector<double> shortest(entries.size(), 0.0);
    auto ranges = origin_ranges(demand);
    detail::parallel_for(ranges.size(), threads, 1, [&](std::size_t r) {
        ShortestPathTree tree = one_to_all(network, ranges[r].origin, times);
        for (std::size_t i = ranges[r].begin; i < ranges[r].end; ++i) {
            NodeId dest = entries[i].od.destination;
            if (!tree.reached(dest)) throw UnreachableOdError(ranges[r].origin, dest);
            shortest[i] = tree.dist[dest];
        }
    });

    AssignmentReport report;
    report.k = solution.config.k;
    report.config = solution.config;
    report.cpu_ms = solution.cpu_ms;
    report.od_count = static_cast<int>(entries.size());
    report.od_metrics.resize(entries.size());
    detail::parallel_for(entries.size(), threads, 256, [&](std::size_t i) {
        OdMetric& m = report.od_metrics[i];
        m.od = entries[i].od;
        m.avg_time = average_path_time(path_sets[i], times);
        m.shortest_time = shortest[i];
        m.deviation_percent = m.shortest_time > 0 ? od_deviation(m.avg_time, m.shortest_time)
                                                  : 0.0;
    });

    for (int b = 0; b < kHistogramBins; ++b) {
        report.histogram[b].lo = kHistogramEdges[b];
        report.histogram[b].hi = b + 1 < kHistogramBins
                                     ? kHistogramEdges[b + 1]
                                     : std::numeric_limits<double>::infinity();
    }
    std::vector<double> xs;
    std::vector<double> ys;
    xs.reserve(entries.size());
    ys.reserve(entries.size());
    double deviation_sum = 0.0;
    for (const OdMetric& m : report.od_metrics) {
        if (m.shortest_time <= 0) {
            ++report.degenerate_od_count;
            continue;
        }
        deviation_sum += m.deviation_percent;
        ++report.histogram[histogram_bin(m.deviation_percent)].count;
        xs.push_back(m.avg_time);
        ys.push_back(m.shortest_time);
    }
    std::size_t counted = xs.size();
    report.e_percent = counted > 0 ? deviation_sum / static_cast<double>(counted) : 0.0;
    for (HistogramBin& bin : report.histogram) {
        bin.rel_freq = counted > 0 ? static_cast<double>(bin.count) /
                                         static_cast<double>(counted)
                                   : 0.0;
    }
    if (counted >= 2) {
        try {
            report.pearson_r = pearson_r(xs, ys);
            report.ue_grade = ue_grade_label(*report.pearson_r);
        } catch (const InvalidInputError&) {
            report.pearson_r.reset();
        }
    }

    auto elapsed = std::chrono::steady_clock::now() - start;
    report.report_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    return report;
}

std::vector<std::pair<double, double>> scatter_data(const AssignmentReport& report) {
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(report.od_metrics.size());
    for (const OdMetric& m : report.od_metrics) {
        pairs.emplace_back(m.avg_time, m.shortest_time);
    }
    return pairs;
}

}  // namespace kpsa
