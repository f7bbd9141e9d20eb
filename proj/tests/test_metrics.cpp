#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "kpsa/errors.hpp"
#include "kpsa/metrics.hpp"
#include "kpsa/network.hpp"
#include "kpsa/solver.hpp"
#include "kpsa/tntp.hpp"

namespace {

using kpsa::InvalidInputError;
using kpsa::Link;
using kpsa::Network;
using kpsa::OdPathSet;

Link make_link(kpsa::NodeId tail, kpsa::NodeId head, double t0, double capacity = 100.0,
               double b = 0.15, double power = 4.0) {
    Link link;
    link.tail = tail;
    link.head = head;
    link.capacity = capacity;
    link.free_flow_time = t0;
    link.bpr_b = b;
    link.bpr_power = power;
    return link;
}

kpsa::ParsedInstance sioux_falls() {
    auto dir = std::filesystem::path(KPSA_DATA_DIR);
    return kpsa::load_instance((dir / "SiouxFalls_net.tntp").string(),
                               (dir / "SiouxFalls_trips.tntp").string());
}

kpsa::AssignmentReport sioux_report(int k) {
    kpsa::ParsedInstance inst = sioux_falls();
    kpsa::Solution solution =
        kpsa::solve(inst.network, inst.demand, kpsa::SolverConfig::defaults(k));
    return kpsa::build_report(solution, inst.network, inst.demand);
}

}  // namespace

TEST(AveragePathTime, EqualTimesCollapseToThatTime) {
    OdPathSet set({1, 2}, 3.0);
    set.add_path({0}, 600000);
    set.add_path({1}, 400000);
    std::vector<double> times = {3.0, 3.0};
    EXPECT_DOUBLE_EQ(kpsa::average_path_time(set, times), 3.0);
}

TEST(AveragePathTime, WeightsByPathFlowShares) {
    OdPathSet set({1, 2}, 100.0);
    set.add_path({0}, 990000);  // 99% of demand at time 10
    set.add_path({1}, 10000);   // 1% of demand at time 5
    std::vector<double> times = {10.0, 5.0};
    EXPECT_DOUBLE_EQ(kpsa::average_path_time(set, times), 9.95);
}

TEST(AveragePathTime, RejectsEmptyPathSet) {
    OdPathSet set({1, 2}, 1.0);
    std::vector<double> times = {1.0};
    EXPECT_THROW(kpsa::average_path_time(set, times), InvalidInputError);
}

TEST(OdDeviation, PercentAboveShortest) {
    EXPECT_DOUBLE_EQ(kpsa::od_deviation(3.0, 3.0), 0.0);
    EXPECT_DOUBLE_EQ(kpsa::od_deviation(10.5, 10.0), 5.0);
    EXPECT_DOUBLE_EQ(kpsa::od_deviation(19.9, 10.0), 99.0);
}

TEST(OdDeviation, RejectsDegenerateShortestTime) {
    EXPECT_THROW(kpsa::od_deviation(1.0, 0.0), InvalidInputError);
    EXPECT_THROW(kpsa::od_deviation(1.0, -2.0), InvalidInputError);
}

TEST(OdDeviation, RoundoffBelowShortestClampsToZero) {
    // A hair under the shortest time is floating-point noise, not an error.
    EXPECT_DOUBLE_EQ(kpsa::od_deviation(10.0 * (1.0 - 1e-12), 10.0), 0.0);
    // A real violation still throws.
    EXPECT_THROW(kpsa::od_deviation(9.99, 10.0), InvalidInputError);
}

TEST(PearsonR, PerfectCorrelationHitsTheBounds) {
    std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> up = {2.0, 4.0, 6.0, 8.0};
    std::vector<double> down = {8.0, 6.0, 4.0, 2.0};
    EXPECT_DOUBLE_EQ(kpsa::pearson_r(xs, up), 1.0);
    EXPECT_DOUBLE_EQ(kpsa::pearson_r(xs, down), -1.0);
}

TEST(PearsonR, MatchesClosedFormOnSmallSeries) {
    std::vector<double> xs = {1.0, 2.0, 3.0};
    std::vector<double> ys = {2.0, 4.0, 7.0};
    // sxy = 5, sxx = 2, syy = 38/3, so r = 15 / sqrt(228).
    double expected = 15.0 / std::sqrt(228.0);
    EXPECT_NEAR(kpsa::pearson_r(xs, ys), expected, 1e-15);
    EXPECT_NEAR(kpsa::pearson_r(xs, ys), 0.9933992677987828, 1e-12);
}

TEST(PearsonR, InvariantUnderAffineRescaling) {
    std::vector<double> xs = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0};
    std::vector<double> ys = {2.0, 7.0, 1.0, 8.0, 2.0, 8.0};
    double base = kpsa::pearson_r(xs, ys);
    std::vector<double> scaled;
    for (double y : ys) scaled.push_back(3.0 * y + 7.0);
    EXPECT_NEAR(kpsa::pearson_r(xs, scaled), base, 1e-12);
}

TEST(PearsonR, RejectsIllFormedSeries) {
    std::vector<double> xs = {1.0, 2.0};
    std::vector<double> short_ys = {1.0};
    EXPECT_THROW(kpsa::pearson_r(xs, short_ys), InvalidInputError);

    std::vector<double> one = {1.0};
    EXPECT_THROW(kpsa::pearson_r(one, one), InvalidInputError);

    std::vector<double> flat = {2.0, 2.0, 2.0};
    std::vector<double> ys = {1.0, 2.0, 3.0};
    EXPECT_THROW(kpsa::pearson_r(flat, ys), InvalidInputError);
    EXPECT_THROW(kpsa::pearson_r(ys, flat), InvalidInputError);
}

TEST(HistogramBin, FivePercentEdgesWithOpenTail) {
    EXPECT_EQ(kpsa::histogram_bin(0.0), 0);
    EXPECT_EQ(kpsa::histogram_bin(4.999), 0);
    EXPECT_EQ(kpsa::histogram_bin(5.0), 1);
    EXPECT_EQ(kpsa::histogram_bin(14.999), 2);
    EXPECT_EQ(kpsa::histogram_bin(29.999), 5);
    EXPECT_EQ(kpsa::histogram_bin(30.0), 6);
    EXPECT_EQ(kpsa::histogram_bin(1e9), 6);
    EXPECT_THROW(kpsa::histogram_bin(-0.001), InvalidInputError);
}

TEST(UeGradeLabel, RoundsToHundredths) {
    EXPECT_EQ(kpsa::ue_grade_label(0.98941), "0.99UE");
    EXPECT_EQ(kpsa::ue_grade_label(0.985), "0.99UE");
    EXPECT_EQ(kpsa::ue_grade_label(0.98), "0.98UE");
    EXPECT_EQ(kpsa::ue_grade_label(1.0), "1.00UE");
    EXPECT_EQ(kpsa::ue_grade_label(0.9), "0.90UE");
    EXPECT_EQ(kpsa::ue_grade_label(-0.5), "-0.50UE");
}

TEST(BuildReport, SingleOdSinglePathIsExactEquilibrium) {
    std::vector<Link> links;
    links.push_back(make_link(1, 2, 5.0));
    Network net = Network::build(2, links, 1, 2);
    kpsa::DemandMatrix demand;
    demand.add(1, 2, 10.0);
    demand.normalize();

    kpsa::Solution solution = kpsa::solve(net, demand, kpsa::SolverConfig::defaults(1));
    kpsa::AssignmentReport report = kpsa::build_report(solution, net, demand);

    EXPECT_EQ(report.od_count, 1);
    EXPECT_EQ(report.degenerate_od_count, 0);
    EXPECT_DOUBLE_EQ(report.e_percent, 0.0);
    EXPECT_FALSE(report.pearson_r.has_value());
    EXPECT_TRUE(report.ue_grade.empty());
    ASSERT_EQ(report.od_metrics.size(), 1u);
    EXPECT_DOUBLE_EQ(report.od_metrics[0].deviation_percent, 0.0);
    EXPECT_EQ(report.histogram[0].count, 1);
    EXPECT_DOUBLE_EQ(report.histogram[0].rel_freq, 1.0);
    for (int b = 1; b < kpsa::kHistogramBins; ++b) {
        EXPECT_EQ(report.histogram[b].count, 0);
    }
}

TEST(BuildReport, ZeroTimeOdPairsAreCountedAsDegenerate) {
    // Link 0 has zero travel time at any flow, so OD (1, 2) has no positive
    // shortest time and must not pollute the deviation statistics.
    std::vector<Link> links;
    links.push_back(make_link(1, 2, 0.0, 0.0, 0.0, 0.0));
    links.push_back(make_link(1, 3, 5.0));
    Network net = Network::build(3, links, 1, 3);
    kpsa::DemandMatrix demand;
    demand.add(1, 2, 5.0);
    demand.add(1, 3, 7.0);
    demand.normalize();

    kpsa::Solution solution = kpsa::solve(net, demand, kpsa::SolverConfig::defaults(1));
    kpsa::AssignmentReport report = kpsa::build_report(solution, net, demand);

    EXPECT_EQ(report.od_count, 2);
    EXPECT_EQ(report.degenerate_od_count, 1);
    EXPECT_DOUBLE_EQ(report.e_percent, 0.0);
    EXPECT_FALSE(report.pearson_r.has_value());  // one counted pair is not enough
    int total = 0;
    for (const auto& bin : report.histogram) total += bin.count;
    EXPECT_EQ(total, 1);  // only the non-degenerate pair lands in a bin
    EXPECT_DOUBLE_EQ(report.histogram[0].rel_freq, 1.0);
    // Every OD pair still gets a metrics row for the scatter output.
    ASSERT_EQ(report.od_metrics.size(), 2u);
    EXPECT_DOUBLE_EQ(report.od_metrics[0].shortest_time, 0.0);
    EXPECT_DOUBLE_EQ(report.od_metrics[0].deviation_percent, 0.0);
}

TEST(BuildReport, RejectsMismatchedSolution) {
    std::vector<Link> links;
    links.push_back(make_link(1, 2, 5.0));
    Network net = Network::build(2, links, 1, 2);
    kpsa::DemandMatrix demand;
    demand.add(1, 2, 10.0);
    demand.normalize();
    kpsa::Solution solution = kpsa::solve(net, demand, kpsa::SolverConfig::defaults(1));

    kpsa::DemandMatrix other;
    other.add(1, 2, 10.0);
    other.add(2, 1, 4.0);
    other.normalize();
    EXPECT_THROW(kpsa::build_report(solution, net, other), InvalidInputError);
}

TEST(ScatterData, MirrorsOdMetricsInOrder) {
    kpsa::AssignmentReport report = sioux_report(2);
    auto pairs = kpsa::scatter_data(report);
    ASSERT_EQ(pairs.size(), report.od_metrics.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        EXPECT_DOUBLE_EQ(pairs[i].first, report.od_metrics[i].avg_time);
        EXPECT_DOUBLE_EQ(pairs[i].second, report.od_metrics[i].shortest_time);
        EXPECT_GE(pairs[i].first, pairs[i].second - 1e-9);
    }
}

TEST(ScatterData, RecoversTheMeanDeviation) {
    kpsa::AssignmentReport report = sioux_report(2);
    auto pairs = kpsa::scatter_data(report);
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& [avg, shortest] : pairs) {
        if (shortest <= 0) continue;
        sum += kpsa::od_deviation(avg, shortest);
        ++counted;
    }
    ASSERT_GT(counted, 0u);
    EXPECT_NEAR(sum / static_cast<double>(counted), report.e_percent, 1e-9);
}

TEST(BuildReport, SiouxFallsBinCountsAreConsistent) {
    kpsa::AssignmentReport report = sioux_report(4);
    EXPECT_EQ(report.od_count, 528);
    EXPECT_EQ(report.degenerate_od_count, 0);
    int total = 0;
    double rel = 0.0;
    for (const auto& bin : report.histogram) {
        total += bin.count;
        rel += bin.rel_freq;
    }
    EXPECT_EQ(total, 528);
    EXPECT_NEAR(rel, 1.0, 1e-9);
    ASSERT_TRUE(report.pearson_r.has_value());
    EXPECT_GT(*report.pearson_r, 0.9);
    EXPECT_LE(*report.pearson_r, 1.0);
    EXPECT_FALSE(report.ue_grade.empty());
}

TEST(BuildReport, MoreStoredPathsTightenSiouxFalls) {
    kpsa::AssignmentReport two = sioux_report(2);
    kpsa::AssignmentReport three = sioux_report(3);
    kpsa::AssignmentReport four = sioux_report(4);
    EXPECT_LT(three.e_percent, two.e_percent);
    EXPECT_LT(four.e_percent, three.e_percent);
    ASSERT_TRUE(two.pearson_r && three.pearson_r && four.pearson_r);
    EXPECT_GT(*three.pearson_r, *two.pearson_r);
    EXPECT_GT(*four.pearson_r, *three.pearson_r);
}
