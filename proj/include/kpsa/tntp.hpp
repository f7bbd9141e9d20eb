#pragma once

#include <iosfwd>
#include <string>

#include "kpsa/metrics.hpp"
#include "kpsa/network.hpp"

namespace kpsa {

struct ParsedInstance {
    Network network;
    DemandMatrix demand;
    std::string name;
};

// TNTP network file: metadata tags, then one row per link
// `tail head capacity length fftime b power speed toll type ;`.
// Lines starting with `~` are comments. Throws ParseError on missing
// tags, count mismatches or malformed fields.
Network parse_network(std::istream& in);

// TNTP trips file: `Origin r` blocks of `s : q;` entries. Keeps positive
// off-diagonal demands only; checks the declared total within 1e-6 relative.
DemandMatrix parse_trips(std::istream& in);

// Reads `<name>_net.tntp` and `<name>_trips.tntp` style paths from disk.
ParsedInstance load_instance(const std::string& net_path, const std::string& trips_path,
                             std::string name = "");

// One row per link: `tail head flow time`, link-id order, LF endings.
void write_flows(const Network& network, const LinkState& state, std::ostream& out);

enum class ReportFormat { json, csv };

// JSON: single object with k, E, r, histogram, timings, schedule.
// CSV: header + one row per histogram bin, then footer key/value rows.
void write_report(const AssignmentReport& report, ReportFormat format, std::ostream& out);

// Header `avg_time,shortest_time` then one row per OD pair.
void write_scatter_csv(const AssignmentReport& report, std::ostream& out);

// Header `lo,hi,count,rel_freq` then one row per bin; `hi` of the open
// last bin prints as `inf`.
void write_histogram_csv(const AssignmentReport& report, std::ostream& out);

}  // namespace kpsa
