#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kpsa/errors.hpp"

namespace kpsa {

using NodeId = int;  // 1-based, as in the input files
using LinkId = int;  // dense 0-based index into Network::links

struct Node {
    NodeId id = 0;
};

struct Link {
    LinkId id = -1;
    NodeId tail = 0;
    NodeId head = 0;
    double capacity = 0.0;        // c_a, vehicles per unit time
    double free_flow_time = 0.0;  // t0_a
    double bpr_b = 0.0;           // B coefficient of the volume-delay curve
    double bpr_power = 0.0;       // exponent of the volume-delay curve
    // carried through from the input, unused by the solver
    double length = 0.0;
    double speed_limit = 0.0;
    double toll = 0.0;
    int link_type = 0;
};

// Directed road network. Immutable after construction; safe to share
// across concurrent readers.
struct Network {
    std::vector<Node> nodes;  // ids 1..|N|, contiguous
    std::vector<Link> links;
    NodeId first_thru_node = 1;  // nodes with id below this carry no through traffic
    int zone_count = 0;
    std::vector<std::vector<LinkId>> out_links;  // indexed by node id; ascending link id

    int node_count() const { return static_cast<int>(nodes.size()); }
    int link_count() const { return static_cast<int>(links.size()); }

    // Validates link endpoints and volume-delay parameters, fills nodes
    // and adjacency. Throws ParseError on bad data.
    static Network build(int node_count, std::vector<Link> links, NodeId first_thru_node,
                         int zone_count);
};

struct OdPair {
    NodeId origin = 0;
    NodeId destination = 0;

    friend bool operator==(const OdPair&, const OdPair&) = default;
    friend auto operator<=>(const OdPair&, const OdPair&) = default;
};

struct OdEntry {
    OdPair od;
    double demand = 0.0;  // q_rs > 0
};

// Positive origin-destination demands, sorted by (origin, destination).
// Zero and diagonal entries are dropped on insertion, so size() is the
// number of retained OD pairs.
class DemandMatrix {
public:
    // Drops q == 0 and origin == destination; throws InvalidInputError on q < 0.
    void add(NodeId origin, NodeId destination, double demand);

    // Sorts entries and merges duplicates. Call once after the last add().
    void normalize();

    const std::vector<OdEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    double total() const;

private:
    std::vector<OdEntry> entries_;
};

// Contiguous run of demand entries sharing an origin; the unit of work for
// per-origin shortest-path trees.
struct OriginRange {
    NodeId origin = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<OriginRange> origin_ranges(const DemandMatrix& demand);

// Per-link aggregate flow v_a and the travel time t_a evaluated at it.
struct LinkState {
    std::vector<double> flow;
    std::vector<double> time;
};

// An origin-to-destination route as a link-id sequence.
using Path = std::vector<LinkId>;

// Volume-delay curve t0*(1 + B*(v/c)^power). Returns t0 exactly at zero
// flow and whenever B or power is zero (constant-time links).
double link_travel_time(const Link& link, double flow);

// Element-wise link_travel_time over the whole network.
std::vector<double> all_link_times(const Network& network, std::span<const double> flows);

// Sum of link times along a path. Throws on an empty path or bad index.
double path_travel_time(std::span<const LinkId> path, std::span<const double> times);

class OdPathSet;

// Per-link flow totals implied by the current path flows.
std::vector<double> aggregate_link_flows(const Network& network,
                                         std::span<const OdPathSet> path_sets);

// Aggregate flows plus the link times evaluated at them.
LinkState loaded_state(const Network& network, std::span<const OdPathSet> path_sets);

// Paths stored for one OD pair together with the split of its demand.
//
// Per-path flows are tracked as integer parts-per-million of the OD demand:
// shifts move whole units between paths, so the per-OD flow total is
// conserved exactly and reruns are bit-identical.
class OdPathSet {
public:
    static constexpr std::int64_t kFlowDenom = 1'000'000;

    OdPathSet(OdPair od, double demand);

    const OdPair& od() const { return od_; }
    double demand() const { return demand_; }

    std::size_t path_count() const { return paths_.size(); }
    const Path& path(std::size_t p) const { return paths_[p]; }
    const std::vector<Path>& paths() const { return paths_; }

    std::int64_t flow_units(std::size_t p) const { return units_[p]; }
    std::int64_t total_units() const;  // always kFlowDenom
    double flow(std::size_t p) const {
        return demand_ * static_cast<double>(units_[p]) / static_cast<double>(kFlowDenom);
    }
    std::vector<double> flows() const;

    bool contains(const Path& path) const;

    // Appends a distinct path carrying `units` of the demand; returns false
    // (and leaves the set unchanged) when the link sequence is already stored.
    bool add_path(Path path, std::int64_t units);

    // Moves `units` of demand between stored paths; clamped to what `from` holds.
    // Returns the amount actually moved.
    std::int64_t shift_units(std::size_t from, std::size_t to, std::int64_t units);

private:
    OdPair od_;
    double demand_ = 0.0;
    std::vector<Path> paths_;
    std::vector<std::int64_t> units_;
};

}  // namespace kpsa
