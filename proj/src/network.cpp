#include "kpsa/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace kpsa {

Network Network::build(int node_count, std::vector<Link> links, NodeId first_thru_node,
                       int zone_count) {
    if (node_count < 0) throw InvalidInputError("negative node count");
    if (first_thru_node < 1 || first_thru_node > node_count + 1) {
        throw InvalidInputError("first thru node " + std::to_string(first_thru_node) +
                                " outside 1.." + std::to_string(node_count + 1));
    }
    Network net;
    net.first_thru_node = first_thru_node;
    net.zone_count = zone_count;
    net.nodes.resize(node_count);
    for (int i = 0; i < node_count; ++i) net.nodes[i].id = i + 1;
    net.out_links.assign(node_count + 1, {});
    net.links = std::move(links);
    for (std::size_t i = 0; i < net.links.size(); ++i) {
        Link& link = net.links[i];
        link.id = static_cast<LinkId>(i);
        auto check_node = [&](NodeId node, const char* what) {
            if (node < 1 || node > node_count) {
                throw InvalidInputError("link " + std::to_string(i) + ": " + what + " node " +
                                        std::to_string(node) + " outside 1.." +
                                        std::to_string(node_count));
            }
        };
        check_node(link.tail, "tail");
        check_node(link.head, "head");
        if (link.free_flow_time < 0 || link.bpr_b < 0 || link.bpr_power < 0) {
            throw InvalidInputError("link " + std::to_string(i) +
                                    ": negative performance parameter");
        }
        if (link.bpr_power > 0 && link.capacity <= 0) {
            throw InvalidInputError("link " + std::to_string(i) +
                                    ": capacity must be positive when the delay exponent is");
        }
        net.out_links[link.tail].push_back(link.id);
    }
    return net;
}

void DemandMatrix::add(NodeId origin, NodeId destination, double demand) {
    if (demand < 0) {
        throw InvalidInputError("negative demand " + std::to_string(demand) + " for OD (" +
                                std::to_string(origin) + ", " + std::to_string(destination) +
                                ")");
    }
    if (demand == 0 || origin == destination) return;
    entries_.push_back({{origin, destination}, demand});
}

void DemandMatrix::normalize() {
    std::sort(entries_.begin(), entries_.end(),
              [](const OdEntry& a, const OdEntry& b) { return a.od < b.od; });
    std::vector<OdEntry> merged;
    merged.reserve(entries_.size());
    for (const OdEntry& e : entries_) {
        if (!merged.empty() && merged.back().od == e.od) {
            merged.back().demand += e.demand;
        } else {
            merged.push_back(e);
        }
    }
    entries_ = std::move(merged);
}

std::vector<OriginRange> origin_ranges(const DemandMatrix& demand) {
    std::vector<OriginRange> ranges;
    const auto& entries = demand.entries();
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].od.origin == entries[i].od.origin) ++j;
        ranges.push_back({entries[i].od.origin, i, j});
        i = j;
    }
    return ranges;
}

double DemandMatrix::total() const {
    return std::accumulate(entries_.begin(), entries_.end(), 0.0,
                           [](double acc, const OdEntry& e) { return acc + e.demand; });
}

double link_travel_time(const Link& link, double flow) {
    if (link.bpr_power > 0 && link.capacity <= 0) {
        throw InvalidInputError("link " + std::to_string(link.id) +
                                ": delay undefined for non-positive capacity");
    }
    if (link.bpr_power == 0 || link.bpr_b == 0) return link.free_flow_time;
    double ratio = flow / link.capacity;
    return link.free_flow_time * (1.0 + link.bpr_b * std::pow(ratio, link.bpr_power));
}

std::vector<double> all_link_times(const Network& network, std::span<const double> flows) {
    if (flows.size() != network.links.size()) {
        throw InvalidInputError("flow vector size " + std::to_string(flows.size()) +
                                " does not match link count " +
                                std::to_string(network.links.size()));
    }
    std::vector<double> times(flows.size());
    for (std::size_t a = 0; a < flows.size(); ++a) {
        times[a] = link_travel_time(network.links[a], flows[a]);
    }
    return times;
}

double path_travel_time(std::span<const LinkId> path, std::span<const double> times) {
    if (path.empty()) throw InvalidInputError("empty path");
    double total = 0.0;
    for (LinkId a : path) {
        if (a < 0 || static_cast<std::size_t>(a) >= times.size()) {
            throw InvalidInputError("path references invalid link " + std::to_string(a));
        }
        total += times[static_cast<std::size_t>(a)];
    }
    return total;
}

std::vector<double> aggregate_link_flows(const Network& network,
                                         std::span<const OdPathSet> path_sets) {
    std::vector<double> flows(network.links.size(), 0.0);
    for (const OdPathSet& set : path_sets) {
        for (std::size_t p = 0; p < set.path_count(); ++p) {
            double q = set.flow(p);
            if (q == 0) continue;
            for (LinkId a : set.path(p)) {
                if (a < 0 || static_cast<std::size_t>(a) >= flows.size()) {
                    throw InvalidInputError("path references invalid link " +
                                            std::to_string(a));
                }
                flows[static_cast<std::size_t>(a)] += q;
            }
        }
    }
    return flows;
}

LinkState loaded_state(const Network& network, std::span<const OdPathSet> path_sets) {
    LinkState state;
    state.flow = aggregate_link_flows(network, path_sets);
    state.time = all_link_times(network, state.flow);
    return state;
}

OdPathSet::OdPathSet(OdPair od, double demand) : od_(od), demand_(demand) {
    if (demand <= 0) {
        throw InvalidInputError("OD (" + std::to_string(od.origin) + ", " +
                                std::to_string(od.destination) +
                                ") requires positive demand");
    }
}

std::int64_t OdPathSet::total_units() const {
    return std::accumulate(units_.begin(), units_.end(), std::int64_t{0});
}

std::vector<double> OdPathSet::flows() const {
    std::vector<double> result(paths_.size());
    for (std::size_t p = 0; p < paths_.size(); ++p) result[p] = flow(p);
    return result;
}

bool OdPathSet::contains(const Path& path) const {
    return std::find(paths_.begin(), paths_.end(), path) != paths_.end();
}

bool OdPathSet::add_path(Path path, std::int64_t units) {
    if (path.empty()) throw InvalidInputError("empty path");
    if (units < 0) throw InvalidInputError("negative path flow");
    if (contains(path)) return false;
    paths_.push_back(std::move(path));
    units_.push_back(units);
    return true;
}

std::int64_t OdPathSet::shift_units(std::size_t from, std::size_t to, std::int64_t units) {
    std::int64_t moved = std::min(units, units_[from]);
    if (from == to || moved <= 0) return 0;
    units_[from] -= moved;
    units_[to] += moved;
    return moved;
}

}  // namespace kpsa
