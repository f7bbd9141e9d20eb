#pragma once

#include <span>
#include <vector>

#include "kpsa/network.hpp"

namespace kpsa {

// One-to-all shortest path tree rooted at `origin`. Unreached nodes keep
// dist == infinity and pred_link == -1.
struct ShortestPathTree {
    NodeId origin = 0;
    std::vector<double> dist;       // indexed by node id; dist[origin] == 0
    std::vector<LinkId> pred_link;  // incoming tree link per node, -1 at the root

    bool reached(NodeId node) const { return pred_link[node] != -1 || node == origin; }
};

// Dijkstra over positive link times. Nodes below network.first_thru_node
// are not expanded unless they are the origin, so centroids never carry
// through traffic. Ties on distance resolve to the path whose link-id
// sequence is lexicographically smallest, which makes the tree independent
// of heap ordering.
ShortestPathTree one_to_all(const Network& network, NodeId origin,
                            std::span<const double> times);

// Walks pred_link back from `destination`; throws UnreachableOdError when
// the tree does not reach it.
Path extract_path(const Network& network, const ShortestPathTree& tree,
                       NodeId destination);

}  // namespace kpsa
