#include "kpsa/shortest_path.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace kpsa {

namespace {

// Link-id sequence from the origin to `node`, read off the predecessor chain.
Path chain_links(const Network& network, const std::vector<LinkId>& pred, NodeId node) {
    Path links;
    while (pred[node] != -1) {
        LinkId a = pred[node];
        links.push_back(a);
        node = network.links[a].tail;
    }
    std::reverse(links.begin(), links.end());
    return links;
}

}  // namespace

ShortestPathTree one_to_all(const Network& network, NodeId origin,
                            std::span<const double> times) {
    if (origin < 1 || origin > network.node_count()) {
        throw InvalidInputError("origin node " + std::to_string(origin) + " outside 1.." +
                                std::to_string(network.node_count()));
    }
    if (times.size() != network.links.size()) {
        throw InvalidInputError("time vector size does not match link count");
    }
    for (std::size_t a = 0; a < times.size(); ++a) {
        if (times[a] < 0) {
            throw InvalidInputError("negative time on link " + std::to_string(a));
        }
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    ShortestPathTree tree;
    tree.origin = origin;
    tree.dist.assign(network.node_count() + 1, kInf);
    tree.pred_link.assign(network.node_count() + 1, -1);
    tree.dist[origin] = 0.0;

    using Entry = std::pair<double, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    std::vector<char> settled(network.node_count() + 1, 0);
    heap.emplace(0.0, origin);

    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (settled[u]) continue;
        settled[u] = 1;
        // Zone centroids pass no through traffic: their outgoing links are
        // only usable when the centroid is the origin itself.
        if (u != origin && u < network.first_thru_node) continue;
        for (LinkId a : network.out_links[u]) {
            const Link& link = network.links[a];
            NodeId v = link.head;
            double nd = d + times[a];
            if (nd < tree.dist[v]) {
                tree.dist[v] = nd;
                tree.pred_link[v] = a;
                heap.emplace(nd, v);
            } else if (nd == tree.dist[v] && !settled[v]) {
                // Equal-cost alternative: keep the lexicographically smaller
                // link sequence so the tree is independent of heap order.
                Path current = chain_links(network, tree.pred_link, v);
                Path candidate = chain_links(network, tree.pred_link, u);
                candidate.push_back(a);
                if (candidate < current) tree.pred_link[v] = a;
            }
        }
    }
    return tree;
}

Path extract_path(const Network& network, const ShortestPathTree& tree, NodeId destination) {
    if (destination < 1 || destination > network.node_count()) {
        throw InvalidInputError("destination node " + std::to_string(destination) +
                                " outside 1.." + std::to_string(network.node_count()));
    }
    if (!tree.reached(destination)) {
        throw UnreachableOdError(tree.origin, destination);
    }
    if (destination == tree.origin) {
        throw InvalidInputError("destination equals origin " + std::to_string(destination));
    }
    return chain_links(network, tree.pred_link, destination);
}

}  // namespace kpsa
