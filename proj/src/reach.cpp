#include "gapmeet/reach.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "gapmeet/csv.hpp"

namespace gapmeet {

namespace {

// Dijkstra over the sample subgraph. `reversed` walks arcs backwards.
std::unordered_map<int, double> sample_dijkstra(const SubNetworkSample& sample,
                                                const SpatialNetwork& net, int origin,
                                                bool reversed) {
    std::unordered_map<int, int> local;  // dense node id -> local index
    local.reserve(sample.node_ids.size());
    for (size_t i = 0; i < sample.node_ids.size(); ++i) {
        local[sample.node_ids[i]] = static_cast<int>(i);
    }
    struct Arc {
        int target;
        double weight;
    };
    std::vector<std::vector<Arc>> adj(sample.node_ids.size());
    for (size_t i = 0; i < sample.arc_ids.size(); ++i) {
        const NetworkEdge& e = net.edges[sample.arc_ids[i]];
        const int u = local.at(reversed ? e.to : e.from);
        const int v = local.at(reversed ? e.from : e.to);
        adj[u].push_back({v, sample.arc_weights[i]});
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> distv(sample.node_ids.size(), inf);
    auto origin_it = local.find(origin);
    std::unordered_map<int, double> out;
    if (origin_it == local.end()) return out;

    using Item = std::pair<double, int>;  // (dist, local idx); smaller idx pops first on ties
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    distv[origin_it->second] = 0.0;
    heap.push({0.0, origin_it->second});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > distv[u]) continue;
        for (const Arc& a : adj[u]) {
            const double nd = d + a.weight;
            if (nd < distv[a.target]) {
                distv[a.target] = nd;
                heap.push({nd, a.target});
            }
        }
    }
    for (size_t i = 0; i < sample.node_ids.size(); ++i) {
        if (distv[i] < inf) out[sample.node_ids[i]] = distv[i];
    }
    return out;
}

}  // namespace

std::unordered_map<int, double> earliest_arrival(const SubNetworkSample& sample,
                                                 const SpatialNetwork& net, int source_node,
                                                 double t_s) {
    auto dist_map = sample_dijkstra(sample, net, source_node, false);
    for (auto& [node, d] : dist_map) d = t_s + d;
    return dist_map;
}

std::unordered_map<int, double> latest_departure(const SubNetworkSample& sample,
                                                 const SpatialNetwork& net, int sink_node,
                                                 double t_e) {
    auto dist_map = sample_dijkstra(sample, net, sink_node, true);
    for (auto& [node, d] : dist_map) d = t_e - d;
    return dist_map;
}

int snap_to_sample(const SubNetworkSample& sample, const SpatialNetwork& net, const Point& p,
                   double radius) {
    int best = -1;
    double best_d = radius;
    for (int id : sample.node_ids) {
        const double d = dist(net.nodes[id].location, p);
        if (d < best_d || (d == best_d && best == -1)) {
            best_d = d;
            best = id;
        }
    }
    return best;
}

ReachProfile availability(const SubNetworkSample& sample, const SpatialNetwork& net,
                          const TrajectoryGap& gap, double anchor_snap_m) {
    const int source = snap_to_sample(sample, net, gap.start_anchor, anchor_snap_m);
    if (source < 0) {
        throw SnapError("gap " + std::to_string(gap.gap_id) +
                        ": start anchor has no sample node within snap radius");
    }
    const int sink = snap_to_sample(sample, net, gap.end_anchor, anchor_snap_m);
    if (sink < 0) {
        throw SnapError("gap " + std::to_string(gap.gap_id) +
                        ": end anchor has no sample node within snap radius");
    }
    ReachProfile profile;
    profile.gap_id = gap.gap_id;
    profile.slice_index = sample.slice_index;
    profile.source_node = source;
    profile.sink_node = sink;
    profile.slice_weights = sample.arc_weights;
    const auto ea = earliest_arrival(sample, net, source, gap.t_s);
    const auto ld = latest_departure(sample, net, sink, gap.t_e);
    for (const auto& [node, arrive] : ea) {
        auto it = ld.find(node);
        if (it == ld.end()) continue;
        if (arrive <= it->second) profile.alpha[node] = {arrive, it->second};
    }
    return profile;
}

ReachProfile refresh_profile(const ReachProfile& prev, const SubNetworkSample& next,
                             const SpatialNetwork& net, const TrajectoryGap& gap, double tau,
                             double anchor_snap_m, RefreshStats* stats) {
    if (prev.gap_id != gap.gap_id) throw ContractError("refresh_profile: gap mismatch");
    if (prev.slice_weights.size() != next.arc_weights.size()) {
        throw ContractError("refresh_profile: sample is from a different pair");
    }
    const double drift = weight_drift(prev.slice_weights, next.arc_weights);
    if (drift < tau) {
        ReachProfile reused = prev;
        reused.slice_index = next.slice_index;
        reused.slice_weights = next.arc_weights;
        if (stats) ++stats->reuses;
        return reused;
    }
    if (stats) ++stats->recomputes;
    return availability(next, net, gap, anchor_snap_m);
}

}  // namespace gapmeet
