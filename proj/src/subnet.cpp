#include "gapmeet/subnet.hpp"

#include <algorithm>
#include <cmath>

#include "gapmeet/csv.hpp"

namespace gapmeet {

namespace {

// Axis-aligned bounding box of an ellipse.
void ellipse_bbox(const GeoEllipse& e, Point& lo, Point& hi) {
    const Point c = e.center();
    const double a = e.semi_major();
    const double b = e.semi_minor();
    const double theta = e.axis_angle();
    const double ex = std::sqrt(std::pow(a * std::cos(theta), 2) + std::pow(b * std::sin(theta), 2));
    const double ey = std::sqrt(std::pow(a * std::sin(theta), 2) + std::pow(b * std::cos(theta), 2));
    lo = {c.x - ex, c.y - ey};
    hi = {c.x + ex, c.y + ey};
}

std::vector<int> region_arcs(const SpatialNetwork& net, const std::vector<int>& node_ids) {
    std::vector<char> inside(net.nodes.size(), 0);
    for (int id : node_ids) inside[id] = 1;
    std::vector<int> arcs;
    for (int id : node_ids) {
        for (int arc : net.out_arcs[id]) {
            if (inside[net.edges[arc].to]) arcs.push_back(arc);
        }
    }
    std::sort(arcs.begin(), arcs.end());
    return arcs;
}

std::vector<double> window_weights(const SpatialNetwork& net, const HistoricTraces& traces,
                                   const std::vector<int>& arc_ids, double t_a, double t_b,
                                   const WeightParams& params) {
    std::vector<double> weights;
    weights.reserve(arc_ids.size());
    for (int arc : arc_ids) {
        const NetworkEdge& e = net.edges[arc];
        if (t_a < t_b) {
            weights.push_back(edge_weight_at(net, traces, e, t_a, t_b, params));
        } else {
            // degenerate window (zero-length overlap): fall back to free flow
            weights.push_back(e.length / params.default_speed_mps);
        }
    }
    return weights;
}

}  // namespace

std::vector<int> region_nodes(const SpatialNetwork& net, const GapPair& pair) {
    Point lo_a, hi_a, lo_b, hi_b;
    ellipse_bbox(pair.ellipse_a, lo_a, hi_a);
    ellipse_bbox(pair.ellipse_b, lo_b, hi_b);
    const Point lo{std::max(lo_a.x, lo_b.x), std::max(lo_a.y, lo_b.y)};
    const Point hi{std::min(hi_a.x, hi_b.x), std::min(hi_a.y, hi_b.y)};
    std::vector<int> out;
    for (const NetworkNode& n : net.nodes) {
        const Point& p = n.location;
        if (p.x < lo.x - kGeoEps || p.x > hi.x + kGeoEps || p.y < lo.y - kGeoEps ||
            p.y > hi.y + kGeoEps) {
            continue;
        }
        if (pair.region_contains(p)) out.push_back(n.id);
    }
    return out;
}

std::vector<SubNetworkSample> build_samples(const SpatialNetwork& net,
                                            const HistoricTraces& traces, const GapPair& pair,
                                            int slice_count, const WeightParams& params) {
    if (slice_count < 2) throw ConfigError("slice count must be at least 2");
    const std::vector<int> nodes = region_nodes(net, pair);
    if (nodes.empty()) return {};
    const std::vector<int> arcs = region_arcs(net, nodes);
    const double span = pair.overlap_end - pair.overlap_start;
    std::vector<SubNetworkSample> samples;
    samples.reserve(slice_count + 1);
    for (int k = 0; k <= slice_count; ++k) {
        SubNetworkSample s;
        s.pair_id = pair.pair_id;
        s.slice_index = k;
        s.slice_time = pair.overlap_start + span * k / slice_count;
        s.node_ids = nodes;
        s.arc_ids = arcs;
        const int win = std::min(k, slice_count - 1);
        const double w_a = pair.overlap_start + span * win / slice_count;
        const double w_b = pair.overlap_start + span * (win + 1) / slice_count;
        s.arc_weights = window_weights(net, traces, arcs, w_a, w_b, params);
        samples.push_back(std::move(s));
    }
    return samples;
}

SubNetworkSample build_window_sample(const SpatialNetwork& net, const HistoricTraces& traces,
                                     const GapPair& pair, const WeightParams& params) {
    SubNetworkSample s;
    s.pair_id = pair.pair_id;
    s.slice_index = 0;
    s.slice_time = pair.overlap_start;
    s.node_ids = region_nodes(net, pair);
    if (s.node_ids.empty()) return s;
    s.arc_ids = region_arcs(net, s.node_ids);
    s.arc_weights = window_weights(net, traces, s.arc_ids, pair.overlap_start, pair.overlap_end, params);
    return s;
}

double weight_drift(const SubNetworkSample& prev, const SubNetworkSample& next) {
    if (prev.arc_ids != next.arc_ids) throw ContractError("weight_drift: edge sets differ");
    return weight_drift(prev.arc_weights, next.arc_weights);
}

SliceWeights::SliceWeights(const SpatialNetwork& net, const HistoricTraces& traces,
                           const GapPair& pair, int slice_count, const WeightParams& params)
    : net_(net), traces_(traces), pair_(pair), slice_count_(slice_count), params_(params) {
    if (slice_count < 2) throw ConfigError("slice count must be at least 2");
    node_ids_ = region_nodes(net, pair);
    if (node_ids_.empty()) return;
    arc_ids_ = region_arcs(net, node_ids_);
    cache_.resize(slice_count + 1);
    ready_.assign(slice_count + 1, false);
}

double SliceWeights::slice_time(int k) const {
    const double span = pair_.overlap_end - pair_.overlap_start;
    return pair_.overlap_start + span * k / slice_count_;
}

const SubNetworkSample& SliceWeights::sample(int k) {
    if (!ready_[k]) {
        SubNetworkSample s;
        s.pair_id = pair_.pair_id;
        s.slice_index = k;
        s.slice_time = slice_time(k);
        s.node_ids = node_ids_;
        s.arc_ids = arc_ids_;
        const int win = std::min(k, slice_count_ - 1);
        s.arc_weights = window_weights(net_, traces_, arc_ids_, slice_time(win),
                                       slice_time(win + 1), params_);
        cache_[k] = std::move(s);
        ready_[k] = true;
    }
    return cache_[k];
}

}  // namespace gapmeet
