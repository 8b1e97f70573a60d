#pragma once

// Shared detection fixtures. The grid fixture reconstructs the introductory
// example: two gaps over [2,6] at speed 1 on a unit grid, whose prism bound
// holds six nodes while the time-sliced bound holds the middle two.

#include <set>
#include <tuple>
#include <vector>

#include "gapmeet/gaps.hpp"
#include "helpers.hpp"

namespace gapmeet::testing {

struct GridFixture {
    SpatialNetwork net;
    TrajectoryGap gap_a;
    TrajectoryGap gap_b;
    GapPair pair;
    std::set<int> prism_nodes;  // the six candidates
    std::set<int> sliced_nodes; // the two that survive time slicing
    int node_id(int x, int y) const { return (y + 3) * 7 + (x + 3); }
};

inline GridFixture grid_fixture() {
    GridFixture f;
    std::vector<Point> coords;
    std::vector<std::tuple<int, int, double>> edges;
    for (int y = -3; y <= 3; ++y) {
        for (int x = -3; x <= 3; ++x) {
            coords.push_back({static_cast<double>(x), static_cast<double>(y)});
        }
    }
    auto id = [&](int x, int y) { return (y + 3) * 7 + (x + 3); };
    for (int y = -3; y <= 3; ++y) {
        for (int x = -3; x <= 3; ++x) {
            if (x + 1 <= 3) edges.push_back({id(x, y), id(x + 1, y), 1.0});
            if (y + 1 <= 3) edges.push_back({id(x, y), id(x, y + 1), 1.0});
        }
    }
    f.net = make_network(coords, edges);

    f.gap_a = {0, 1, {-1.5, 0.45}, {1.5, 0.45}, 2.0, 6.0, 1.0};
    f.gap_b = {1, 2, {0.0, 2.2}, {0.0, -1.2}, 2.0, 6.0, 1.0};

    f.pair.pair_id = 0;
    f.pair.first_gap = 0;
    f.pair.second_gap = 1;
    f.pair.overlap_start = 2.0;
    f.pair.overlap_end = 6.0;
    f.pair.ellipse_a = f.gap_a.ellipse();
    f.pair.ellipse_b = f.gap_b.ellipse();

    for (int x : {-1, 0, 1}) {
        for (int y : {0, 1}) f.prism_nodes.insert(id(x, y));
    }
    f.sliced_nodes = {id(0, 0), id(0, 1)};
    return f;
}

// Five-node chain with weights 2,1,1,2 used for the earliest-arrival /
// latest-departure walkthrough.
struct ChainFixture {
    SpatialNetwork net;
    SubNetworkSample sample;
    TrajectoryGap gap;
};

inline ChainFixture chain_fixture() {
    ChainFixture f;
    std::vector<Point> coords{{0, 0}, {2, 0}, {3, 0}, {4, 0}, {6, 0}};
    std::vector<std::tuple<int, int, double>> edges{{0, 1, 2.0}, {1, 2, 1.0}, {2, 3, 1.0},
                                                    {3, 4, 2.0}};
    f.net = make_network(coords, edges);
    f.sample.pair_id = 0;
    f.sample.slice_index = 0;
    f.sample.slice_time = 0.0;
    f.sample.node_ids = {0, 1, 2, 3, 4};
    for (size_t i = 0; i < f.net.edges.size(); ++i) {
        f.sample.arc_ids.push_back(static_cast<int>(i));
        f.sample.arc_weights.push_back(f.net.edges[i].length / 1.0);  // 1 m/s
    }
    f.gap = {0, 1, {0, 0}, {6, 0}, 0.0, 10.0, 10.0};
    return f;
}

}  // namespace gapmeet::testing
