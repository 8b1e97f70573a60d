#include <random>
#include <set>

#include "doctest.h"

#include "gapmeet/detect.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"

using namespace gapmeet;
namespace gt = gapmeet::testing;

namespace {

DetectorConfig fixture_config(double to_s) {
    DetectorConfig cfg;
    cfg.slices = 16;
    cfg.tau = 0.25;
    cfg.to_s = to_s;
    cfg.weights.default_speed_mps = 1.0;  // grid fixture runs at 1 unit/s
    return cfg;
}

std::set<int> node_set(const PairDetection& d) {
    std::set<int> out;
    for (const RendezvousNode& rn : d.nodes) out.insert(rn.node_id);
    return out;
}

}  // namespace

TEST_CASE("grid fixture: prism bounds six nodes, time slicing bounds two") {
    const auto f = gt::grid_fixture();
    const auto traces = gt::no_traces();
    const DetectorConfig cfg = fixture_config(0.0);

    const PairDetection prism = detect_prism(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(prism.report.bounded_nodes == 6);

    const PairDetection tgard = detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(tgard.report.bounded_nodes == 2);
    CHECK(node_set(tgard) == f.sliced_nodes);
    CHECK(tgard.report.slices_processed == 17);

    const PairDetection dc = detect_dc_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(dc.report.bounded_nodes == 2);
    CHECK(node_set(dc) == f.sliced_nodes);
    CHECK(dc.report.slices_processed <= 9);  // dual-frontier operations
    CHECK(dc.report.slices_processed <= tgard.report.slices_processed);

    // node pruning efficiency improves by exactly the bound ratio
    const double npe_prism = npe(f.net.node_count(), prism.report.bounded_nodes);
    const double npe_sliced = npe(f.net.node_count(), tgard.report.bounded_nodes);
    CHECK(npe_sliced == doctest::Approx(3.0 * npe_prism));
}

TEST_CASE("grid fixture: time-sliced output is a subset of prism candidates") {
    const auto f = gt::grid_fixture();
    const auto traces = gt::no_traces();
    for (double to : {0.0, 1.0, 2.0}) {
        const DetectorConfig cfg = fixture_config(to);
        const PairDetection prism = detect_prism(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
        const PairDetection tgard = detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
        const std::set<int> prism_set = node_set(prism);
        for (int node : node_set(tgard)) CHECK(prism_set.count(node) > 0);
        // every reported node passed the threshold
        for (const RendezvousNode& rn : tgard.nodes) {
            CHECK(rn.overlap.length() >= to);
        }
    }
}

TEST_CASE("raising TO never adds rendezvous nodes") {
    const auto f = gt::grid_fixture();
    const auto traces = gt::no_traces();
    size_t prev_prism = SIZE_MAX, prev_tgard = SIZE_MAX, prev_dc = SIZE_MAX;
    for (double to : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        const DetectorConfig cfg = fixture_config(to);
        const size_t n_prism =
            detect_prism(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg).nodes.size();
        const size_t n_tgard =
            detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg).nodes.size();
        const size_t n_dc =
            detect_dc_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg).nodes.size();
        CHECK(n_prism <= prev_prism);
        CHECK(n_tgard <= prev_tgard);
        CHECK(n_dc <= prev_dc);
        prev_prism = n_prism;
        prev_tgard = n_tgard;
        prev_dc = n_dc;
    }
}

TEST_CASE("raising MS never removes a prism candidate") {
    const auto f = gt::grid_fixture();
    const auto traces = gt::no_traces();
    const DetectorConfig cfg = fixture_config(0.0);
    long prev_bounded = 0;
    for (double ms : {1.0, 1.2, 1.5, 2.0, 3.0}) {
        TrajectoryGap ga = f.gap_a;
        TrajectoryGap gb = f.gap_b;
        ga.ms = ms;
        gb.ms = ms;
        GapPair pair = f.pair;
        pair.ellipse_a = ga.ellipse();
        pair.ellipse_b = gb.ellipse();
        const PairDetection prism = detect_prism(f.net, traces, pair, ga, gb, cfg);
        CHECK(prism.report.bounded_nodes >= prev_bounded);
        prev_bounded = prism.report.bounded_nodes;
    }
}

TEST_CASE("identical runs produce identical reports") {
    const auto f = gt::grid_fixture();
    const auto traces = gt::no_traces();
    const DetectorConfig cfg = fixture_config(1.0);
    const PairDetection a = detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    const PairDetection b = detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(a.report.slices_processed == b.report.slices_processed);
    CHECK(a.report.lens_tests == b.report.lens_tests);
    CHECK(a.report.sp_runs == b.report.sp_runs);
    CHECK(a.report.reuse_hits == b.report.reuse_hits);
    CHECK(a.report.bounded_nodes == b.report.bounded_nodes);
    CHECK(node_set(a) == node_set(b));
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].qualifying_slices == b.nodes[i].qualifying_slices);
    }
}

TEST_CASE("drift-free traces keep shortest-path runs at two per pair") {
    const auto f = gt::grid_fixture();
    const auto traces = gt::no_traces();  // every weight falls back to the same speed
    const DetectorConfig cfg = fixture_config(1.0);
    const PairDetection tgard = detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(tgard.report.sp_runs == 2);
    CHECK(tgard.report.reuse_hits == 2 * 16);  // both gaps, every later slice
}

TEST_CASE("tau zero forces a recompute on every slice") {
    const auto f = gt::grid_fixture();
    const auto traces = gt::no_traces();
    DetectorConfig cfg = fixture_config(1.0);
    cfg.tau = 0.0;
    const PairDetection tgard = detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(tgard.report.sp_runs == 2 * 17);
    CHECK(tgard.report.reuse_hits == 0);
    // identical weights: recomputing must not change the node set
    const PairDetection reuse =
        detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, fixture_config(1.0));
    CHECK(node_set(tgard) == node_set(reuse));
}

TEST_CASE("pair whose lenses never meet processes every slice and finds nothing") {
    // Ellipses overlap spatially, but the short time overlap keeps the lenses
    // pinned near far-apart anchors.
    std::vector<Point> coords{{12, 20}, {15, 20}, {18, 20}};
    const SpatialNetwork net =
        gt::make_network(coords, {{0, 1, 3.0}, {1, 2, 3.0}});
    TrajectoryGap ga{0, 1, {0, 0}, {10, 0}, 0.0, 10.0, 6.0};
    TrajectoryGap gb{1, 2, {10, 40}, {20, 40}, 9.5, 19.5, 6.0};
    GapPair pair;
    pair.first_gap = 0;
    pair.second_gap = 1;
    pair.overlap_start = 9.5;
    pair.overlap_end = 10.0;
    pair.ellipse_a = ga.ellipse();
    pair.ellipse_b = gb.ellipse();
    REQUIRE(regions_intersect(Region{pair.ellipse_a}, Region{pair.ellipse_b}));
    REQUIRE_FALSE(region_nodes(net, pair).empty());

    DetectorConfig cfg = fixture_config(0.0);
    const PairDetection tgard = detect_tgard(net, gt::no_traces(), pair, ga, gb, cfg);
    CHECK(tgard.nodes.empty());
    CHECK(tgard.report.bounded_nodes == 0);
    CHECK(tgard.report.slices_processed == 17);
}

TEST_CASE("empty region short-circuits both slicing detectors") {
    const SpatialNetwork net = gt::make_network({{500, 500}}, {});
    const auto f = gt::grid_fixture();
    DetectorConfig cfg = fixture_config(0.0);
    const PairDetection tgard = detect_tgard(net, gt::no_traces(), f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(tgard.nodes.empty());
    CHECK(tgard.report.slices_processed == 0);
    const PairDetection dc = detect_dc_tgard(net, gt::no_traces(), f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(dc.nodes.empty());
    CHECK(dc.report.slices_processed == 0);
}

TEST_CASE("prism availability thresholding") {
    GapPair pair;
    pair.pair_id = 3;
    SubNetworkSample sample;
    sample.node_ids = {7};
    ReachProfile pi, pj;
    pi.alpha[7] = {120.0, 360.0};
    pj.alpha[7] = {240.0, 480.0};
    CHECK(prism_rendezvous(pair, sample, pi, pj, 120.0).size() == 1);
    const auto nodes = prism_rendezvous(pair, sample, pi, pj, 120.0);
    CHECK(nodes[0].overlap.ea == doctest::Approx(240.0));
    CHECK(nodes[0].overlap.ld == doctest::Approx(360.0));
    CHECK(prism_rendezvous(pair, sample, pi, pj, 121.0).empty());
}

TEST_CASE("dual convergence equals the full walk on random drift-free pairs") {
    const auto f = gt::grid_fixture();
    const auto traces = gt::no_traces();
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> c(-2.5, 2.5);
    std::uniform_real_distribution<double> dur(4.0, 20.0);
    std::uniform_real_distribution<double> slack(1.1, 2.5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int instances = 0;
    for (int round = 0; round < 120 && instances < 40; ++round) {
        TrajectoryGap ga{0, 1, {c(rng), c(rng)}, {c(rng), c(rng)}, 0.0, 0.0, 0.0};
        ga.t_s = u(rng) * 10.0;
        ga.t_e = ga.t_s + dur(rng);
        ga.ms = std::max(0.4, dist(ga.start_anchor, ga.end_anchor) * slack(rng) / ga.duration());
        TrajectoryGap gb{1, 2, {c(rng), c(rng)}, {c(rng), c(rng)}, 0.0, 0.0, 0.0};
        gb.t_s = ga.t_s + (u(rng) - 0.3) * 4.0;
        gb.t_e = gb.t_s + dur(rng);
        gb.ms = std::max(0.4, dist(gb.start_anchor, gb.end_anchor) * slack(rng) / gb.duration());
        const double lo = std::max(ga.t_s, gb.t_s);
        const double hi = std::min(ga.t_e, gb.t_e);
        if (lo > hi) continue;
        if (!regions_intersect(Region{ga.ellipse()}, Region{gb.ellipse()})) continue;
        GapPair pair;
        pair.first_gap = 0;
        pair.second_gap = 1;
        pair.overlap_start = lo;
        pair.overlap_end = hi;
        pair.ellipse_a = ga.ellipse();
        pair.ellipse_b = gb.ellipse();
        ++instances;

        for (double to : {0.0, 1.0}) {
            const DetectorConfig cfg = fixture_config(to);
            PairDetection tgard, dc;
            try {
                tgard = detect_tgard(f.net, traces, pair, ga, gb, cfg);
                dc = detect_dc_tgard(f.net, traces, pair, ga, gb, cfg);
            } catch (const SnapError&) {
                continue;
            }
            CHECK(node_set(dc) == node_set(tgard));
            CHECK(dc.report.bounded_nodes == tgard.report.bounded_nodes);
            CHECK(dc.report.slices_processed <= tgard.report.slices_processed);
        }
    }
    CHECK(instances >= 20);
}

TEST_CASE("an off-center area peak lets dual convergence stop early") {
    // A wide, fast first gap against a slow second gap whose window starts
    // late: the intersection area peaks well past the overlap midpoint.
    std::vector<Point> coords;
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < 9; ++i) coords.push_back({30.0 + 2.5 * i, 0.0});
    for (int i = 0; i + 1 < 9; ++i) edges.push_back({i, i + 1, 2.5});
    const SpatialNetwork net = gt::make_network(coords, edges);

    TrajectoryGap ga{0, 1, {0, 0}, {80, 0}, 0.0, 100.0, 5.0};
    TrajectoryGap gb{1, 2, {40, 0}, {40, 0}, 60.0, 160.0, 1.0};
    GapPair pair;
    pair.first_gap = 0;
    pair.second_gap = 1;
    pair.overlap_start = 60.0;
    pair.overlap_end = 100.0;
    pair.ellipse_a = ga.ellipse();
    pair.ellipse_b = gb.ellipse();

    DetectorConfig cfg = fixture_config(0.0);
    cfg.weights.default_speed_mps = 5.0;
    const PairDetection tgard = detect_tgard(net, gt::no_traces(), pair, ga, gb, cfg);
    const PairDetection dc = detect_dc_tgard(net, gt::no_traces(), pair, ga, gb, cfg);
    CHECK(node_set(dc) == node_set(tgard));
    // strictly fewer dual operations than the full sweep of ceil((K+1)/2)
    CHECK(dc.report.slices_processed < (cfg.slices + 2) / 2);
    CHECK(tgard.report.slices_processed == cfg.slices + 1);
}

TEST_CASE("prism on an empty region reports nothing") {
    const SpatialNetwork net = gt::make_network({{500, 500}}, {});
    const auto f = gt::grid_fixture();
    const PairDetection prism =
        detect_prism(net, gt::no_traces(), f.pair, f.gap_a, f.gap_b, fixture_config(0.0));
    CHECK(prism.nodes.empty());
    CHECK(prism.report.bounded_nodes == 0);
    CHECK(prism.report.sp_runs == 0);
}

TEST_CASE("symmetric pair at K=10 halves the slicing operations") {
    const auto f = gt::grid_fixture();
    TrajectoryGap ga = f.gap_a;
    TrajectoryGap gb = f.gap_a;  // coincident geometry, different object
    gb.gap_id = 1;
    gb.object_id = 2;
    GapPair pair = f.pair;
    pair.ellipse_a = ga.ellipse();
    pair.ellipse_b = gb.ellipse();
    DetectorConfig cfg = fixture_config(0.0);
    cfg.slices = 10;
    const PairDetection tgard = detect_tgard(f.net, gt::no_traces(), pair, ga, gb, cfg);
    const PairDetection dc = detect_dc_tgard(f.net, gt::no_traces(), pair, ga, gb, cfg);
    CHECK(tgard.report.slices_processed == 11);
    CHECK(dc.report.slices_processed <= 6);  // ceil((K+1)/2)
    CHECK(node_set(dc) == node_set(tgard));
}

TEST_CASE("trace drift drives the reuse threshold end to end") {
    const auto f = gt::grid_fixture();
    // uniform 1 m/s reports until t=4, then 3 m/s: one weight jump mid-window
    HistoricTraces traces;
    for (double t = 2.0; t <= 6.0; t += 0.1) {
        traces.records.push_back({9, t, {0.0, 0.5}, t < 4.0 ? 1.0 : 3.0});
    }
    traces.build_index();

    DetectorConfig cfg = fixture_config(0.0);
    cfg.tau = 1e9;  // drift never crosses: reuse everywhere
    const PairDetection reuse_all = detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(reuse_all.report.sp_runs == 2);

    cfg.tau = 0.25;  // the jump at t=4 forces one recompute per gap
    const PairDetection tracked = detect_tgard(f.net, traces, f.pair, f.gap_a, f.gap_b, cfg);
    CHECK(tracked.report.sp_runs > 2);
    CHECK(tracked.report.sp_runs <= 6);
}

TEST_CASE("npe") {
    CHECK(npe(5000, 1000) == doctest::Approx(5.0));
    CHECK(npe(777, 777) == doctest::Approx(1.0));
    CHECK(std::isinf(npe(100, 0)));
}

TEST_CASE("score") {
    using K = PairNodeKey;
    const std::set<K> truth{{"0_1", 1}, {"0_1", 2}, {"2_3", 1}, {"2_3", 4}, {"4_5", 9}, {"4_5", 7}};
    SUBCASE("perfect prediction") {
        const Score s = score(truth, truth);
        CHECK(s.precision == doctest::Approx(1.0));
        CHECK(s.recall == doctest::Approx(1.0));
        CHECK(s.accuracy == doctest::Approx(1.0));
    }
    SUBCASE("no prediction") {
        const Score s = score({}, truth);
        CHECK(s.recall == doctest::Approx(0.0));
    }
    SUBCASE("three of four predicted, six true") {
        const std::set<K> predicted{{"0_1", 1}, {"0_1", 2}, {"2_3", 1}, {"9_9", 5}};
        const Score s = score(predicted, truth);
        CHECK(s.precision == doctest::Approx(0.75));
        CHECK(s.recall == doctest::Approx(0.5));
    }
    SUBCASE("both empty") {
        const Score s = score({}, {});
        CHECK(s.precision == doctest::Approx(1.0));
        CHECK(s.recall == doctest::Approx(1.0));
        CHECK(s.accuracy == doctest::Approx(1.0));
    }
}
