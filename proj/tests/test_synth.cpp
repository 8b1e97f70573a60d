#include <fstream>
#include <queue>
#include <sstream>

#include "doctest.h"

#include "gapmeet/csv.hpp"
#include "gapmeet/synth.hpp"
#include "helpers.hpp"

using namespace gapmeet;
namespace gt = gapmeet::testing;

namespace {

ScenarioConfig small_scenario(unsigned long long seed, double rate) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.node_count = 225;
    cfg.extent_m = 3000.0;
    cfg.object_count = 10;
    cfg.emp_min_s = 5400.0;
    cfg.emp_max_s = 7200.0;
    cfg.injection_rate = rate;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("generation is byte-identical per seed") {
    const auto dir_a = gt::temp_dir("synth");
    const auto dir_b = gt::temp_dir("synth");
    const ScenarioConfig cfg = small_scenario(7, 0.5);
    generate(cfg, dir_a);
    generate(cfg, dir_b);
    for (const char* name :
         {"nodes.csv", "edges.csv", "trajectories.csv", "traces.csv", "truth.csv",
          "scenario.json"}) {
        CHECK(slurp((dir_a / name).string()) == slurp((dir_b / name).string()));
    }
    // a different seed changes the data
    const auto dir_c = gt::temp_dir("synth");
    generate(small_scenario(8, 0.5), dir_c);
    CHECK(slurp((dir_a / "trajectories.csv").string()) !=
          slurp((dir_c / "trajectories.csv").string()));
}

TEST_CASE("injection rate zero stages no positive labels") {
    const auto dir = gt::temp_dir("synth");
    const Dataset ds = generate(small_scenario(3, 0.0), dir);
    CHECK(ds.positive_pairs == 0);
    CHECK(ds.negative_pairs == 5);
    const LoadedDataset loaded = load_dataset(dir);
    CHECK(loaded.truth_positive.empty());
    CHECK(loaded.truth_negative.size() == 5);
}

TEST_CASE("generated networks are connected") {
    for (NetworkKind kind : {NetworkKind::kGrid, NetworkKind::kRandomPlanar}) {
        const auto dir = gt::temp_dir("synth");
        ScenarioConfig cfg = small_scenario(11, 0.5);
        cfg.kind = kind;
        cfg.node_count = 120;
        generate(cfg, dir);
        const LoadedDataset ds = load_dataset(dir);
        std::vector<char> seen(ds.net.node_count(), 0);
        std::queue<int> frontier;
        frontier.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            for (int arc : ds.net.out_arcs[u]) {
                const int v = ds.net.edges[arc].to;
                if (!seen[v]) {
                    seen[v] = 1;
                    ++reached;
                    frontier.push(v);
                }
            }
        }
        CHECK(reached == ds.net.node_count());
    }
}

TEST_CASE("trajectories respect the scenario maximum speed") {
    const auto dir = gt::temp_dir("synth");
    const Dataset ds = generate(small_scenario(13, 1.0), dir);
    const LoadedDataset loaded = load_dataset(dir);
    for (const ObjectTrack& track : loaded.tracks) {
        for (size_t i = 1; i < track.points.size(); ++i) {
            const double dt = track.points[i].t - track.points[i - 1].t;
            const double dd = dist(track.points[i].location, track.points[i - 1].location);
            if (dt <= 0.0) continue;
            CHECK(dd / dt <= ds.ms_mps + 1e-9);
        }
    }
}

TEST_CASE("staged positives are always detected by the prism baseline") {
    const auto dir = gt::temp_dir("synth");
    generate(small_scenario(17, 1.0), dir);
    const LoadedDataset ds = load_dataset(dir);
    REQUIRE(ds.truth_positive.size() == 5);

    // independent feasibility replay: every labeled meet node must be inside
    // both gap ellipses of its pair
    PipelineConfig cfg = ds.pipeline();
    const GapExtraction extraction = extract_gaps(ds.tracks, cfg.theta_s, cfg.ms);
    CHECK(extraction.gaps.size() == 10);
    const auto pairs = pair_gaps(extraction.gaps);
    CHECK(pairs.size() == 5);
    std::unordered_map<int, const TrajectoryGap*> by_id;
    for (const auto& g : extraction.gaps) by_id[g.gap_id] = &g;
    for (const GapPair& p : pairs) {
        const TrajectoryGap& gi = *by_id.at(p.first_gap);
        const TrajectoryGap& gj = *by_id.at(p.second_gap);
        const auto key = pair_key(gi.object_id, gj.object_id);
        for (const auto& [tk, tn] : ds.truth_positive) {
            if (tk != key) continue;
            const Point meet = ds.net.nodes[tn].location;
            CHECK(p.region_contains(meet));
        }
    }

    cfg.kind = DetectorKind::kPrism;
    const DetectionRun run = run_detection(ds.net, ds.traces, ds.tracks, cfg);
    const Score s = score(run.predicted_keys(ds.net), ds.truth_positive);
    CHECK(s.recall == doctest::Approx(1.0));
}

TEST_CASE("negative pairs stay undetected by every detector") {
    const auto dir = gt::temp_dir("synth");
    generate(small_scenario(19, 0.0), dir);
    const LoadedDataset ds = load_dataset(dir);
    for (DetectorKind kind :
         {DetectorKind::kPrism, DetectorKind::kTgard, DetectorKind::kDcTgard}) {
        PipelineConfig cfg = ds.pipeline();
        cfg.kind = kind;
        const DetectionRun run = run_detection(ds.net, ds.traces, ds.tracks, cfg);
        CHECK(run.predicted_keys(ds.net).empty());
    }
}

TEST_CASE("dual convergence matches the full walk on generated scenarios") {
    for (unsigned long long seed : {21ULL, 22ULL, 23ULL}) {
        const auto dir = gt::temp_dir("synth");
        generate(small_scenario(seed, 0.7), dir);
        const LoadedDataset ds = load_dataset(dir);
        PipelineConfig cfg = ds.pipeline();
        cfg.kind = DetectorKind::kTgard;
        const DetectionRun tgard = run_detection(ds.net, ds.traces, ds.tracks, cfg);
        cfg.kind = DetectorKind::kDcTgard;
        const DetectionRun dc = run_detection(ds.net, ds.traces, ds.tracks, cfg);
        CHECK(tgard.predicted_keys(ds.net) == dc.predicted_keys(ds.net));
        CHECK(dc.totals.slices_processed <= tgard.totals.slices_processed);
    }
}

TEST_CASE("matrix trends along the TO and speed axes") {
    ScenarioConfig base = small_scenario(29, 0.8);
    base.emp_min_s = 9000.0;
    base.emp_max_s = 10800.0;
    const auto work = gt::temp_dir("matrix");

    SUBCASE("rendezvous count never grows with TO") {
        const auto rows = run_matrix(base, Axis::kTo, {1200, 2400, 3600}, work);
        REQUIRE(rows.size() == 3);
        for (size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].rendezvous_dc <= rows[i - 1].rendezvous_dc);
            CHECK(rows[i].rendezvous_prism <= rows[i - 1].rendezvous_prism);
        }
    }
    SUBCASE("prism candidates never shrink with speed") {
        const auto rows = run_matrix(base, Axis::kSpeed, {18, 24, 32}, work);
        REQUIRE(rows.size() == 3);
        for (size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].bounded_prism >= rows[i - 1].bounded_prism);
        }
    }
    SUBCASE("dual convergence NPE dominates prism NPE everywhere") {
        const auto rows = run_matrix(base, Axis::kObjects, {6, 10}, work);
        for (const MatrixRow& r : rows) {
            CHECK(r.npe_dc >= r.npe_prism);
            CHECK(r.dc_equals_tgard);
        }
    }
}

TEST_CASE("parallel pair workers match the single-threaded run") {
    const auto dir = gt::temp_dir("synth");
    generate(small_scenario(31, 0.8), dir);
    const LoadedDataset ds = load_dataset(dir);
    PipelineConfig cfg = ds.pipeline();
    const GapExtraction extraction = extract_gaps(ds.tracks, cfg.theta_s, cfg.ms);
    const auto pairs = pair_gaps(extraction.gaps);
    const auto solo = run_pairs(ds.net, ds.traces, extraction.gaps, pairs,
                                DetectorKind::kDcTgard, cfg.detector, 1);
    const auto threaded = run_pairs(ds.net, ds.traces, extraction.gaps, pairs,
                                    DetectorKind::kDcTgard, cfg.detector, 2);
    REQUIRE(solo.size() == threaded.size());
    for (size_t i = 0; i < solo.size(); ++i) {
        CHECK(solo[i].pair.pair_id == threaded[i].pair.pair_id);
        REQUIRE(solo[i].detection.nodes.size() == threaded[i].detection.nodes.size());
        for (size_t n = 0; n < solo[i].detection.nodes.size(); ++n) {
            CHECK(solo[i].detection.nodes[n].node_id == threaded[i].detection.nodes[n].node_id);
        }
        CHECK(solo[i].detection.report.slices_processed ==
              threaded[i].detection.report.slices_processed);
    }
}

TEST_CASE("infeasible configurations are rejected") {
    ScenarioConfig cfg = small_scenario(1, 0.5);
    SUBCASE("dwell larger than the gaps") {
        cfg.to_s = 10000.0;
        CHECK_THROWS_AS(generate(cfg, gt::temp_dir("synth")), ConfigError);
    }
    SUBCASE("max speed below travel speed") {
        cfg.ms_min = 10.0;
        cfg.ms_max = 12.0;
        CHECK_THROWS_AS(generate(cfg, gt::temp_dir("synth")), ConfigError);
    }
    SUBCASE("theta above the emp range") {
        cfg.theta_s = 6000.0;
        CHECK_THROWS_AS(generate(cfg, gt::temp_dir("synth")), ConfigError);
    }
}
