#include "gapmeet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_map>

namespace gapmeet {

std::string pair_key(long long obj_a, long long obj_b) {
    if (obj_a > obj_b) std::swap(obj_a, obj_b);
    return std::to_string(obj_a) + "_" + std::to_string(obj_b);
}

std::set<PairNodeKey> DetectionRun::predicted_keys(const SpatialNetwork& net) const {
    std::set<PairNodeKey> keys;
    for (const PairOutcome& o : outcomes) {
        const std::string key = pair_key(o.object_i, o.object_j);
        for (const RendezvousNode& rn : o.detection.nodes) {
            keys.insert({key, static_cast<int>(net.nodes[rn.node_id].original_id)});
        }
    }
    return keys;
}

std::vector<PairOutcome> run_pairs(const SpatialNetwork& net, const HistoricTraces& traces,
                                   const std::vector<TrajectoryGap>& gaps,
                                   const std::vector<GapPair>& pairs, DetectorKind kind,
                                   const DetectorConfig& cfg, int jobs) {
    std::unordered_map<int, const TrajectoryGap*> by_id;
    for (const TrajectoryGap& g : gaps) by_id[g.gap_id] = &g;

    std::vector<PairOutcome> outcomes(pairs.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= pairs.size()) break;
            const GapPair& pair = pairs[i];
            const TrajectoryGap& gi = *by_id.at(pair.first_gap);
            const TrajectoryGap& gj = *by_id.at(pair.second_gap);
            PairOutcome& out = outcomes[i];
            out.pair = pair;
            out.object_i = gi.object_id;
            out.object_j = gj.object_id;
            switch (kind) {
                case DetectorKind::kPrism:
                    out.detection = detect_prism(net, traces, pair, gi, gj, cfg);
                    break;
                case DetectorKind::kTgard:
                    out.detection = detect_tgard(net, traces, pair, gi, gj, cfg);
                    break;
                case DetectorKind::kDcTgard:
                    out.detection = detect_dc_tgard(net, traces, pair, gi, gj, cfg);
                    break;
            }
        }
    };

    const int n_threads = std::max(1, jobs);
    if (n_threads == 1 || pairs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    return outcomes;
}

DetectionRun run_detection(const SpatialNetwork& net, const HistoricTraces& traces,
                           const std::vector<ObjectTrack>& tracks, const PipelineConfig& cfg) {
    DetectionRun run;
    GapExtraction extraction = extract_gaps(tracks, cfg.theta_s, cfg.ms);
    run.gaps = std::move(extraction.gaps);
    run.dropped_infeasible = extraction.dropped_infeasible;
    const std::vector<GapPair> pairs = pair_gaps(run.gaps, cfg.detector.boundary_vertices);
    run.outcomes = run_pairs(net, traces, run.gaps, pairs, cfg.kind, cfg.detector, cfg.jobs);
    run.study_nodes = net.node_count();
    for (const PairOutcome& o : run.outcomes) {
        run.totals.merge(o.detection.report);
        run.bounded_total += o.detection.report.bounded_nodes;
    }
    run.npe_value = run.outcomes.empty()
                        ? 1.0
                        : npe(run.study_nodes * static_cast<long>(run.outcomes.size()),
                              run.bounded_total);
    return run;
}

}  // namespace gapmeet
