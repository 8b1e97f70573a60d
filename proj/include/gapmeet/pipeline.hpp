#pragma once

#include <string>
#include <vector>

#include "gapmeet/detect.hpp"

namespace gapmeet {

struct PipelineConfig {
    double theta_s = 1800.0;
    MsPolicy ms;
    DetectorConfig detector;
    DetectorKind kind = DetectorKind::kDcTgard;
    int jobs = 1;
};

// Canonical key of an object pair, "<min>_<max>".
std::string pair_key(long long obj_a, long long obj_b);

struct PairOutcome {
    GapPair pair;
    long long object_i = 0;  // object of pair.first_gap
    long long object_j = 0;
    PairDetection detection;
};

struct DetectionRun {
    std::vector<TrajectoryGap> gaps;
    int dropped_infeasible = 0;
    std::vector<PairOutcome> outcomes;  // ordered by pair_id
    DetectorReport totals;
    long study_nodes = 0;
    long bounded_total = 0;
    double npe_value = 0.0;

    // Keys are (object-pair key, original node id), matching truth labels.
    std::set<PairNodeKey> predicted_keys(const SpatialNetwork& net) const;
};

// Runs one detector over already-built gap pairs. Pairs are distributed over
// `jobs` threads and merged back in pair order.
std::vector<PairOutcome> run_pairs(const SpatialNetwork& net, const HistoricTraces& traces,
                                   const std::vector<TrajectoryGap>& gaps,
                                   const std::vector<GapPair>& pairs, DetectorKind kind,
                                   const DetectorConfig& cfg, int jobs);

// Full pipeline: gap extraction, pairing, detection, aggregation.
DetectionRun run_detection(const SpatialNetwork& net, const HistoricTraces& traces,
                           const std::vector<ObjectTrack>& tracks, const PipelineConfig& cfg);

}  // namespace gapmeet
