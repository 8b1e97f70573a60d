#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gapmeet/reach.hpp"

namespace gapmeet {

struct DetectorConfig {
    int slices = 16;   // K; samples are K+1 inclusive of both endpoints
    double tau = 0.25; // weight-drift threshold for shortest-path reuse
    double to_s = 1800.0;  // minimum availability overlap, seconds
    double anchor_snap_m = kDefaultAnchorSnapM;
    int boundary_vertices = kDefaultBoundaryVertices;
    WeightParams weights;
};

enum class DetectorKind { kPrism, kTgard, kDcTgard };

const char* detector_name(DetectorKind kind);

// A node where both objects' availability intervals overlap long enough.
struct RendezvousNode {
    int node_id = 0;
    int pair_id = 0;
    AvailabilityInterval alpha_i;
    AvailabilityInterval alpha_j;
    AvailabilityInterval overlap;
    std::vector<int> qualifying_slices;  // empty for the prism baseline
};

struct DetectorReport {
    long slices_processed = 0;  // DC-TGARD counts dual-frontier operations
    long lens_tests = 0;
    long sp_runs = 0;     // availability computations (one forward+backward pass)
    long reuse_hits = 0;
    long bounded_nodes = 0;  // nodes inside the detector's spatial bound
    double wall_ms = 0.0;
    std::vector<std::string> diagnostics;

    void merge(const DetectorReport& other);
};

struct PairDetection {
    std::vector<RendezvousNode> nodes;  // sorted by node_id
    DetectorReport report;
};

// Space-time-prism baseline: candidates are all nodes in the
// ellipse-intersection region; availability is evaluated once on the full
// overlap window.
std::vector<RendezvousNode> prism_rendezvous(const GapPair& pair, const SubNetworkSample& sample,
                                             const ReachProfile& prof_i,
                                             const ReachProfile& prof_j, double to_s);

PairDetection detect_prism(const SpatialNetwork& net, const HistoricTraces& traces,
                           const GapPair& pair, const TrajectoryGap& gap_i,
                           const TrajectoryGap& gap_j, const DetectorConfig& cfg);

// Time-slicing detector: walks slices 0..K in order, gathers nodes inside the
// per-slice lens intersection, and reuses shortest-path profiles while the
// weight drift stays below tau.
PairDetection detect_tgard(const SpatialNetwork& net, const HistoricTraces& traces,
                           const GapPair& pair, const TrajectoryGap& gap_i,
                           const TrajectoryGap& gap_j, const DetectorConfig& cfg);

// Dual-convergence variant: processes slice pairs (k, K-k) from both ends,
// tracks the largest lens-intersection area seen, and stops early once the
// area stops increasing and no unvisited slice can contribute a new node.
PairDetection detect_dc_tgard(const SpatialNetwork& net, const HistoricTraces& traces,
                              const GapPair& pair, const TrajectoryGap& gap_i,
                              const TrajectoryGap& gap_j, const DetectorConfig& cfg);

// Node pruning efficiency: study-area nodes over bounded-region nodes.
// Returns infinity when the bound is empty.
double npe(long total_study_nodes, long bounded_nodes);

using PairNodeKey = std::pair<std::string, int>;  // (pair key, node id)

struct Score {
    double precision = 1.0;
    double recall = 1.0;
    double accuracy = 1.0;
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

// Confusion-matrix ratios over (pair, node) decisions. Accuracy is computed
// over the union of predicted and true decisions.
Score score(const std::set<PairNodeKey>& predicted, const std::set<PairNodeKey>& truth);

}  // namespace gapmeet
