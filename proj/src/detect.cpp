#include "gapmeet/detect.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "gapmeet/csv.hpp"

namespace gapmeet {

const char* detector_name(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::kPrism: return "prism";
        case DetectorKind::kTgard: return "tgard";
        case DetectorKind::kDcTgard: return "dc-tgard";
    }
    return "?";
}

void DetectorReport::merge(const DetectorReport& other) {
    slices_processed += other.slices_processed;
    lens_tests += other.lens_tests;
    sp_runs += other.sp_runs;
    reuse_hits += other.reuse_hits;
    bounded_nodes += other.bounded_nodes;
    wall_ms += other.wall_ms;
    diagnostics.insert(diagnostics.end(), other.diagnostics.begin(), other.diagnostics.end());
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Per-node membership in the two gaps' lenses, driven by the four anchor
// distances. Matches lens_contains bit for bit: a node is covered at t iff it
// lies in both lenses of the pair at t.
struct PairCoverage {
    const TrajectoryGap* ga;
    const TrajectoryGap* gb;
    std::vector<std::array<double, 4>> anchor_dist;  // dS_a, dE_a, dS_b, dE_b

    PairCoverage(const SpatialNetwork& net, const std::vector<int>& node_ids,
                 const TrajectoryGap& gap_a, const TrajectoryGap& gap_b)
        : ga(&gap_a), gb(&gap_b) {
        anchor_dist.reserve(node_ids.size());
        for (int id : node_ids) {
            const Point& p = net.nodes[id].location;
            anchor_dist.push_back({dist(p, gap_a.start_anchor), dist(p, gap_a.end_anchor),
                                   dist(p, gap_b.start_anchor), dist(p, gap_b.end_anchor)});
        }
    }

    bool covered(size_t idx, double t) const {
        const auto& d = anchor_dist[idx];
        return d[0] <= (t - ga->t_s) * ga->ms + kGeoEps &&
               d[1] <= (ga->t_e - t) * ga->ms + kGeoEps &&
               d[2] <= (t - gb->t_s) * gb->ms + kGeoEps &&
               d[3] <= (gb->t_e - t) * gb->ms + kGeoEps;
    }
};

struct SliceSpan {
    int first = -1;  // first grid slice where the node is covered, -1 if never
    int last = -1;
};

std::vector<SliceSpan> coverage_spans(const PairCoverage& cov, const SliceWeights& slices) {
    std::vector<SliceSpan> spans(cov.anchor_dist.size());
    for (size_t i = 0; i < spans.size(); ++i) {
        for (int k = 0; k <= slices.slice_count(); ++k) {
            if (!cov.covered(i, slices.slice_time(k))) continue;
            if (spans[i].first < 0) spans[i].first = k;
            spans[i].last = k;
        }
    }
    return spans;
}

AvailabilityInterval interval_overlap(const AvailabilityInterval& a,
                                      const AvailabilityInterval& b) {
    return {std::max(a.ea, b.ea), std::min(a.ld, b.ld)};
}

// Admits covered candidate nodes whose availability overlap reaches TO.
void evaluate_candidates(std::map<int, RendezvousNode>& result, const std::vector<int>& node_ids,
                         const PairCoverage& cov, int slice, double t,
                         const ReachProfile& prof_i, const ReachProfile& prof_j, int pair_id,
                         double to_s) {
    for (size_t i = 0; i < node_ids.size(); ++i) {
        const int node = node_ids[i];
        if (result.count(node)) continue;
        if (!cov.covered(i, t)) continue;
        const AvailabilityInterval* ai = prof_i.interval(node);
        const AvailabilityInterval* aj = prof_j.interval(node);
        if (!ai || !aj) continue;
        const AvailabilityInterval both = interval_overlap(*ai, *aj);
        if (both.length() >= to_s) {
            RendezvousNode rn;
            rn.node_id = node;
            rn.pair_id = pair_id;
            rn.alpha_i = *ai;
            rn.alpha_j = *aj;
            rn.overlap = both;
            rn.qualifying_slices = {slice};
            result.emplace(node, std::move(rn));
        }
    }
}

std::vector<RendezvousNode> result_list(std::map<int, RendezvousNode>& result) {
    std::vector<RendezvousNode> out;
    out.reserve(result.size());
    for (auto& [node, rn] : result) out.push_back(std::move(rn));
    return out;
}

Region as_region(const Lens& l) {
    return Region{l};
}

// Refresh chain for one gap across the visited slices.
class ProfileChain {
  public:
    ProfileChain(const SpatialNetwork& net, const TrajectoryGap& gap, const DetectorConfig& cfg,
                 DetectorReport& report)
        : net_(net), gap_(gap), cfg_(cfg), report_(report) {}

    const ReachProfile& advance(const SubNetworkSample& sample) {
        if (!init_) {
            profile_ = availability(sample, net_, gap_, cfg_.anchor_snap_m);
            ++report_.sp_runs;
            init_ = true;
        } else {
            RefreshStats stats;
            profile_ = refresh_profile(profile_, sample, net_, gap_, cfg_.tau, cfg_.anchor_snap_m,
                                       &stats);
            report_.sp_runs += stats.recomputes;
            report_.reuse_hits += stats.reuses;
        }
        return profile_;
    }

  private:
    const SpatialNetwork& net_;
    const TrajectoryGap& gap_;
    const DetectorConfig& cfg_;
    DetectorReport& report_;
    ReachProfile profile_;
    bool init_ = false;
};

}  // namespace

std::vector<RendezvousNode> prism_rendezvous(const GapPair& pair, const SubNetworkSample& sample,
                                             const ReachProfile& prof_i,
                                             const ReachProfile& prof_j, double to_s) {
    std::vector<RendezvousNode> out;
    for (int node : sample.node_ids) {
        const AvailabilityInterval* ai = prof_i.interval(node);
        const AvailabilityInterval* aj = prof_j.interval(node);
        if (!ai || !aj) continue;
        const AvailabilityInterval both = interval_overlap(*ai, *aj);
        if (both.length() >= to_s) {
            RendezvousNode rn;
            rn.node_id = node;
            rn.pair_id = pair.pair_id;
            rn.alpha_i = *ai;
            rn.alpha_j = *aj;
            rn.overlap = both;
            out.push_back(std::move(rn));
        }
    }
    return out;
}

PairDetection detect_prism(const SpatialNetwork& net, const HistoricTraces& traces,
                           const GapPair& pair, const TrajectoryGap& gap_i,
                           const TrajectoryGap& gap_j, const DetectorConfig& cfg) {
    const auto start = Clock::now();
    PairDetection out;
    const SubNetworkSample sample = build_window_sample(net, traces, pair, cfg.weights);
    out.report.bounded_nodes = static_cast<long>(sample.node_ids.size());
    if (sample.node_ids.empty()) {
        out.report.wall_ms = elapsed_ms(start);
        return out;
    }
    out.report.slices_processed = 1;
    try {
        const ReachProfile prof_i = availability(sample, net, gap_i, cfg.anchor_snap_m);
        const ReachProfile prof_j = availability(sample, net, gap_j, cfg.anchor_snap_m);
        out.report.sp_runs = 2;
        out.nodes = prism_rendezvous(pair, sample, prof_i, prof_j, cfg.to_s);
    } catch (const SnapError& e) {
        out.report.diagnostics.push_back("pair " + std::to_string(pair.pair_id) + ": " + e.what());
    }
    out.report.wall_ms = elapsed_ms(start);
    return out;
}

PairDetection detect_tgard(const SpatialNetwork& net, const HistoricTraces& traces,
                           const GapPair& pair, const TrajectoryGap& gap_i,
                           const TrajectoryGap& gap_j, const DetectorConfig& cfg) {
    const auto start = Clock::now();
    PairDetection out;
    SliceWeights slices(net, traces, pair, cfg.slices, cfg.weights);
    if (slices.empty()) {
        out.report.wall_ms = elapsed_ms(start);
        return out;
    }
    const std::vector<int>& node_ids = slices.node_ids();
    const PairCoverage cov(net, node_ids, gap_i, gap_j);

    std::vector<char> seen(node_ids.size(), 0);
    std::map<int, RendezvousNode> result;
    ProfileChain chain_i(net, gap_i, cfg, out.report);
    ProfileChain chain_j(net, gap_j, cfg, out.report);

    for (int k = 0; k <= cfg.slices; ++k) {
        ++out.report.slices_processed;
        const double t = slices.slice_time(k);
        const auto lens_i = lens_at(gap_i, t);
        const auto lens_j = lens_at(gap_j, t);
        ++out.report.lens_tests;
        bool lenses_meet =
            lens_i && lens_j &&
            regions_intersect(as_region(*lens_i), as_region(*lens_j), cfg.boundary_vertices);
        for (size_t i = 0; i < node_ids.size(); ++i) {
            if (!cov.covered(i, t)) continue;
            lenses_meet = true;  // a covered node is an exact witness point
            if (!seen[i]) {
                seen[i] = 1;
                ++out.report.bounded_nodes;
            }
        }
        const SubNetworkSample& sample = slices.sample(k);
        try {
            const ReachProfile& prof_i = chain_i.advance(sample);
            const ReachProfile& prof_j = chain_j.advance(sample);
            if (lenses_meet) {
                evaluate_candidates(result, node_ids, cov, k, t, prof_i, prof_j, pair.pair_id,
                                    cfg.to_s);
            }
        } catch (const SnapError& e) {
            out.report.diagnostics.push_back("pair " + std::to_string(pair.pair_id) + ": " +
                                             e.what());
            out.report.wall_ms = elapsed_ms(start);
            return out;
        }
    }
    out.nodes = result_list(result);
    out.report.wall_ms = elapsed_ms(start);
    return out;
}

PairDetection detect_dc_tgard(const SpatialNetwork& net, const HistoricTraces& traces,
                              const GapPair& pair, const TrajectoryGap& gap_i,
                              const TrajectoryGap& gap_j, const DetectorConfig& cfg) {
    const auto start = Clock::now();
    PairDetection out;
    SliceWeights slices(net, traces, pair, cfg.slices, cfg.weights);
    if (slices.empty()) {
        out.report.wall_ms = elapsed_ms(start);
        return out;
    }
    const std::vector<int>& node_ids = slices.node_ids();
    const PairCoverage cov(net, node_ids, gap_i, gap_j);
    const std::vector<SliceSpan> spans = coverage_spans(cov, slices);
    for (const SliceSpan& s : spans) {
        if (s.first >= 0) ++out.report.bounded_nodes;
    }

    std::map<int, RendezvousNode> result;
    ProfileChain chain_i(net, gap_i, cfg, out.report);
    ProfileChain chain_j(net, gap_j, cfg, out.report);

    const int K = cfg.slices;
    double max_overlap = -std::numeric_limits<double>::infinity();

    auto process_slice = [&](int k) -> double {
        const double t = slices.slice_time(k);
        const auto lens_i = lens_at(gap_i, t);
        const auto lens_j = lens_at(gap_j, t);
        ++out.report.lens_tests;
        double area = 0.0;
        if (lens_i && lens_j) {
            area = region_intersection_area(as_region(*lens_i), as_region(*lens_j),
                                            cfg.boundary_vertices);
        }
        const SubNetworkSample& sample = slices.sample(k);
        const ReachProfile& prof_i = chain_i.advance(sample);
        const ReachProfile& prof_j = chain_j.advance(sample);
        evaluate_candidates(result, node_ids, cov, k, t, prof_i, prof_j, pair.pair_id, cfg.to_s);
        return area;
    };

    // The early stop may only fire when every covered node has already been
    // reachable from a processed slice; otherwise exact agreement with the
    // full slice walk could be lost.
    auto middle_fully_seen = [&](int s) {
        for (const SliceSpan& span : spans) {
            if (span.first > s && span.last < K - s) return false;
        }
        return true;
    };

    try {
        for (int s = 0; s <= K - s; ++s) {
            ++out.report.slices_processed;  // one dual-frontier operation
            double step_area = process_slice(s);
            if (K - s != s) step_area = std::max(step_area, process_slice(K - s));
            if (step_area <= max_overlap && middle_fully_seen(s)) break;
            max_overlap = std::max(max_overlap, step_area);
        }
    } catch (const SnapError& e) {
        out.report.diagnostics.push_back("pair " + std::to_string(pair.pair_id) + ": " + e.what());
        out.report.wall_ms = elapsed_ms(start);
        return out;
    }
    out.nodes = result_list(result);
    out.report.wall_ms = elapsed_ms(start);
    return out;
}

double npe(long total_study_nodes, long bounded_nodes) {
    if (bounded_nodes <= 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(total_study_nodes) / static_cast<double>(bounded_nodes);
}

Score score(const std::set<PairNodeKey>& predicted, const std::set<PairNodeKey>& truth) {
    Score s;
    for (const PairNodeKey& k : predicted) {
        if (truth.count(k)) {
            ++s.tp;
        } else {
            ++s.fp;
        }
    }
    for (const PairNodeKey& k : truth) {
        if (!predicted.count(k)) ++s.fn;
    }
    s.precision = predicted.empty() ? 1.0 : static_cast<double>(s.tp) / predicted.size();
    s.recall = truth.empty() ? 1.0 : static_cast<double>(s.tp) / truth.size();
    const long universe = s.tp + s.fp + s.fn;
    s.accuracy = universe == 0 ? 1.0 : static_cast<double>(s.tp) / universe;
    return s;
}

}  // namespace gapmeet
