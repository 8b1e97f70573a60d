#pragma once

#include <vector>

#include "gapmeet/gaps.hpp"
#include "gapmeet/network.hpp"

namespace gapmeet {

// Sub-network active at one time slice of a gap pair: the nodes inside the
// pair's ellipse-intersection region plus slice-local edge weights.
struct SubNetworkSample {
    int pair_id = 0;
    int slice_index = 0;
    double slice_time = 0.0;
    std::vector<int> node_ids;     // sorted dense node ids inside the region
    std::vector<int> arc_ids;      // arcs with both endpoints inside
    std::vector<double> arc_weights;  // seconds, parallel to arc_ids
};

// Network nodes inside the pair's ellipse-intersection region, sorted.
std::vector<int> region_nodes(const SpatialNetwork& net, const GapPair& pair);

// K+1 samples at uniform times over the pair's overlap range. The weight
// window of sample k is [t_k, t_{k+1}]; the last sample reuses the final
// window. Throws ConfigError when K < 2; empty region yields no samples.
std::vector<SubNetworkSample> build_samples(const SpatialNetwork& net,
                                            const HistoricTraces& traces, const GapPair& pair,
                                            int slice_count, const WeightParams& params = {});

// One sample whose weights cover the whole overlap window (space-time-prism
// baseline).
SubNetworkSample build_window_sample(const SpatialNetwork& net, const HistoricTraces& traces,
                                     const GapPair& pair, const WeightParams& params = {});

double weight_drift(const SubNetworkSample& prev, const SubNetworkSample& next);

// Lazily evaluated per-slice samples over a fixed node set; slices that are
// never requested never pay for weight evaluation. Values match
// build_samples exactly.
class SliceWeights {
  public:
    SliceWeights(const SpatialNetwork& net, const HistoricTraces& traces, const GapPair& pair,
                 int slice_count, const WeightParams& params);

    int slice_count() const { return slice_count_; }
    bool empty() const { return node_ids_.empty(); }
    const std::vector<int>& node_ids() const { return node_ids_; }
    double slice_time(int k) const;
    const SubNetworkSample& sample(int k);

  private:
    const SpatialNetwork& net_;
    const HistoricTraces& traces_;
    const GapPair& pair_;
    int slice_count_;
    WeightParams params_;
    std::vector<int> node_ids_;
    std::vector<int> arc_ids_;
    std::vector<SubNetworkSample> cache_;
    std::vector<bool> ready_;
};

}  // namespace gapmeet
