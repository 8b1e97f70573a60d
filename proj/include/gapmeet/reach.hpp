#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gapmeet/gaps.hpp"
#include "gapmeet/subnet.hpp"

namespace gapmeet {

// Default radius for snapping gap anchors to sample nodes.
inline constexpr double kDefaultAnchorSnapM = 50.0;

// Time window during which an object could have been present at a node.
struct AvailabilityInterval {
    double ea = 0.0;  // earliest arrival, seconds
    double ld = 0.0;  // latest departure, seconds

    bool nonempty() const { return ea <= ld; }
    double length() const { return ld - ea; }
};

// A gap anchor that does not snap to any sample node.
class SnapError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Per-node availability intervals of one gap on one slice. Keeps the slice's
// weight snapshot so drift against the next slice can be evaluated.
struct ReachProfile {
    int gap_id = 0;
    int slice_index = 0;
    int source_node = -1;  // snapped start anchor
    int sink_node = -1;    // snapped end anchor
    std::unordered_map<int, AvailabilityInterval> alpha;  // only nonempty intervals
    std::vector<double> slice_weights;

    const AvailabilityInterval* interval(int node) const {
        auto it = alpha.find(node);
        return it == alpha.end() ? nullptr : &it->second;
    }
};

// Arrival times t_s + shortest-path travel from the source over the sample's
// arcs. Unreachable nodes are absent.
std::unordered_map<int, double> earliest_arrival(const SubNetworkSample& sample,
                                                 const SpatialNetwork& net, int source_node,
                                                 double t_s);

// Departure times t_e - shortest-path travel to the sink over the reversed
// sample arcs.
std::unordered_map<int, double> latest_departure(const SubNetworkSample& sample,
                                                 const SpatialNetwork& net, int sink_node,
                                                 double t_e);

// Nearest sample node within `radius` of p, or -1.
int snap_to_sample(const SubNetworkSample& sample, const SpatialNetwork& net, const Point& p,
                   double radius);

// Full availability profile of a gap on a sample. Throws SnapError when an
// anchor has no sample node within `anchor_snap_m`.
ReachProfile availability(const SubNetworkSample& sample, const SpatialNetwork& net,
                          const TrajectoryGap& gap, double anchor_snap_m = kDefaultAnchorSnapM);

struct RefreshStats {
    long recomputes = 0;
    long reuses = 0;
};

// Shortest-path reuse across slices: when the weight drift from the profile's
// slice to `next` stays below tau the profile is relabeled, otherwise it is
// recomputed from scratch on `next`.
ReachProfile refresh_profile(const ReachProfile& prev, const SubNetworkSample& next,
                             const SpatialNetwork& net, const TrajectoryGap& gap, double tau,
                             double anchor_snap_m = kDefaultAnchorSnapM,
                             RefreshStats* stats = nullptr);

}  // namespace gapmeet
