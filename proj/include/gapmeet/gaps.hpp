#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gapmeet/geometry.hpp"
#include "gapmeet/projection.hpp"

namespace gapmeet {

struct TrajectoryPoint {
    double t = 0.0;  // unix seconds
    Point location;
};

struct ObjectTrack {
    long long object_id = 0;
    std::vector<TrajectoryPoint> points;  // time-sorted
};

// A missing-signal interval bounded by known space-time anchors.
struct TrajectoryGap {
    int gap_id = 0;
    long long object_id = 0;
    Point start_anchor;
    Point end_anchor;
    double t_s = 0.0;
    double t_e = 0.0;
    double ms = 0.0;  // maximum speed, meters/second

    double duration() const { return t_e - t_s; }
    double budget() const { return duration() * ms; }
    GeoEllipse ellipse() const { return {start_anchor, end_anchor, budget()}; }
};

std::optional<Lens> lens_at(const TrajectoryGap& gap, double t);

// Two temporally and spatially overlapping gaps of distinct objects.
struct GapPair {
    int pair_id = 0;
    int first_gap = 0;   // gap_id, first_gap < second_gap
    int second_gap = 0;
    double overlap_start = 0.0;  // [t_s^R, t_e^R]
    double overlap_end = 0.0;
    GeoEllipse ellipse_a;  // intersection-region descriptor
    GeoEllipse ellipse_b;

    bool region_contains(const Point& p, double eps = kGeoEps) const {
        return ellipse_contains(ellipse_a, p, eps) && ellipse_contains(ellipse_b, p, eps);
    }
};

struct MsPolicy {
    enum Kind { kConstant, kPercentile };
    Kind kind = kConstant;
    double constant_mps = 30.0;
    double percentile = 95.0;  // of observed per-object speeds
};

struct GapExtraction {
    std::vector<TrajectoryGap> gaps;
    int dropped_infeasible = 0;
};

// One gap per consecutive point pair with dt >= theta. Gaps whose travel
// budget cannot cover the anchor distance are dropped and counted.
GapExtraction extract_gaps(const std::vector<ObjectTrack>& tracks, double theta_s,
                           const MsPolicy& policy);

// Plane-sweep pair generation: time ranges must overlap and the two
// geo-ellipses must intersect. Output ordered by (first_gap, second_gap).
std::vector<GapPair> pair_gaps(const std::vector<TrajectoryGap>& gaps,
                               int boundary_vertices = kDefaultBoundaryVertices);

// Loads `object_id,t_unix_s,x,y` rows grouped per object, sorted by object id.
std::vector<ObjectTrack> load_trajectories(const std::string& path,
                                           const EquirectProjection* proj = nullptr);

}  // namespace gapmeet
