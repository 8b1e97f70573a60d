#include "gapmeet/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gapmeet/csv.hpp"

namespace gapmeet {

std::optional<Lens> lens_at(const TrajectoryGap& gap, double t) {
    return lens_at(gap.start_anchor, gap.end_anchor, gap.t_s, gap.t_e, gap.ms, t);
}

namespace {

double speed_percentile(std::vector<double> speeds, double pct) {
    if (speeds.empty()) return 0.0;
    std::sort(speeds.begin(), speeds.end());
    const double rank = pct / 100.0 * (speeds.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(rank));
    const size_t hi = std::min(lo + 1, speeds.size() - 1);
    const double frac = rank - lo;
    return speeds[lo] * (1.0 - frac) + speeds[hi] * frac;
}

}  // namespace

GapExtraction extract_gaps(const std::vector<ObjectTrack>& tracks, double theta_s,
                           const MsPolicy& policy) {
    GapExtraction out;
    int next_id = 0;
    for (const ObjectTrack& track : tracks) {
        for (size_t i = 1; i < track.points.size(); ++i) {
            if (track.points[i].t < track.points[i - 1].t) {
                throw IngestionError("trajectory of object " + std::to_string(track.object_id) +
                                     " is not time-sorted");
            }
        }
        double ms = policy.constant_mps;
        if (policy.kind == MsPolicy::kPercentile) {
            std::vector<double> speeds;
            for (size_t i = 1; i < track.points.size(); ++i) {
                const double dt = track.points[i].t - track.points[i - 1].t;
                if (dt <= 0.0) continue;
                speeds.push_back(dist(track.points[i].location, track.points[i - 1].location) / dt);
            }
            const double p = speed_percentile(speeds, policy.percentile);
            ms = p > 0.0 ? p : policy.constant_mps;
        }
        for (size_t i = 1; i < track.points.size(); ++i) {
            const TrajectoryPoint& a = track.points[i - 1];
            const TrajectoryPoint& b = track.points[i];
            if (b.t - a.t < theta_s) continue;
            TrajectoryGap gap;
            gap.object_id = track.object_id;
            gap.start_anchor = a.location;
            gap.end_anchor = b.location;
            gap.t_s = a.t;
            gap.t_e = b.t;
            gap.ms = ms;
            if (gap.budget() + kGeoEps < dist(gap.start_anchor, gap.end_anchor)) {
                ++out.dropped_infeasible;
                continue;
            }
            gap.gap_id = next_id++;
            out.gaps.push_back(gap);
        }
    }
    return out;
}

std::vector<GapPair> pair_gaps(const std::vector<TrajectoryGap>& gaps, int boundary_vertices) {
    std::vector<int> order(gaps.size());
    for (size_t i = 0; i < gaps.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (gaps[a].t_s != gaps[b].t_s) return gaps[a].t_s < gaps[b].t_s;
        return gaps[a].gap_id < gaps[b].gap_id;
    });

    std::vector<GapPair> pairs;
    std::vector<int> observed;  // indices into `gaps`, still temporally active
    for (int idx : order) {
        const TrajectoryGap& g = gaps[idx];
        std::erase_if(observed, [&](int o) { return gaps[o].t_e < g.t_s; });
        for (int o : observed) {
            const TrajectoryGap& h = gaps[o];
            if (h.object_id == g.object_id) continue;
            const double lo = std::max(g.t_s, h.t_s);
            const double hi = std::min(g.t_e, h.t_e);
            if (lo > hi) continue;
            if (!regions_intersect(g.ellipse(), h.ellipse(), boundary_vertices)) continue;
            GapPair p;
            p.first_gap = std::min(g.gap_id, h.gap_id);
            p.second_gap = std::max(g.gap_id, h.gap_id);
            p.overlap_start = lo;
            p.overlap_end = hi;
            const TrajectoryGap& first = p.first_gap == g.gap_id ? g : h;
            const TrajectoryGap& second = p.first_gap == g.gap_id ? h : g;
            p.ellipse_a = first.ellipse();
            p.ellipse_b = second.ellipse();
            pairs.push_back(p);
        }
        observed.push_back(idx);
    }
    std::sort(pairs.begin(), pairs.end(), [](const GapPair& a, const GapPair& b) {
        if (a.first_gap != b.first_gap) return a.first_gap < b.first_gap;
        return a.second_gap < b.second_gap;
    });
    for (size_t i = 0; i < pairs.size(); ++i) pairs[i].pair_id = static_cast<int>(i);
    return pairs;
}

std::vector<ObjectTrack> load_trajectories(const std::string& path, const EquirectProjection* proj) {
    std::map<long long, ObjectTrack> by_object;
    for (const CsvRow& row : read_csv(path, 4)) {
        const long long obj = csv_int(row, 0, path);
        TrajectoryPoint pt;
        pt.t = csv_double(row, 1, path);
        const double cx = csv_double(row, 2, path);
        const double cy = csv_double(row, 3, path);
        pt.location = proj ? proj->forward(cx, cy) : Point{cx, cy};
        ObjectTrack& track = by_object[obj];
        track.object_id = obj;
        if (!track.points.empty() && pt.t < track.points.back().t) {
            throw IngestionError(path + ":" + std::to_string(row.line) + ": object " +
                                 std::to_string(obj) + " points are not time-sorted");
        }
        track.points.push_back(pt);
    }
    std::vector<ObjectTrack> tracks;
    tracks.reserve(by_object.size());
    for (auto& [id, track] : by_object) tracks.push_back(std::move(track));
    return tracks;
}

}  // namespace gapmeet
