#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gapmeet/geometry.hpp"
#include "gapmeet/projection.hpp"

namespace gapmeet {

struct NetworkNode {
    int id = 0;  // dense id, 0..N-1 after ingestion
    Point location;
    long long original_id = 0;
};

struct NetworkEdge {
    int from = 0;
    int to = 0;
    double length = 0.0;  // meters
    // Optional evaluated travel times, (slice time, travel seconds), sorted by time.
    std::vector<std::pair<double, double>> weight_series;
};

struct SpatialNetwork {
    std::vector<NetworkNode> nodes;
    std::vector<NetworkEdge> edges;  // directed arcs; undirected input is expanded
    std::vector<std::vector<int>> out_arcs;
    std::vector<std::vector<int>> in_arcs;
    bool directed = false;  // true when the edge source carried oneway marks
    std::optional<EquirectProjection> projection;
    std::unordered_map<long long, int> id_lookup;  // original id -> dense id

    int node_count() const { return static_cast<int>(nodes.size()); }
};

struct TraceRecord {
    long long object_id = 0;
    double t = 0.0;  // unix seconds
    Point location;
    double speed = 0.0;  // meters/second
};

// Historic location traces with a uniform-grid spatial index over record
// positions. Index cells keep records time-sorted so window queries are
// a binary search per cell.
struct HistoricTraces {
    std::vector<TraceRecord> records;

    void build_index(double cell_size_m = 250.0);
    bool indexed() const { return cell_size_ > 0.0; }

    // Ascending record indices within `radius` of segment [a,b] and with
    // timestamp in [t_a, t_b].
    std::vector<int> query_segment(const Point& a, const Point& b, double radius,
                                   double t_a, double t_b) const;

  private:
    double cell_size_ = 0.0;
    std::unordered_map<long long, std::vector<int>> cells_;  // cell key -> record idx, time-sorted
};

struct WeightParams {
    double snap_radius_m = 25.0;     // trace-to-edge association distance
    double default_speed_mps = 15.0; // fallback free-flow speed
};

double point_segment_distance(const Point& p, const Point& a, const Point& b);

// Loads `node_id,x,y` and `from_id,to_id,length_m[,oneway]` CSV files.
// With `geodetic`, node columns are lon/lat and get projected around the
// study-area centroid.
SpatialNetwork load_network(const std::string& nodes_path, const std::string& edges_path,
                            bool geodetic = false);

void save_network(const SpatialNetwork& net, const std::string& nodes_path,
                  const std::string& edges_path);

// Loads `object_id,t_unix_s,x,y,speed_mps` rows and builds the index.
HistoricTraces load_traces(const std::string& path, const EquirectProjection* proj = nullptr);

// Travel seconds for the edge in the window [t_a, t_b): edge length divided by
// the mean speed of qualifying trace records, or by the fallback speed when
// none qualify.
double edge_weight_at(const SpatialNetwork& net, const HistoricTraces& traces,
                      const NetworkEdge& edge, double t_a, double t_b,
                      const WeightParams& params = {});

// Maximum relative per-edge weight change. Both maps must cover the same edges.
double weight_drift(const std::map<int, double>& prev, const std::map<int, double>& next);
double weight_drift(const std::vector<double>& prev, const std::vector<double>& next);

}  // namespace gapmeet
