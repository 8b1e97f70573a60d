#include "gapmeet/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "gapmeet/csv.hpp"

namespace gapmeet {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return dist(p, a);
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, {a.x + t * dx, a.y + t * dy});
}

namespace {

long long cell_key(long long ix, long long iy) {
    return (ix << 32) ^ (iy & 0xffffffffLL);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void HistoricTraces::build_index(double cell_size_m) {
    cell_size_ = cell_size_m;
    cells_.clear();
    std::vector<int> order(records.size());
    for (size_t i = 0; i < records.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return records[a].t < records[b].t;
    });
    for (int idx : order) {
        const Point& p = records[idx].location;
        const long long ix = static_cast<long long>(std::floor(p.x / cell_size_));
        const long long iy = static_cast<long long>(std::floor(p.y / cell_size_));
        cells_[cell_key(ix, iy)].push_back(idx);
    }
}

std::vector<int> HistoricTraces::query_segment(const Point& a, const Point& b, double radius,
                                               double t_a, double t_b) const {
    std::vector<int> out;
    if (!indexed()) {
        for (size_t i = 0; i < records.size(); ++i) {
            const TraceRecord& r = records[i];
            if (r.t < t_a || r.t > t_b) continue;
            if (point_segment_distance(r.location, a, b) <= radius) out.push_back(static_cast<int>(i));
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    const double min_x = std::min(a.x, b.x) - radius;
    const double max_x = std::max(a.x, b.x) + radius;
    const double min_y = std::min(a.y, b.y) - radius;
    const double max_y = std::max(a.y, b.y) + radius;
    const long long ix0 = static_cast<long long>(std::floor(min_x / cell_size_));
    const long long ix1 = static_cast<long long>(std::floor(max_x / cell_size_));
    const long long iy0 = static_cast<long long>(std::floor(min_y / cell_size_));
    const long long iy1 = static_cast<long long>(std::floor(max_y / cell_size_));
    for (long long ix = ix0; ix <= ix1; ++ix) {
        for (long long iy = iy0; iy <= iy1; ++iy) {
            auto it = cells_.find(cell_key(ix, iy));
            if (it == cells_.end()) continue;
            const std::vector<int>& bucket = it->second;
            auto lo = std::lower_bound(bucket.begin(), bucket.end(), t_a,
                                       [&](int idx, double t) { return records[idx].t < t; });
            for (; lo != bucket.end() && records[*lo].t <= t_b; ++lo) {
                if (point_segment_distance(records[*lo].location, a, b) <= radius) {
                    out.push_back(*lo);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

SpatialNetwork load_network(const std::string& nodes_path, const std::string& edges_path,
                            bool geodetic) {
    SpatialNetwork net;
    const auto node_rows = read_csv(nodes_path, 3);

    if (geodetic) {
        double lon_sum = 0.0;
        double lat_sum = 0.0;
        for (const CsvRow& row : node_rows) {
            lon_sum += csv_double(row, 1, nodes_path);
            lat_sum += csv_double(row, 2, nodes_path);
        }
        const double n = node_rows.empty() ? 1.0 : static_cast<double>(node_rows.size());
        net.projection = EquirectProjection{lon_sum / n, lat_sum / n};
    }

    struct RawNode {
        long long original_id;
        Point location;
        long line;
    };
    std::vector<RawNode> raw;
    raw.reserve(node_rows.size());
    for (const CsvRow& row : node_rows) {
        RawNode rn;
        rn.original_id = csv_int(row, 0, nodes_path);
        const double cx = csv_double(row, 1, nodes_path);
        const double cy = csv_double(row, 2, nodes_path);
        rn.location = net.projection ? net.projection->forward(cx, cy) : Point{cx, cy};
        rn.line = row.line;
        raw.push_back(rn);
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const RawNode& a, const RawNode& b) { return a.original_id < b.original_id; });
    for (const RawNode& rn : raw) {
        if (net.id_lookup.count(rn.original_id)) {
            throw IngestionError(nodes_path + ":" + std::to_string(rn.line) + ": duplicate node id " +
                                 std::to_string(rn.original_id));
        }
        const int dense = net.node_count();
        net.id_lookup[rn.original_id] = dense;
        net.nodes.push_back({dense, rn.location, rn.original_id});
    }

    const auto edge_rows = read_csv(edges_path, 3);
    for (const CsvRow& row : edge_rows) {
        const long long from_orig = csv_int(row, 0, edges_path);
        const long long to_orig = csv_int(row, 1, edges_path);
        const double length = csv_double(row, 2, edges_path);
        const bool oneway = row.fields.size() > 3 && csv_int(row, 3, edges_path) != 0;
        auto from_it = net.id_lookup.find(from_orig);
        auto to_it = net.id_lookup.find(to_orig);
        if (from_it == net.id_lookup.end()) {
            throw IngestionError(edges_path + ":" + std::to_string(row.line) + ": unknown node " +
                                 std::to_string(from_orig));
        }
        if (to_it == net.id_lookup.end()) {
            throw IngestionError(edges_path + ":" + std::to_string(row.line) + ": unknown node " +
                                 std::to_string(to_orig));
        }
        if (length <= 0.0) {
            throw IngestionError(edges_path + ":" + std::to_string(row.line) +
                                 ": non-positive edge length");
        }
        if (from_it->second == to_it->second) continue;  // drop self-loops
        net.edges.push_back({from_it->second, to_it->second, length, {}});
        if (oneway) {
            net.directed = true;
        } else {
            net.edges.push_back({to_it->second, from_it->second, length, {}});
        }
    }

    net.out_arcs.assign(net.nodes.size(), {});
    net.in_arcs.assign(net.nodes.size(), {});
    for (size_t i = 0; i < net.edges.size(); ++i) {
        net.out_arcs[net.edges[i].from].push_back(static_cast<int>(i));
        net.in_arcs[net.edges[i].to].push_back(static_cast<int>(i));
    }
    return net;
}

void save_network(const SpatialNetwork& net, const std::string& nodes_path,
                  const std::string& edges_path) {
    std::ofstream nf(nodes_path);
    if (!nf) throw IngestionError("cannot write " + nodes_path);
    nf << "node_id,x,y\n";
    for (const NetworkNode& n : net.nodes) {
        Point p = n.location;
        if (net.projection) {
            double lon, lat;
            net.projection->inverse(p, lon, lat);
            p = {lon, lat};
        }
        nf << n.original_id << ',' << fmt_double(p.x) << ',' << fmt_double(p.y) << '\n';
    }
    std::ofstream ef(edges_path);
    if (!ef) throw IngestionError("cannot write " + edges_path);
    ef << "from_id,to_id,length_m,oneway\n";
    // Undirected expansion produced forward/backward arc pairs; emit each once.
    for (size_t i = 0; i < net.edges.size(); ++i) {
        const NetworkEdge& e = net.edges[i];
        bool is_back_arc = i > 0 && net.edges[i - 1].from == e.to && net.edges[i - 1].to == e.from &&
                           net.edges[i - 1].length == e.length;
        if (is_back_arc) continue;
        const bool has_back = i + 1 < net.edges.size() && net.edges[i + 1].from == e.to &&
                              net.edges[i + 1].to == e.from && net.edges[i + 1].length == e.length;
        ef << net.nodes[e.from].original_id << ',' << net.nodes[e.to].original_id << ','
           << fmt_double(e.length) << ',' << (has_back ? 0 : 1) << '\n';
    }
}

HistoricTraces load_traces(const std::string& path, const EquirectProjection* proj) {
    HistoricTraces traces;
    for (const CsvRow& row : read_csv(path, 5)) {
        TraceRecord r;
        r.object_id = csv_int(row, 0, path);
        r.t = csv_double(row, 1, path);
        const double cx = csv_double(row, 2, path);
        const double cy = csv_double(row, 3, path);
        r.location = proj ? proj->forward(cx, cy) : Point{cx, cy};
        r.speed = csv_double(row, 4, path);
        traces.records.push_back(r);
    }
    // per-object time order check
    std::unordered_map<long long, double> last_t;
    for (size_t i = 0; i < traces.records.size(); ++i) {
        const TraceRecord& r = traces.records[i];
        auto it = last_t.find(r.object_id);
        if (it != last_t.end() && r.t < it->second) {
            throw IngestionError(path + ": records of object " + std::to_string(r.object_id) +
                                 " are not time-sorted");
        }
        last_t[r.object_id] = r.t;
    }
    traces.build_index();
    return traces;
}

double edge_weight_at(const SpatialNetwork& net, const HistoricTraces& traces,
                      const NetworkEdge& edge, double t_a, double t_b,
                      const WeightParams& params) {
    if (t_a >= t_b) throw ContractError("edge_weight_at requires t_a < t_b");
    const Point& a = net.nodes[edge.from].location;
    const Point& b = net.nodes[edge.to].location;
    double speed_sum = 0.0;
    int n = 0;
    for (int idx : traces.query_segment(a, b, params.snap_radius_m, t_a, t_b)) {
        const double s = traces.records[idx].speed;
        if (s > 0.0) {
            speed_sum += s;
            ++n;
        }
    }
    const double mean_speed = n > 0 ? speed_sum / n : params.default_speed_mps;
    return edge.length / mean_speed;
}

double weight_drift(const std::map<int, double>& prev, const std::map<int, double>& next) {
    if (prev.size() != next.size()) throw ContractError("weight_drift: edge sets differ");
    double drift = 0.0;
    auto it_n = next.begin();
    for (auto it_p = prev.begin(); it_p != prev.end(); ++it_p, ++it_n) {
        if (it_p->first != it_n->first) throw ContractError("weight_drift: edge sets differ");
        drift = std::max(drift, std::abs(it_n->second - it_p->second) / it_p->second);
    }
    return drift;
}

double weight_drift(const std::vector<double>& prev, const std::vector<double>& next) {
    if (prev.size() != next.size()) throw ContractError("weight_drift: edge sets differ");
    double drift = 0.0;
    for (size_t i = 0; i < prev.size(); ++i) {
        drift = std::max(drift, std::abs(next[i] - prev[i]) / prev[i]);
    }
    return drift;
}

}  // namespace gapmeet
