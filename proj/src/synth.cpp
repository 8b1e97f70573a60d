#include "gapmeet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "gapmeet/csv.hpp"

namespace gapmeet {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct GenEdge {
    int a;
    int b;
    double len;
};

struct GenNetwork {
    std::vector<Point> nodes;
    std::vector<GenEdge> edges;  // undirected
    std::vector<std::vector<std::pair<int, double>>> adj;

    void build_adj() {
        adj.assign(nodes.size(), {});
        for (const GenEdge& e : edges) {
            adj[e.a].push_back({e.b, e.len});
            adj[e.b].push_back({e.a, e.len});
        }
    }
};

GenNetwork make_grid(int node_count, double extent) {
    const int side = std::max(2, static_cast<int>(std::lround(std::sqrt(node_count))));
    const double pitch = extent / (side - 1);
    GenNetwork net;
    net.nodes.reserve(side * side);
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            net.nodes.push_back({c * pitch, r * pitch});
        }
    }
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const int id = r * side + c;
            if (c + 1 < side) net.edges.push_back({id, id + 1, pitch});
            if (r + 1 < side) net.edges.push_back({id, id + side, pitch});
        }
    }
    net.build_adj();
    return net;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

// Scattered nodes joined to their nearest neighbors, with extra edges until
// the graph is connected.
GenNetwork make_random_planar(int node_count, double extent, std::mt19937_64& rng) {
    GenNetwork net;
    std::uniform_real_distribution<double> coord(0.0, extent);
    while (static_cast<int>(net.nodes.size()) < node_count) {
        Point p{coord(rng), coord(rng)};
        bool dup = false;
        for (const Point& q : net.nodes) {
            if (dist(p, q) < 1e-6) {
                dup = true;
                break;
            }
        }
        if (!dup) net.nodes.push_back(p);
    }
    const int k = 5;
    std::set<std::pair<int, int>> edge_set;
    for (int i = 0; i < node_count; ++i) {
        std::vector<std::pair<double, int>> near;
        for (int j = 0; j < node_count; ++j) {
            if (j != i) near.push_back({dist(net.nodes[i], net.nodes[j]), j});
        }
        std::partial_sort(near.begin(), near.begin() + std::min<size_t>(k, near.size()),
                          near.end());
        for (int n = 0; n < std::min<int>(k, static_cast<int>(near.size())); ++n) {
            const int j = near[n].second;
            edge_set.insert({std::min(i, j), std::max(i, j)});
        }
    }
    UnionFind uf(node_count);
    for (const auto& [a, b] : edge_set) uf.unite(a, b);
    while (true) {
        double best = std::numeric_limits<double>::infinity();
        int ba = -1, bb = -1;
        for (int i = 0; i < node_count; ++i) {
            for (int j = i + 1; j < node_count; ++j) {
                if (uf.find(i) == uf.find(j)) continue;
                const double d = dist(net.nodes[i], net.nodes[j]);
                if (d < best) {
                    best = d;
                    ba = i;
                    bb = j;
                }
            }
        }
        if (ba < 0) break;  // connected
        edge_set.insert({ba, bb});
        uf.unite(ba, bb);
    }
    for (const auto& [a, b] : edge_set) {
        net.edges.push_back({a, b, dist(net.nodes[a], net.nodes[b])});
    }
    net.build_adj();
    return net;
}

// Travel seconds from src to every node at constant speed.
std::vector<double> travel_times(const GenNetwork& net, int src, double speed) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> t(net.nodes.size(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    t[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > t[u]) continue;
        for (const auto& [v, len] : net.adj[u]) {
            const double nd = d + len / speed;
            if (nd < t[v]) {
                t[v] = nd;
                heap.push({nd, v});
            }
        }
    }
    return t;
}

struct StagedObject {
    long long object_id = 0;
    int start_node = 0;
    int end_node = 0;
    double t_s = 0.0;
    double t_e = 0.0;
};

struct StagedGap {
    double meet_start = 0.0;  // m0
    int start_node = 0;
    int end_node = 0;
    double travel_in = 0.0;
    double travel_out = 0.0;
    double emp = 0.0;
    double pre_slack = 0.0;
};

}  // namespace

Dataset generate(const ScenarioConfig& cfg, const std::filesystem::path& dir) {
    if (cfg.node_count < 4 || cfg.object_count < 0 || cfg.extent_m <= 0.0) {
        throw ConfigError("invalid scenario size parameters");
    }
    if (cfg.emp_min_s <= 0.0 || cfg.emp_max_s < cfg.emp_min_s) {
        throw ConfigError("invalid emp range");
    }
    if (cfg.theta_s > cfg.emp_min_s) {
        throw ConfigError("theta exceeds the emp range; gaps would not qualify");
    }
    if (cfg.ms_min < 1.1 * cfg.travel_speed_mps) {
        throw ConfigError("ms range must exceed the staged travel speed");
    }
    if (cfg.ms_max < cfg.ms_min || cfg.injection_rate < 0.0 || cfg.injection_rate > 1.0) {
        throw ConfigError("invalid ms range or injection rate");
    }
    if (cfg.slices < 2) throw ConfigError("slice count must be at least 2");

    const double dwell = cfg.to_s + 2.0 * cfg.emp_max_s / cfg.slices + 120.0;
    if (dwell > 0.8 * cfg.emp_min_s) {
        throw ConfigError("emp range cannot host the staged dwell; raise emp or lower TO");
    }

    std::mt19937_64 rng(cfg.seed);
    GenNetwork gen = cfg.kind == NetworkKind::kGrid
                         ? make_grid(cfg.node_count, cfg.extent_m)
                         : make_random_planar(cfg.node_count, cfg.extent_m, rng);
    const int n_nodes = static_cast<int>(gen.nodes.size());

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double ms = cfg.ms_min + (cfg.ms_max - cfg.ms_min) * uni(rng);
    const double v = cfg.travel_speed_mps;
    const double theta = cfg.theta_s;

    // Anchor pool radius around the meet node.
    const double spacing = cfg.extent_m / std::max(1.0, std::sqrt(static_cast<double>(n_nodes)));
    const double window_span = 3.0 * cfg.emp_max_s + 2.0 * theta + 600.0;
    const double t_origin = 1.6e9;

    struct TruthRow {
        std::string key;
        long long node;
        int label;
    };
    std::vector<StagedObject> objects;
    std::vector<TruthRow> truth;
    Dataset ds;
    ds.dir = dir;
    ds.ms_mps = ms;

    const int slots = cfg.object_count / 2;
    for (int slot = 0; slot < slots; ++slot) {
        const double t0 = t_origin + slot * window_span;
        const bool positive = uni(rng) < cfg.injection_rate;

        bool staged = false;
        for (int attempt = 0; attempt < 24 && !staged; ++attempt) {
            const int meet = static_cast<int>(rng() % n_nodes);
            double radius = std::max(2.5 * spacing, cfg.extent_m / 40.0);
            std::vector<int> pool;
            for (int widen = 0; widen < 3 && pool.size() < 2; ++widen) {
                pool.clear();
                for (int i = 0; i < n_nodes; ++i) {
                    if (dist(gen.nodes[i], gen.nodes[meet]) <= radius) pool.push_back(i);
                }
                radius *= 1.6;
            }
            if (pool.size() < 2) continue;
            const std::vector<double> from_meet = travel_times(gen, meet, v);

            auto stage_gap = [&](double window_m0_min) -> std::optional<StagedGap> {
                StagedGap g;
                g.start_node = pool[rng() % pool.size()];
                g.end_node = pool[rng() % pool.size()];
                g.travel_in = from_meet[g.start_node];
                g.travel_out = from_meet[g.end_node];
                if (!std::isfinite(g.travel_in) || !std::isfinite(g.travel_out)) return std::nullopt;
                g.emp = cfg.emp_min_s + (cfg.emp_max_s - cfg.emp_min_s) * uni(rng);
                const double slack = g.emp - g.travel_in - dwell - g.travel_out;
                if (slack < 0.0) return std::nullopt;
                g.pre_slack = slack * uni(rng);
                g.meet_start = window_m0_min + g.travel_in + g.pre_slack;
                return g;
            };

            const double m0_min = t0 + 0.8 * theta;
            auto gi = stage_gap(m0_min);
            auto gj = stage_gap(m0_min);
            if (!gi || !gj) continue;

            // Both objects dwell together: align on the later meet start.
            const double m0 = std::max(gi->meet_start, gj->meet_start);
            auto finish = [&](const StagedGap& g, double meet_begin, long long oid) {
                StagedObject obj;
                obj.object_id = oid;
                obj.start_node = g.start_node;
                obj.end_node = g.end_node;
                obj.t_s = meet_begin - g.travel_in - g.pre_slack;
                obj.t_e = obj.t_s + g.emp;
                return obj;
            };
            StagedObject oi = finish(*gi, m0, 2LL * slot);
            StagedObject oj;
            if (positive) {
                oj = finish(*gj, m0, 2LL * slot + 1);
            } else {
                // Shift the partner so the gap windows overlap for less than TO;
                // no node can then satisfy the overlap threshold.
                StagedObject tmp = finish(*gj, m0, 2LL * slot + 1);
                const double shift = (oi.t_e - cfg.to_s * 0.5) - tmp.t_s;
                oj = tmp;
                oj.t_s += shift;
                oj.t_e += shift;
            }
            // The staged dwell must outlast the meet window for positives.
            if (positive && (oi.t_e < m0 + dwell + gi->travel_out ||
                             oj.t_e < m0 + dwell + gj->travel_out)) {
                continue;
            }
            objects.push_back(oi);
            objects.push_back(oj);
            truth.push_back({pair_key(oi.object_id, oj.object_id),
                             static_cast<long long>(meet), positive ? 1 : 0});
            if (positive) {
                ++ds.positive_pairs;
            } else {
                ++ds.negative_pairs;
            }
            staged = true;
        }
        if (!staged) {
            throw ConfigError("could not stage a rendezvous scenario; loosen the configuration");
        }
    }
    if (cfg.object_count % 2 == 1) {
        // Solo object with an ordinary gap; it never pairs.
        const double t0 = t_origin + slots * window_span;
        const int a = static_cast<int>(rng() % n_nodes);
        const int b = static_cast<int>(rng() % n_nodes);
        StagedObject solo;
        solo.object_id = cfg.object_count - 1;
        solo.start_node = a;
        solo.end_node = b;
        solo.t_s = t0 + 0.8 * theta;
        solo.t_e = solo.t_s + cfg.emp_max_s;
        objects.push_back(solo);
    }

    std::filesystem::create_directories(dir);
    {
        std::ofstream nf(ds.nodes_csv());
        nf << "node_id,x,y\n";
        for (int i = 0; i < n_nodes; ++i) {
            nf << i << ',' << fmt(gen.nodes[i].x) << ',' << fmt(gen.nodes[i].y) << '\n';
        }
        std::ofstream ef(ds.edges_csv());
        ef << "from_id,to_id,length_m\n";
        for (const GenEdge& e : gen.edges) {
            ef << e.a << ',' << e.b << ',' << fmt(e.len) << '\n';
        }
    }
    {
        std::ofstream tf(ds.trajectories_csv());
        std::ofstream rf(ds.traces_csv());
        tf << "object_id,t_unix_s,x,y\n";
        rf << "object_id,t_unix_s,x,y,speed_mps\n";
        std::vector<StagedObject> ordered = objects;
        std::sort(ordered.begin(), ordered.end(),
                  [](const StagedObject& a, const StagedObject& b) {
                      return a.object_id < b.object_id;
                  });
        for (const StagedObject& o : ordered) {
            const Point s = gen.nodes[o.start_node];
            const Point e = gen.nodes[o.end_node];
            const double steps[3] = {0.8, 0.4, 0.0};
            for (double f : steps) {
                const double t = o.t_s - f * theta;
                tf << o.object_id << ',' << fmt(t) << ',' << fmt(s.x) << ',' << fmt(s.y) << '\n';
                rf << o.object_id << ',' << fmt(t) << ',' << fmt(s.x) << ',' << fmt(s.y) << ','
                   << fmt(v) << '\n';
            }
            for (double f : {0.0, 0.4, 0.8}) {
                const double t = o.t_e + f * theta;
                tf << o.object_id << ',' << fmt(t) << ',' << fmt(e.x) << ',' << fmt(e.y) << '\n';
                rf << o.object_id << ',' << fmt(t) << ',' << fmt(e.x) << ',' << fmt(e.y) << ','
                   << fmt(v) << '\n';
            }
        }
    }
    {
        std::ofstream uf(ds.truth_csv());
        uf << "pair_id,node_id,label\n";
        for (const TruthRow& r : truth) {
            uf << r.key << ',' << r.node << ',' << r.label << '\n';
        }
    }
    {
        nlohmann::json j = {{"seed", cfg.seed},
                            {"network_kind", cfg.kind == NetworkKind::kGrid ? "grid" : "random-planar"},
                            {"node_count", n_nodes},
                            {"extent_m", cfg.extent_m},
                            {"object_count", cfg.object_count},
                            {"emp_min_s", cfg.emp_min_s},
                            {"emp_max_s", cfg.emp_max_s},
                            {"ms_mps", ms},
                            {"injection_rate", cfg.injection_rate},
                            {"to_s", cfg.to_s},
                            {"slices", cfg.slices},
                            {"tau", cfg.tau},
                            {"travel_speed_mps", v},
                            {"default_speed_mps", v},
                            {"theta_s", cfg.theta_s},
                            {"positive_pairs", ds.positive_pairs},
                            {"negative_pairs", ds.negative_pairs}};
        std::ofstream sf(ds.scenario_json());
        sf << j.dump(2) << '\n';
    }
    return ds;
}

PipelineConfig LoadedDataset::pipeline() const {
    PipelineConfig cfg;
    cfg.theta_s = scenario.at("theta_s").get<double>();
    cfg.ms.kind = MsPolicy::kConstant;
    cfg.ms.constant_mps = scenario.at("ms_mps").get<double>();
    cfg.detector.slices = scenario.at("slices").get<int>();
    cfg.detector.tau = scenario.at("tau").get<double>();
    cfg.detector.to_s = scenario.at("to_s").get<double>();
    cfg.detector.weights.default_speed_mps = scenario.at("default_speed_mps").get<double>();
    return cfg;
}

LoadedDataset load_dataset(const std::filesystem::path& dir) {
    Dataset paths;
    paths.dir = dir;
    LoadedDataset ds;
    ds.net = load_network(paths.nodes_csv(), paths.edges_csv());
    ds.traces = load_traces(paths.traces_csv());
    ds.tracks = load_trajectories(paths.trajectories_csv());
    {
        std::ifstream sf(paths.scenario_json());
        if (!sf) throw IngestionError("cannot open " + paths.scenario_json());
        sf >> ds.scenario;
    }
    for (const CsvRow& row : read_csv(paths.truth_csv(), 3)) {
        const PairNodeKey key{row.fields[0],
                              static_cast<int>(csv_int(row, 1, paths.truth_csv()))};
        if (csv_int(row, 2, paths.truth_csv()) != 0) {
            ds.truth_positive.insert(key);
        } else {
            ds.truth_negative.insert(key);
        }
    }
    return ds;
}

const char* axis_name(Axis axis) {
    switch (axis) {
        case Axis::kObjects: return "objects";
        case Axis::kNodes: return "nodes";
        case Axis::kEmp: return "emp";
        case Axis::kSpeed: return "speed";
        case Axis::kTo: return "TO";
    }
    return "?";
}

Axis parse_axis(const std::string& name) {
    if (name == "objects") return Axis::kObjects;
    if (name == "nodes") return Axis::kNodes;
    if (name == "emp") return Axis::kEmp;
    if (name == "speed") return Axis::kSpeed;
    if (name == "TO" || name == "to") return Axis::kTo;
    throw ConfigError("unknown axis '" + name + "'");
}

namespace {

MatrixRow run_cell(const LoadedDataset& ds, Axis axis, double value, double to_override,
                   double ms_override) {
    MatrixRow row;
    row.axis = axis_name(axis);
    row.value = value;
    row.study_nodes = ds.net.node_count();

    PipelineConfig base = ds.pipeline();
    if (to_override > 0.0) base.detector.to_s = to_override;
    if (ms_override > 0.0) base.ms.constant_mps = ms_override;

    GapExtraction extraction = extract_gaps(ds.tracks, base.theta_s, base.ms);
    const std::vector<GapPair> pairs =
        pair_gaps(extraction.gaps, base.detector.boundary_vertices);
    row.pairs = static_cast<int>(pairs.size());

    auto aggregate = [&](DetectorKind kind, long& bounded, double& wall, long& slices, long& sp,
                         long& rendezvous) {
        const auto outcomes = run_pairs(ds.net, ds.traces, extraction.gaps, pairs, kind,
                                        base.detector, 1);
        bounded = 0;
        wall = 0.0;
        slices = 0;
        sp = 0;
        rendezvous = 0;
        std::set<PairNodeKey> predicted;
        for (const PairOutcome& o : outcomes) {
            bounded += o.detection.report.bounded_nodes;
            wall += o.detection.report.wall_ms;
            slices += o.detection.report.slices_processed;
            sp += o.detection.report.sp_runs;
            rendezvous += static_cast<long>(o.detection.nodes.size());
            const std::string key = pair_key(o.object_i, o.object_j);
            for (const RendezvousNode& rn : o.detection.nodes) {
                predicted.insert({key, static_cast<int>(ds.net.nodes[rn.node_id].original_id)});
            }
        }
        return std::make_pair(outcomes, predicted);
    };

    long slices_prism = 0;
    long sp_prism = 0;
    auto [prism_outcomes, prism_pred] = aggregate(DetectorKind::kPrism, row.bounded_prism,
                                                  row.wall_prism_ms, slices_prism, sp_prism,
                                                  row.rendezvous_prism);
    long bounded_tgard = 0;
    auto [tgard_outcomes, tgard_pred] = aggregate(DetectorKind::kTgard, bounded_tgard,
                                                  row.wall_tgard_ms, row.slices_tgard,
                                                  row.sp_tgard, row.rendezvous_tgard);
    auto [dc_outcomes, dc_pred] = aggregate(DetectorKind::kDcTgard, row.bounded_dc,
                                            row.wall_dc_ms, row.slices_dc, row.sp_dc,
                                            row.rendezvous_dc);
    row.dc_equals_tgard = dc_pred == tgard_pred;

    const long pair_count = std::max<long>(1, row.pairs);
    row.npe_prism = npe(row.study_nodes * pair_count, row.bounded_prism);
    row.npe_dc = npe(row.study_nodes * pair_count, row.bounded_dc);

    const Score s_prism = score(prism_pred, ds.truth_positive);
    row.precision_prism = s_prism.precision;
    row.recall_prism = s_prism.recall;
    const Score s_dc = score(dc_pred, ds.truth_positive);
    row.precision_dc = s_dc.precision;
    row.recall_dc = s_dc.recall;
    row.accuracy_dc = s_dc.accuracy;
    return row;
}

}  // namespace

std::vector<MatrixRow> run_matrix(const ScenarioConfig& base, Axis axis,
                                  const std::vector<double>& values,
                                  const std::filesystem::path& work_dir) {
    std::vector<MatrixRow> rows;
    if (axis == Axis::kTo) {
        // One dataset staged at the largest TO; the detection threshold varies.
        ScenarioConfig cfg = base;
        cfg.to_s = *std::max_element(values.begin(), values.end());
        generate(cfg, work_dir / "to_axis");
        const LoadedDataset ds = load_dataset(work_dir / "to_axis");
        for (double value : values) {
            rows.push_back(run_cell(ds, axis, value, value, -1.0));
        }
        return rows;
    }
    if (axis == Axis::kSpeed) {
        // One dataset; the extraction-side maximum speed varies, so candidate
        // regions grow monotonically along the axis.
        for (double value : values) {
            if (value < 1.1 * base.travel_speed_mps) {
                throw ConfigError("speed axis values must exceed the staged travel speed");
            }
        }
        generate(base, work_dir / "speed_axis");
        const LoadedDataset ds = load_dataset(work_dir / "speed_axis");
        for (double value : values) {
            rows.push_back(run_cell(ds, axis, value, -1.0, value));
        }
        return rows;
    }
    for (size_t i = 0; i < values.size(); ++i) {
        ScenarioConfig cfg = base;
        cfg.seed = base.seed + 1000 * (i + 1);
        const double value = values[i];
        switch (axis) {
            case Axis::kObjects: cfg.object_count = static_cast<int>(value); break;
            case Axis::kNodes: cfg.node_count = static_cast<int>(value); break;
            case Axis::kEmp:
                cfg.emp_min_s = value;
                cfg.emp_max_s = value;
                break;
            case Axis::kSpeed:
            case Axis::kTo: break;
        }
        const auto cell_dir = work_dir / (std::string(axis_name(axis)) + "_" + std::to_string(i));
        generate(cfg, cell_dir);
        const LoadedDataset ds = load_dataset(cell_dir);
        rows.push_back(run_cell(ds, axis, value, -1.0, -1.0));
    }
    return rows;
}

void write_matrix_csv(const std::vector<MatrixRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestionError("cannot write " + path);
    out << "axis,value,pairs,study_nodes,bounded_prism,bounded_dc,npe_prism,npe_dc,"
           "precision_prism,recall_prism,precision_dc,recall_dc,accuracy_dc,"
           "rendezvous_prism,rendezvous_tgard,rendezvous_dc,dc_equals_tgard,"
           "slices_tgard,slices_dc,sp_tgard,sp_dc,wall_prism_ms,wall_tgard_ms,wall_dc_ms\n";
    for (const MatrixRow& r : rows) {
        out << r.axis << ',' << fmt(r.value) << ',' << r.pairs << ',' << r.study_nodes << ','
            << r.bounded_prism << ',' << r.bounded_dc << ',' << fmt(r.npe_prism) << ','
            << fmt(r.npe_dc) << ',' << fmt(r.precision_prism) << ',' << fmt(r.recall_prism) << ','
            << fmt(r.precision_dc) << ',' << fmt(r.recall_dc) << ',' << fmt(r.accuracy_dc) << ','
            << r.rendezvous_prism << ',' << r.rendezvous_tgard << ',' << r.rendezvous_dc << ','
            << (r.dc_equals_tgard ? 1 : 0) << ',' << r.slices_tgard << ',' << r.slices_dc << ','
            << r.sp_tgard << ',' << r.sp_dc << ',' << fmt(r.wall_prism_ms) << ','
            << fmt(r.wall_tgard_ms) << ',' << fmt(r.wall_dc_ms) << '\n';
    }
}

}  // namespace gapmeet
