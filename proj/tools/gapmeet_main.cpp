// Command-line front end: rendezvous detection over trajectory gaps on a
// spatial network, synthetic scenario generation, and evaluation runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gapmeet/csv.hpp"
#include "gapmeet/geojson.hpp"
#include "gapmeet/pipeline.hpp"
#include "gapmeet/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;

struct DetectOptions {
    std::string nodes;
    std::string edges;
    std::string trajectories;
    std::string traces;
    double theta_s = 1800.0;
    int slices = 16;
    double tau = 0.25;
    double to_s = 1800.0;
    double ms = 30.0;
    double ms_percentile = 0.0;  // > 0 switches to the per-object percentile policy
    double snap_radius_m = 25.0;
    double anchor_snap_m = 50.0;
    double default_speed = 15.0;
    int resolution = 128;
    int jobs = 1;
    unsigned long long seed = 1;
    std::string detector = "dc-tgard";
    bool geodetic = false;
    std::string out;
};

void to_json(json& j, const DetectOptions& o) {
    j = json{{"subcommand", "detect"},
             {"network_nodes", o.nodes},
             {"network_edges", o.edges},
             {"trajectories", o.trajectories},
             {"traces", o.traces},
             {"theta_s", o.theta_s},
             {"slices", o.slices},
             {"tau", o.tau},
             {"to_s", o.to_s},
             {"ms", o.ms},
             {"ms_percentile", o.ms_percentile},
             {"snap_radius_m", o.snap_radius_m},
             {"anchor_snap_m", o.anchor_snap_m},
             {"default_speed", o.default_speed},
             {"resolution", o.resolution},
             {"jobs", o.jobs},
             {"seed", o.seed},
             {"detector", o.detector},
             {"geodetic", o.geodetic}};
}

void from_json(const json& j, DetectOptions& o) {
    j.at("network_nodes").get_to(o.nodes);
    j.at("network_edges").get_to(o.edges);
    j.at("trajectories").get_to(o.trajectories);
    j.at("traces").get_to(o.traces);
    j.at("theta_s").get_to(o.theta_s);
    j.at("slices").get_to(o.slices);
    j.at("tau").get_to(o.tau);
    j.at("to_s").get_to(o.to_s);
    j.at("ms").get_to(o.ms);
    j.at("ms_percentile").get_to(o.ms_percentile);
    j.at("snap_radius_m").get_to(o.snap_radius_m);
    j.at("anchor_snap_m").get_to(o.anchor_snap_m);
    j.at("default_speed").get_to(o.default_speed);
    j.at("resolution").get_to(o.resolution);
    j.at("jobs").get_to(o.jobs);
    j.at("seed").get_to(o.seed);
    j.at("detector").get_to(o.detector);
    j.at("geodetic").get_to(o.geodetic);
}

gapmeet::DetectorKind parse_detector(const std::string& name) {
    if (name == "prism") return gapmeet::DetectorKind::kPrism;
    if (name == "tgard") return gapmeet::DetectorKind::kTgard;
    if (name == "dc-tgard") return gapmeet::DetectorKind::kDcTgard;
    throw gapmeet::ConfigError("unknown detector '" + name + "'");
}

gapmeet::PipelineConfig pipeline_from(const DetectOptions& o) {
    gapmeet::PipelineConfig cfg;
    cfg.theta_s = o.theta_s;
    if (o.ms_percentile > 0.0) {
        cfg.ms.kind = gapmeet::MsPolicy::kPercentile;
        cfg.ms.percentile = o.ms_percentile;
        cfg.ms.constant_mps = o.ms;
    } else {
        cfg.ms.kind = gapmeet::MsPolicy::kConstant;
        cfg.ms.constant_mps = o.ms;
    }
    cfg.detector.slices = o.slices;
    cfg.detector.tau = o.tau;
    cfg.detector.to_s = o.to_s;
    cfg.detector.anchor_snap_m = o.anchor_snap_m;
    cfg.detector.boundary_vertices = o.resolution;
    cfg.detector.weights.snap_radius_m = o.snap_radius_m;
    cfg.detector.weights.default_speed_mps = o.default_speed;
    cfg.kind = parse_detector(o.detector);
    cfg.jobs = o.jobs;
    return cfg;
}

void require_file(const std::string& path, const std::string& what) {
    if (path.empty() || !fs::exists(path)) {
        throw gapmeet::ConfigError(what + " file missing: '" + path + "'");
    }
}

int cmd_detect(DetectOptions& opt) {
    require_file(opt.nodes, "network nodes");
    require_file(opt.edges, "network edges");
    require_file(opt.trajectories, "trajectories");
    require_file(opt.traces, "traces");
    if (opt.out.empty()) throw gapmeet::ConfigError("--out directory is required");
    fs::create_directories(opt.out);

    const gapmeet::SpatialNetwork net = gapmeet::load_network(opt.nodes, opt.edges, opt.geodetic);
    const gapmeet::EquirectProjection* proj = net.projection ? &*net.projection : nullptr;
    const gapmeet::HistoricTraces traces = gapmeet::load_traces(opt.traces, proj);
    const std::vector<gapmeet::ObjectTrack> tracks =
        gapmeet::load_trajectories(opt.trajectories, proj);

    const gapmeet::PipelineConfig cfg = pipeline_from(opt);
    const gapmeet::DetectionRun run = gapmeet::run_detection(net, traces, tracks, cfg);

    gapmeet::write_json(gapmeet::rendezvous_geojson(net, run.outcomes),
                        (fs::path(opt.out) / "rendezvous.geojson").string());
    gapmeet::write_json(gapmeet::metrics_json(run, opt.detector),
                        (fs::path(opt.out) / "metrics.json").string());
    gapmeet::write_json(json(opt), (fs::path(opt.out) / "run.json").string());

    long rendezvous = 0;
    for (const auto& o : run.outcomes) rendezvous += static_cast<long>(o.detection.nodes.size());
    std::cout << "gaps=" << run.gaps.size() << " pairs=" << run.outcomes.size()
              << " rendezvous_nodes=" << rendezvous << " npe=" << run.npe_value << '\n';
    return kExitOk;
}

int cmd_pair(DetectOptions& opt) {
    require_file(opt.nodes, "network nodes");
    require_file(opt.edges, "network edges");
    require_file(opt.trajectories, "trajectories");
    if (opt.out.empty()) throw gapmeet::ConfigError("--out directory is required");
    fs::create_directories(opt.out);

    const gapmeet::SpatialNetwork net = gapmeet::load_network(opt.nodes, opt.edges, opt.geodetic);
    const gapmeet::EquirectProjection* proj = net.projection ? &*net.projection : nullptr;
    const std::vector<gapmeet::ObjectTrack> tracks =
        gapmeet::load_trajectories(opt.trajectories, proj);
    const gapmeet::PipelineConfig cfg = pipeline_from(opt);
    const gapmeet::GapExtraction extraction =
        gapmeet::extract_gaps(tracks, cfg.theta_s, cfg.ms);
    const std::vector<gapmeet::GapPair> pairs =
        gapmeet::pair_gaps(extraction.gaps, cfg.detector.boundary_vertices);

    std::unordered_map<int, const gapmeet::TrajectoryGap*> by_id;
    for (const auto& g : extraction.gaps) by_id[g.gap_id] = &g;
    std::ofstream out(fs::path(opt.out) / "pairs.csv");
    out << "pair_id,first_gap,second_gap,object_i,object_j,overlap_start,overlap_end\n";
    for (const auto& p : pairs) {
        out << p.pair_id << ',' << p.first_gap << ',' << p.second_gap << ','
            << by_id.at(p.first_gap)->object_id << ',' << by_id.at(p.second_gap)->object_id << ','
            << p.overlap_start << ',' << p.overlap_end << '\n';
    }
    std::cout << "gaps=" << extraction.gaps.size() << " (dropped " << extraction.dropped_infeasible
              << " infeasible) pairs=" << pairs.size() << '\n';
    return kExitOk;
}

struct EvalDetectorRow {
    std::string detector;
    long pairs = 0;
    long rendezvous = 0;
    double precision = 1.0;
    double recall = 1.0;
    double accuracy = 1.0;
    double npe_value = 0.0;
    long slices = 0;
    long sp_runs = 0;
    long reuse_hits = 0;
    double wall_ms = 0.0;
};

int cmd_eval(const std::string& dataset_dir, const std::string& detector_choice,
             const std::string& out_dir, const std::string& axis_name_str,
             std::vector<double>& axis_values, gapmeet::ScenarioConfig& base) {
    if (out_dir.empty()) throw gapmeet::ConfigError("--out directory is required");
    fs::create_directories(out_dir);

    if (!axis_name_str.empty()) {
        if (axis_values.empty()) throw gapmeet::ConfigError("--values required with --axis");
        const gapmeet::Axis axis = gapmeet::parse_axis(axis_name_str);
        const auto rows = gapmeet::run_matrix(base, axis, axis_values,
                                              fs::path(out_dir) / "matrix_data");
        gapmeet::write_matrix_csv(rows, (fs::path(out_dir) / "results.csv").string());
        std::cout << "matrix rows=" << rows.size() << " -> " << out_dir << "/results.csv\n";
        return kExitOk;
    }

    if (dataset_dir.empty()) throw gapmeet::ConfigError("--dataset directory is required");
    require_file((fs::path(dataset_dir) / "truth.csv").string(), "truth labels");
    const gapmeet::LoadedDataset ds = gapmeet::load_dataset(dataset_dir);
    gapmeet::PipelineConfig cfg = ds.pipeline();

    const gapmeet::GapExtraction extraction =
        gapmeet::extract_gaps(ds.tracks, cfg.theta_s, cfg.ms);
    const std::vector<gapmeet::GapPair> pairs =
        gapmeet::pair_gaps(extraction.gaps, cfg.detector.boundary_vertices);

    std::vector<gapmeet::DetectorKind> kinds;
    if (detector_choice == "all") {
        kinds = {gapmeet::DetectorKind::kPrism, gapmeet::DetectorKind::kTgard,
                 gapmeet::DetectorKind::kDcTgard};
    } else {
        kinds = {parse_detector(detector_choice)};
    }

    std::ofstream out(fs::path(out_dir) / "results.csv");
    out << "detector,pairs,rendezvous,precision,recall,accuracy,npe,slices_processed,"
           "sp_runs,reuse_hits,wall_ms\n";
    std::set<gapmeet::PairNodeKey> tgard_pred, dc_pred;
    long tgard_slices = 0, dc_slices = 0;
    for (gapmeet::DetectorKind kind : kinds) {
        const auto outcomes = gapmeet::run_pairs(ds.net, ds.traces, extraction.gaps, pairs, kind,
                                                 cfg.detector, cfg.jobs);
        EvalDetectorRow row;
        row.detector = gapmeet::detector_name(kind);
        row.pairs = static_cast<long>(outcomes.size());
        std::set<gapmeet::PairNodeKey> predicted;
        long bounded = 0;
        for (const auto& o : outcomes) {
            row.rendezvous += static_cast<long>(o.detection.nodes.size());
            row.slices += o.detection.report.slices_processed;
            row.sp_runs += o.detection.report.sp_runs;
            row.reuse_hits += o.detection.report.reuse_hits;
            row.wall_ms += o.detection.report.wall_ms;
            bounded += o.detection.report.bounded_nodes;
            const std::string key = gapmeet::pair_key(o.object_i, o.object_j);
            for (const auto& rn : o.detection.nodes) {
                predicted.insert({key, static_cast<int>(ds.net.nodes[rn.node_id].original_id)});
            }
        }
        const gapmeet::Score s = gapmeet::score(predicted, ds.truth_positive);
        row.precision = s.precision;
        row.recall = s.recall;
        row.accuracy = s.accuracy;
        row.npe_value = gapmeet::npe(ds.net.node_count() * std::max<long>(1, row.pairs), bounded);
        out << row.detector << ',' << row.pairs << ',' << row.rendezvous << ',' << row.precision
            << ',' << row.recall << ',' << row.accuracy << ',' << row.npe_value << ','
            << row.slices << ',' << row.sp_runs << ',' << row.reuse_hits << ',' << row.wall_ms
            << '\n';
        if (kind == gapmeet::DetectorKind::kTgard) {
            tgard_pred = predicted;
            tgard_slices = row.slices;
        }
        if (kind == gapmeet::DetectorKind::kDcTgard) {
            dc_pred = predicted;
            dc_slices = row.slices;
        }
        std::cout << row.detector << ": rendezvous=" << row.rendezvous
                  << " precision=" << row.precision << " recall=" << row.recall
                  << " npe=" << row.npe_value << '\n';
    }
    if (detector_choice == "all") {
        std::cout << "dc-tgard node set equals tgard: " << (dc_pred == tgard_pred ? "yes" : "no")
                  << "; dc slices " << dc_slices << " <= tgard slices " << tgard_slices << ": "
                  << (dc_slices <= tgard_slices ? "yes" : "no") << '\n';
    }
    return kExitOk;
}

int cmd_synth(gapmeet::ScenarioConfig& cfg, const std::string& out_dir) {
    if (out_dir.empty()) throw gapmeet::ConfigError("--out directory is required");
    if (fs::exists(fs::path(out_dir) / "scenario.json")) {
        throw gapmeet::ConfigError("output directory already holds a dataset: " + out_dir);
    }
    const gapmeet::Dataset ds = gapmeet::generate(cfg, out_dir);
    std::cout << "dataset " << ds.dir.string() << ": ms=" << ds.ms_mps
              << " positives=" << ds.positive_pairs << " negatives=" << ds.negative_pairs << '\n';
    return kExitOk;
}

int cmd_bench(gapmeet::ScenarioConfig& cfg, std::vector<int>& slice_values,
              const std::string& out_dir) {
    if (out_dir.empty()) throw gapmeet::ConfigError("--out directory is required");
    fs::create_directories(out_dir);
    gapmeet::generate(cfg, fs::path(out_dir) / "bench_data");
    const gapmeet::LoadedDataset ds = gapmeet::load_dataset(fs::path(out_dir) / "bench_data");
    gapmeet::PipelineConfig pipe = ds.pipeline();
    const gapmeet::GapExtraction extraction =
        gapmeet::extract_gaps(ds.tracks, pipe.theta_s, pipe.ms);
    const auto pairs = gapmeet::pair_gaps(extraction.gaps, pipe.detector.boundary_vertices);

    std::ofstream out(fs::path(out_dir) / "bench.csv");
    out << "K,pairs,slices_tgard,slices_dc,dual_step_ceiling,sp_tgard,sp_dc,reuse_tgard,reuse_dc,"
           "wall_tgard_ms,wall_dc_ms\n";
    for (int K : slice_values) {
        gapmeet::DetectorConfig dcfg = pipe.detector;
        dcfg.slices = K;
        long st = 0, sd = 0, spt = 0, spd = 0, rt = 0, rd = 0;
        double wt = 0.0, wd = 0.0;
        for (const auto& o : gapmeet::run_pairs(ds.net, ds.traces, extraction.gaps, pairs,
                                                gapmeet::DetectorKind::kTgard, dcfg, 1)) {
            st += o.detection.report.slices_processed;
            spt += o.detection.report.sp_runs;
            rt += o.detection.report.reuse_hits;
            wt += o.detection.report.wall_ms;
        }
        for (const auto& o : gapmeet::run_pairs(ds.net, ds.traces, extraction.gaps, pairs,
                                                gapmeet::DetectorKind::kDcTgard, dcfg, 1)) {
            sd += o.detection.report.slices_processed;
            spd += o.detection.report.sp_runs;
            rd += o.detection.report.reuse_hits;
            wd += o.detection.report.wall_ms;
        }
        const long ceiling = static_cast<long>((K + 2) / 2) * static_cast<long>(pairs.size());
        out << K << ',' << pairs.size() << ',' << st << ',' << sd << ',' << ceiling << ',' << spt
            << ',' << spd << ',' << rt << ',' << rd << ',' << wt << ',' << wd << '\n';
        std::cout << "K=" << K << " tgard_slices=" << st << " dc_slices=" << sd
                  << " (ceiling " << ceiling << ")\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rendezvous detection in trajectory gaps on spatial networks"};
    app.require_subcommand(1);

    DetectOptions opt;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--network-nodes", opt.nodes, "nodes CSV: node_id,x,y");
        sub->add_option("--network-edges", opt.edges, "edges CSV: from_id,to_id,length_m[,oneway]");
        sub->add_option("--trajectories", opt.trajectories, "trajectory CSV: object_id,t_unix_s,x,y");
        sub->add_option("--traces", opt.traces, "historic traces CSV: object_id,t_unix_s,x,y,speed_mps");
        sub->add_option("--theta-s", opt.theta_s, "gap threshold (EMP), seconds");
        sub->add_option("--slices", opt.slices, "time slice count K");
        sub->add_option("--tau", opt.tau, "weight drift threshold for shortest-path reuse");
        sub->add_option("--to-s", opt.to_s, "time overlap threshold, seconds");
        sub->add_option("--ms", opt.ms, "maximum object speed, m/s");
        sub->add_option("--ms-percentile", opt.ms_percentile,
                        "use per-object speed percentile instead of --ms");
        sub->add_option("--snap-radius", opt.snap_radius_m, "trace-to-edge radius, meters");
        sub->add_option("--anchor-snap", opt.anchor_snap_m, "anchor snap radius, meters");
        sub->add_option("--default-speed", opt.default_speed, "fallback speed, m/s");
        sub->add_option("--resolution", opt.resolution, "region boundary vertices");
        sub->add_option("--jobs", opt.jobs, "worker threads over gap pairs");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--detector", opt.detector, "prism | tgard | dc-tgard");
        sub->add_flag("--geodetic", opt.geodetic, "inputs are lon/lat");
        sub->add_option("--out", opt.out, "output directory");
    };

    CLI::App* detect = app.add_subcommand("detect", "detect rendezvous nodes");
    add_common(detect);
    detect->add_option("--config", config_path, "run.json to load settings from");

    CLI::App* pair = app.add_subcommand("pair", "dump candidate gap pairs");
    add_common(pair);

    gapmeet::ScenarioConfig scen;
    std::string kind_name = "grid";
    std::string synth_out;
    auto add_scenario = [&](CLI::App* sub) {
        sub->add_option("--seed", scen.seed, "random seed");
        sub->add_option("--network-kind", kind_name, "grid | random-planar");
        sub->add_option("--nodes", scen.node_count, "node count");
        sub->add_option("--extent", scen.extent_m, "study area extent, meters");
        sub->add_option("--objects", scen.object_count, "object count");
        sub->add_option("--emp-min", scen.emp_min_s, "minimum gap duration, seconds");
        sub->add_option("--emp-max", scen.emp_max_s, "maximum gap duration, seconds");
        sub->add_option("--ms-min", scen.ms_min, "minimum max-speed, m/s");
        sub->add_option("--ms-max", scen.ms_max, "maximum max-speed, m/s");
        sub->add_option("--rate", scen.injection_rate, "rendezvous injection rate");
        sub->add_option("--to-s", scen.to_s, "time overlap threshold, seconds");
        sub->add_option("--slices", scen.slices, "time slice count K");
        sub->add_option("--tau", scen.tau, "drift threshold");
        sub->add_option("--travel-speed", scen.travel_speed_mps, "staged movement speed, m/s");
        sub->add_option("--theta-s", scen.theta_s, "gap threshold, seconds");
        sub->add_option("--out", synth_out, "output directory");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_scenario(synth);

    CLI::App* eval = app.add_subcommand("eval", "evaluate detectors against truth labels");
    std::string dataset_dir;
    std::string detector_choice = "all";
    std::string axis;
    std::vector<double> axis_values;
    eval->add_option("--dataset", dataset_dir, "dataset directory from synth");
    eval->add_option("--detector", detector_choice, "all | prism | tgard | dc-tgard");
    eval->add_option("--axis", axis, "objects | nodes | emp | speed | TO");
    eval->add_option("--values", axis_values, "axis values")->delimiter(',');
    add_scenario(eval);

    CLI::App* bench = app.add_subcommand("bench", "counter instrumentation across K");
    std::vector<int> bench_slices{4, 8, 16, 32};
    bench->add_option("--slice-values", bench_slices, "K values")->delimiter(',');
    add_scenario(bench);

    try {
        app.parse(argc, argv);

        if (detect->parsed() && !config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw gapmeet::ConfigError("cannot open config: " + config_path);
            json j;
            in >> j;
            DetectOptions from_file = j.get<DetectOptions>();
            // Explicit command-line flags win over the loaded file.
            DetectOptions parsed = opt;
            opt = from_file;
            for (const CLI::Option* o : detect->get_options()) {
                if (o->count() == 0) continue;
                const std::string name = o->get_name();
                if (name == "--network-nodes") opt.nodes = parsed.nodes;
                else if (name == "--network-edges") opt.edges = parsed.edges;
                else if (name == "--trajectories") opt.trajectories = parsed.trajectories;
                else if (name == "--traces") opt.traces = parsed.traces;
                else if (name == "--theta-s") opt.theta_s = parsed.theta_s;
                else if (name == "--slices") opt.slices = parsed.slices;
                else if (name == "--tau") opt.tau = parsed.tau;
                else if (name == "--to-s") opt.to_s = parsed.to_s;
                else if (name == "--ms") opt.ms = parsed.ms;
                else if (name == "--ms-percentile") opt.ms_percentile = parsed.ms_percentile;
                else if (name == "--snap-radius") opt.snap_radius_m = parsed.snap_radius_m;
                else if (name == "--anchor-snap") opt.anchor_snap_m = parsed.anchor_snap_m;
                else if (name == "--default-speed") opt.default_speed = parsed.default_speed;
                else if (name == "--resolution") opt.resolution = parsed.resolution;
                else if (name == "--jobs") opt.jobs = parsed.jobs;
                else if (name == "--seed") opt.seed = parsed.seed;
                else if (name == "--detector") opt.detector = parsed.detector;
                else if (name == "--geodetic") opt.geodetic = parsed.geodetic;
                else if (name == "--out") opt.out = parsed.out;
            }
        }

        if (detect->parsed()) return cmd_detect(opt);
        if (pair->parsed()) return cmd_pair(opt);
        if (synth->parsed()) {
            scen.kind = kind_name == "random-planar" ? gapmeet::NetworkKind::kRandomPlanar
                                                     : gapmeet::NetworkKind::kGrid;
            return cmd_synth(scen, synth_out);
        }
        if (eval->parsed()) {
            scen.kind = kind_name == "random-planar" ? gapmeet::NetworkKind::kRandomPlanar
                                                     : gapmeet::NetworkKind::kGrid;
            return cmd_eval(dataset_dir, detector_choice, synth_out, axis, axis_values, scen);
        }
        if (bench->parsed()) {
            scen.kind = kind_name == "random-planar" ? gapmeet::NetworkKind::kRandomPlanar
                                                     : gapmeet::NetworkKind::kGrid;
            return cmd_bench(scen, bench_slices, synth_out);
        }
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitValidation;
    } catch (const gapmeet::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const gapmeet::IngestionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
