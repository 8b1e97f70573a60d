#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gapmeet/pipeline.hpp"

namespace gapmeet {

enum class NetworkKind { kGrid, kRandomPlanar };

// Parameters of one synthetic scenario. Positive rendezvous labels come from
// physically staged meets, negatives from pairs whose gap windows overlap for
// less than the TO threshold.
struct ScenarioConfig {
    unsigned long long seed = 1;
    NetworkKind kind = NetworkKind::kGrid;
    int node_count = 900;
    double extent_m = 6000.0;
    int object_count = 40;
    double emp_min_s = 5400.0;
    double emp_max_s = 9000.0;
    double ms_min = 18.0;
    double ms_max = 25.0;
    double injection_rate = 0.5;
    double to_s = 1800.0;
    int slices = 16;
    double tau = 0.25;
    double travel_speed_mps = 15.0;  // staged movement speed; also the weight fallback
    double theta_s = 1800.0;
};

struct Dataset {
    std::filesystem::path dir;
    double ms_mps = 0.0;  // scenario-wide maximum speed drawn from [ms_min, ms_max]
    int positive_pairs = 0;
    int negative_pairs = 0;

    std::string nodes_csv() const { return (dir / "nodes.csv").string(); }
    std::string edges_csv() const { return (dir / "edges.csv").string(); }
    std::string trajectories_csv() const { return (dir / "trajectories.csv").string(); }
    std::string traces_csv() const { return (dir / "traces.csv").string(); }
    std::string truth_csv() const { return (dir / "truth.csv").string(); }
    std::string scenario_json() const { return (dir / "scenario.json").string(); }
};

// Writes nodes/edges/trajectories/traces/truth CSV files plus scenario.json
// into `dir`. Deterministic per seed. Throws ConfigError when the scenario
// cannot host the staged meets.
Dataset generate(const ScenarioConfig& config, const std::filesystem::path& dir);

struct LoadedDataset {
    SpatialNetwork net;
    HistoricTraces traces;
    std::vector<ObjectTrack> tracks;
    std::set<PairNodeKey> truth_positive;
    std::set<PairNodeKey> truth_negative;
    nlohmann::json scenario;

    // Pipeline configuration matching the generator's parameters.
    PipelineConfig pipeline() const;
};

LoadedDataset load_dataset(const std::filesystem::path& dir);

enum class Axis { kObjects, kNodes, kEmp, kSpeed, kTo };

const char* axis_name(Axis axis);
Axis parse_axis(const std::string& name);  // throws ConfigError

struct MatrixRow {
    std::string axis;
    double value = 0.0;
    int pairs = 0;
    long study_nodes = 0;
    long bounded_prism = 0;
    long bounded_dc = 0;
    double npe_prism = 0.0;
    double npe_dc = 0.0;
    double precision_prism = 0.0;
    double recall_prism = 0.0;
    double precision_dc = 0.0;
    double recall_dc = 0.0;
    double accuracy_dc = 0.0;
    long rendezvous_prism = 0;
    long rendezvous_tgard = 0;
    long rendezvous_dc = 0;
    bool dc_equals_tgard = false;
    long slices_tgard = 0;
    long slices_dc = 0;
    long sp_tgard = 0;
    long sp_dc = 0;
    double wall_prism_ms = 0.0;
    double wall_tgard_ms = 0.0;
    double wall_dc_ms = 0.0;
};

// One row per axis value: generates (or reuses, along the TO axis) a dataset,
// runs all three detectors, and scores them against the staged truth.
std::vector<MatrixRow> run_matrix(const ScenarioConfig& base, Axis axis,
                                  const std::vector<double>& values,
                                  const std::filesystem::path& work_dir);

void write_matrix_csv(const std::vector<MatrixRow>& rows, const std::string& path);

}  // namespace gapmeet
