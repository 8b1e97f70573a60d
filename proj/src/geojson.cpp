#include "gapmeet/geojson.hpp"

#include <fstream>

#include "gapmeet/csv.hpp"

namespace gapmeet {

nlohmann::json rendezvous_geojson(const SpatialNetwork& net,
                                  const std::vector<PairOutcome>& outcomes) {
    nlohmann::json features = nlohmann::json::array();
    for (const PairOutcome& o : outcomes) {
        for (const RendezvousNode& rn : o.detection.nodes) {
            Point p = net.nodes[rn.node_id].location;
            if (net.projection) {
                double lon, lat;
                net.projection->inverse(p, lon, lat);
                p = {lon, lat};
            }
            nlohmann::json feature = {
                {"type", "Feature"},
                {"geometry", {{"type", "Point"}, {"coordinates", {p.x, p.y}}}},
                {"properties",
                 {{"pair_id", o.pair.pair_id},
                  {"node_id", net.nodes[rn.node_id].original_id},
                  {"alpha_i", {rn.alpha_i.ea, rn.alpha_i.ld}},
                  {"alpha_j", {rn.alpha_j.ea, rn.alpha_j.ld}},
                  {"overlap_s", rn.overlap.length()},
                  {"slices", rn.qualifying_slices}}},
            };
            features.push_back(std::move(feature));
        }
    }
    return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

nlohmann::json metrics_json(const DetectionRun& run, const std::string& detector) {
    nlohmann::json per_pair = nlohmann::json::array();
    for (const PairOutcome& o : run.outcomes) {
        const DetectorReport& r = o.detection.report;
        per_pair.push_back({{"pair_id", o.pair.pair_id},
                            {"objects", {o.object_i, o.object_j}},
                            {"gaps", {o.pair.first_gap, o.pair.second_gap}},
                            {"overlap", {o.pair.overlap_start, o.pair.overlap_end}},
                            {"rendezvous_nodes", o.detection.nodes.size()},
                            {"bounded_nodes", r.bounded_nodes},
                            {"slices_processed", r.slices_processed},
                            {"lens_tests", r.lens_tests},
                            {"sp_runs", r.sp_runs},
                            {"reuse_hits", r.reuse_hits},
                            {"wall_ms", r.wall_ms},
                            {"diagnostics", r.diagnostics}});
    }
    long rendezvous_total = 0;
    for (const PairOutcome& o : run.outcomes) {
        rendezvous_total += static_cast<long>(o.detection.nodes.size());
    }
    return {{"detector", detector},
            {"pairs", run.outcomes.size()},
            {"gaps", run.gaps.size()},
            {"gaps_dropped_infeasible", run.dropped_infeasible},
            {"rendezvous_nodes", rendezvous_total},
            {"study_nodes", run.study_nodes},
            {"bounded_nodes_total", run.bounded_total},
            {"npe", run.npe_value},
            {"totals",
             {{"slices_processed", run.totals.slices_processed},
              {"lens_tests", run.totals.lens_tests},
              {"sp_runs", run.totals.sp_runs},
              {"reuse_hits", run.totals.reuse_hits},
              {"wall_ms", run.totals.wall_ms}}},
            {"per_pair", std::move(per_pair)}};
}

void write_json(const nlohmann::json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestionError("cannot write " + path);
    out << doc.dump(2) << '\n';
}

}  // namespace gapmeet
