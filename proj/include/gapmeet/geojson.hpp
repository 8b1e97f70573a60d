#pragma once

#include <string>

#include "json.hpp"

#include "gapmeet/pipeline.hpp"

namespace gapmeet {

// Rendezvous nodes as a GeoJSON FeatureCollection, one Point feature per
// node, ordered by (pair_id, node_id). Output is deterministic for identical
// runs. Coordinates are inverse-projected to lon/lat when the network was
// loaded geodetically.
nlohmann::json rendezvous_geojson(const SpatialNetwork& net,
                                  const std::vector<PairOutcome>& outcomes);

// Counters and quality numbers of a detection run.
nlohmann::json metrics_json(const DetectionRun& run, const std::string& detector);

void write_json(const nlohmann::json& doc, const std::string& path);

}  // namespace gapmeet
