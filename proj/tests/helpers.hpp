#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gapmeet/network.hpp"

namespace gapmeet::testing {

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("gapmeet_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string write_file(const std::filesystem::path& dir, const std::string& name,
                              const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

// In-memory network builder for unit fixtures. Edges are undirected and get
// expanded to arc pairs like the CSV loader does.
inline SpatialNetwork make_network(const std::vector<Point>& coords,
                                   const std::vector<std::tuple<int, int, double>>& edges) {
    SpatialNetwork net;
    for (size_t i = 0; i < coords.size(); ++i) {
        net.nodes.push_back({static_cast<int>(i), coords[i], static_cast<long long>(i)});
        net.id_lookup[static_cast<long long>(i)] = static_cast<int>(i);
    }
    for (const auto& [a, b, len] : edges) {
        net.edges.push_back({a, b, len, {}});
        net.edges.push_back({b, a, len, {}});
    }
    net.out_arcs.assign(net.nodes.size(), {});
    net.in_arcs.assign(net.nodes.size(), {});
    for (size_t i = 0; i < net.edges.size(); ++i) {
        net.out_arcs[net.edges[i].from].push_back(static_cast<int>(i));
        net.in_arcs[net.edges[i].to].push_back(static_cast<int>(i));
    }
    return net;
}

inline HistoricTraces no_traces() {
    HistoricTraces t;
    t.build_index();
    return t;
}

}  // namespace gapmeet::testing
