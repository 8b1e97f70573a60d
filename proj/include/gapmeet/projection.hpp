#pragma once

#include <cmath>

#include "gapmeet/geometry.hpp"

namespace gapmeet {

// Local equirectangular projection around a reference point. Good enough for
// study areas of a few tens of kilometers.
struct EquirectProjection {
    double lon0 = 0.0;  // degrees
    double lat0 = 0.0;  // degrees

    static constexpr double kEarthRadius = 6371000.0;  // meters

    Point forward(double lon, double lat) const {
        const double rad = M_PI / 180.0;
        const double x = (lon - lon0) * rad * kEarthRadius * std::cos(lat0 * rad);
        const double y = (lat - lat0) * rad * kEarthRadius;
        return {x, y};
    }

    void inverse(const Point& p, double& lon, double& lat) const {
        const double rad = M_PI / 180.0;
        lon = lon0 + p.x / (kEarthRadius * std::cos(lat0 * rad)) / rad;
        lat = lat0 + p.y / kEarthRadius / rad;
    }
};

}  // namespace gapmeet
