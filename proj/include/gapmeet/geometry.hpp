#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace gapmeet {

// Membership tolerance in meters.
inline constexpr double kGeoEps = 1e-6;
// Relative tolerance for area comparisons.
inline constexpr double kAreaRelEps = 1e-6;
// Default vertex count when a region boundary is polygonized.
inline constexpr int kDefaultBoundaryVertices = 128;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double dist(const Point& a, const Point& b);

// Reachable set during a trajectory gap: an ellipse whose foci are the gap
// anchors and whose major-axis length is the travel budget
// (gap duration * maximum speed).
struct GeoEllipse {
    Point focus_start;
    Point focus_end;
    double budget = 0.0;  // meters

    Point center() const;
    double semi_major() const { return budget / 2.0; }
    double semi_minor() const;
    // Orientation of the focal axis, radians.
    double axis_angle() const;
};

struct Circle {
    Point center;
    double radius = 0.0;
};

// Time slice of a gap: the intersection of the forward-reach circle from the
// start anchor and the backward-reach circle from the end anchor at instant t.
struct Lens {
    Circle c1;
    Circle c2;
    double t = 0.0;  // slice instant, seconds
};

using Region = std::variant<GeoEllipse, Lens>;

bool ellipse_contains(const GeoEllipse& e, const Point& p, double eps = kGeoEps);
bool circle_contains(const Circle& c, const Point& p, double eps = kGeoEps);
bool lens_contains(const Lens& l, const Point& p, double eps = kGeoEps);
bool lens_is_empty(const Lens& l);

// Forward circle from the start anchor and backward circle from the end
// anchor at instant t. Throws std::out_of_range when t is outside [t_s, t_e].
std::pair<Circle, Circle> slice_circles(const Point& gap_anchor_start,
                                        const Point& gap_anchor_end,
                                        double t_s, double t_e, double ms, double t);

// Lens at instant t, or nullopt when the two circles do not intersect.
std::optional<Lens> lens_at(const Point& gap_anchor_start, const Point& gap_anchor_end,
                            double t_s, double t_e, double ms, double t);

// Closed-form intersection area of two discs.
double circle_overlap_area(const Circle& a, const Circle& b);
double lens_area(const Lens& l);

bool region_contains(const Region& r, const Point& p, double eps = kGeoEps);

// CCW polygonization of a region boundary.
std::vector<Point> region_boundary(const Region& r, int vertices = kDefaultBoundaryVertices);

// Nonemptiness of the intersection of two regions, via boundary
// polygonization plus containment tests.
bool regions_intersect(const Region& a, const Region& b,
                       int vertices = kDefaultBoundaryVertices);

bool point_in_region_intersection(const Point& p, const Region& a, const Region& b,
                                  double eps = kGeoEps);

// Area of the intersection of two regions, via convex polygon clipping of the
// polygonized boundaries.
double region_intersection_area(const Region& a, const Region& b,
                                int vertices = kDefaultBoundaryVertices);

// Convex polygon helpers. Polygons are CCW vertex lists.
double polygon_area(const std::vector<Point>& poly);
std::vector<Point> clip_convex(const std::vector<Point>& subject, const std::vector<Point>& clip);

}  // namespace gapmeet
