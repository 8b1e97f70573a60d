#include "gapmeet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapmeet {

double dist(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

Point GeoEllipse::center() const {
    return {(focus_start.x + focus_end.x) / 2.0, (focus_start.y + focus_end.y) / 2.0};
}

double GeoEllipse::semi_minor() const {
    const double a = semi_major();
    const double c = dist(focus_start, focus_end) / 2.0;
    return std::sqrt(std::max(0.0, a * a - c * c));
}

double GeoEllipse::axis_angle() const {
    return std::atan2(focus_end.y - focus_start.y, focus_end.x - focus_start.x);
}

bool ellipse_contains(const GeoEllipse& e, const Point& p, double eps) {
    return dist(p, e.focus_start) + dist(p, e.focus_end) <= e.budget + eps;
}

bool circle_contains(const Circle& c, const Point& p, double eps) {
    return dist(c.center, p) <= c.radius + eps;
}

bool lens_contains(const Lens& l, const Point& p, double eps) {
    return circle_contains(l.c1, p, eps) && circle_contains(l.c2, p, eps);
}

bool lens_is_empty(const Lens& l) {
    return l.c1.radius + l.c2.radius < dist(l.c1.center, l.c2.center);
}

std::pair<Circle, Circle> slice_circles(const Point& gap_anchor_start,
                                        const Point& gap_anchor_end,
                                        double t_s, double t_e, double ms, double t) {
    if (t < t_s || t > t_e) {
        throw std::out_of_range("slice instant outside gap time range");
    }
    Circle forward{gap_anchor_start, (t - t_s) * ms};
    Circle backward{gap_anchor_end, (t_e - t) * ms};
    return {forward, backward};
}

std::optional<Lens> lens_at(const Point& gap_anchor_start, const Point& gap_anchor_end,
                            double t_s, double t_e, double ms, double t) {
    auto [c1, c2] = slice_circles(gap_anchor_start, gap_anchor_end, t_s, t_e, ms, t);
    if (c1.radius + c2.radius + kGeoEps < dist(c1.center, c2.center)) {
        return std::nullopt;
    }
    return Lens{c1, c2, t};
}

double circle_overlap_area(const Circle& ca, const Circle& cb) {
    const double r1 = ca.radius;
    const double r2 = cb.radius;
    const double d = dist(ca.center, cb.center);
    if (d >= r1 + r2) return 0.0;
    const double rmin = std::min(r1, r2);
    if (d <= std::abs(r1 - r2)) return M_PI * rmin * rmin;
    // Two circular segments cut by the common chord.
    const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double b = d - a;
    const double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
    return r1 * r1 * std::atan2(h, a) + r2 * r2 * std::atan2(h, b) - d * h;
}

double lens_area(const Lens& l) {
    if (lens_is_empty(l)) return 0.0;
    return circle_overlap_area(l.c1, l.c2);
}

bool region_contains(const Region& r, const Point& p, double eps) {
    if (const auto* e = std::get_if<GeoEllipse>(&r)) return ellipse_contains(*e, p, eps);
    return lens_contains(std::get<Lens>(r), p, eps);
}

namespace {

std::vector<Point> ellipse_boundary(const GeoEllipse& e, int vertices) {
    const Point c = e.center();
    const double a = e.semi_major();
    const double b = e.semi_minor();
    const double theta = e.axis_angle();
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    std::vector<Point> out;
    out.reserve(vertices);
    for (int i = 0; i < vertices; ++i) {
        const double u = 2.0 * M_PI * i / vertices;
        const double px = a * std::cos(u);
        const double py = b * std::sin(u);
        out.push_back({c.x + px * ct - py * st, c.y + px * st + py * ct});
    }
    return out;
}

void append_arc(std::vector<Point>& out, const Point& center, double r,
                double ang_from, double ang_to, int steps) {
    for (int i = 0; i <= steps; ++i) {
        const double u = ang_from + (ang_to - ang_from) * i / steps;
        out.push_back({center.x + r * std::cos(u), center.y + r * std::sin(u)});
    }
}

std::vector<Point> circle_boundary(const Circle& c, int vertices) {
    std::vector<Point> out;
    out.reserve(vertices);
    for (int i = 0; i < vertices; ++i) {
        const double u = 2.0 * M_PI * i / vertices;
        out.push_back({c.center.x + c.radius * std::cos(u), c.center.y + c.radius * std::sin(u)});
    }
    return out;
}

std::vector<Point> lens_boundary(const Lens& l, int vertices) {
    const double r1 = l.c1.radius;
    const double r2 = l.c2.radius;
    const double d = dist(l.c1.center, l.c2.center);
    if (lens_is_empty(l)) return {};
    if (d <= std::abs(r1 - r2)) {
        return circle_boundary(r1 <= r2 ? l.c1 : l.c2, vertices);
    }
    // Canonical frame: c1 at origin, c2 at (d, 0). The lens boundary is the
    // right cap of c1 between the crossing points plus the left cap of c2.
    const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
    const double phi1 = std::atan2(h, a);
    const double phi2 = std::atan2(h, d - a);
    const int per_arc = std::max(2, vertices / 2);

    std::vector<Point> canon;
    canon.reserve(2 * per_arc + 2);
    append_arc(canon, {0.0, 0.0}, r1, -phi1, phi1, per_arc);
    append_arc(canon, {d, 0.0}, r2, M_PI - phi2, M_PI + phi2, per_arc);

    const double theta = std::atan2(l.c2.center.y - l.c1.center.y,
                                    l.c2.center.x - l.c1.center.x);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    std::vector<Point> out;
    out.reserve(canon.size());
    for (const Point& p : canon) {
        out.push_back({l.c1.center.x + p.x * ct - p.y * st,
                       l.c1.center.y + p.x * st + p.y * ct});
    }
    return out;
}

Point region_anchor(const Region& r) {
    if (const auto* e = std::get_if<GeoEllipse>(&r)) return e->center();
    return std::get<Lens>(r).c1.center;
}

// Every region point lies within this radius of the anchor.
double region_reach(const Region& r) {
    if (const auto* e = std::get_if<GeoEllipse>(&r)) return e->semi_major();
    return std::get<Lens>(r).c1.radius;
}

}  // namespace

std::vector<Point> region_boundary(const Region& r, int vertices) {
    if (const auto* e = std::get_if<GeoEllipse>(&r)) return ellipse_boundary(*e, vertices);
    return lens_boundary(std::get<Lens>(r), vertices);
}

bool regions_intersect(const Region& a, const Region& b, int vertices) {
    if (dist(region_anchor(a), region_anchor(b)) > region_reach(a) + region_reach(b) + kGeoEps) {
        return false;
    }
    for (const Point& p : region_boundary(a, vertices)) {
        if (region_contains(b, p)) return true;
    }
    for (const Point& p : region_boundary(b, vertices)) {
        if (region_contains(a, p)) return true;
    }
    return region_contains(a, region_anchor(b)) || region_contains(b, region_anchor(a));
}

bool point_in_region_intersection(const Point& p, const Region& a, const Region& b, double eps) {
    return region_contains(a, p, eps) && region_contains(b, p, eps);
}

double polygon_area(const std::vector<Point>& poly) {
    if (poly.size() < 3) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % poly.size()];
        acc += p.x * q.y - q.x * p.y;
    }
    return std::abs(acc) / 2.0;
}

std::vector<Point> clip_convex(const std::vector<Point>& subject, const std::vector<Point>& clip) {
    if (subject.empty() || clip.size() < 3) return {};
    std::vector<Point> output = subject;
    for (size_t i = 0; i < clip.size() && !output.empty(); ++i) {
        const Point& e0 = clip[i];
        const Point& e1 = clip[(i + 1) % clip.size()];
        auto inside = [&](const Point& p) {
            return (e1.x - e0.x) * (p.y - e0.y) - (e1.y - e0.y) * (p.x - e0.x) >= 0.0;
        };
        auto cross_point = [&](const Point& p, const Point& q) -> Point {
            const double a1 = e1.y - e0.y;
            const double b1 = e0.x - e1.x;
            const double c1 = a1 * e0.x + b1 * e0.y;
            const double a2 = q.y - p.y;
            const double b2 = p.x - q.x;
            const double c2 = a2 * p.x + b2 * p.y;
            const double det = a1 * b2 - a2 * b1;
            if (det == 0.0) return p;
            return {(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
        };
        std::vector<Point> input;
        input.swap(output);
        for (size_t j = 0; j < input.size(); ++j) {
            const Point& cur = input[j];
            const Point& prev = input[(j + input.size() - 1) % input.size()];
            const bool cur_in = inside(cur);
            const bool prev_in = inside(prev);
            if (cur_in) {
                if (!prev_in) output.push_back(cross_point(prev, cur));
                output.push_back(cur);
            } else if (prev_in) {
                output.push_back(cross_point(prev, cur));
            }
        }
    }
    return output;
}

double region_intersection_area(const Region& a, const Region& b, int vertices) {
    const std::vector<Point> pa = region_boundary(a, vertices);
    const std::vector<Point> pb = region_boundary(b, vertices);
    if (pa.size() < 3 || pb.size() < 3) return 0.0;
    return polygon_area(clip_convex(pa, pb));
}

}  // namespace gapmeet
