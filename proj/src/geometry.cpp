#include "rearrange/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rearrange {

namespace {

struct Interval {
    double lo;
    double hi;
};

Interval project(const std::array<Point2, 4>& pts, double ax, double ay) {
    Interval out{std::numeric_limits<double>::infinity(),
                 -std::numeric_limits<double>::infinity()};
    for (const auto& p : pts) {
        const double d = p.x * ax + p.y * ay;
        out.lo = std::min(out.lo, d);
        out.hi = std::max(out.hi, d);
    }
    return out;
}

// Edge normals of both boxes (two per box; the other two are antiparallel).
std::array<Point2, 4> separating_axes(const OrientedBox& a, const OrientedBox& b) {
    const double ca = std::cos(a.theta()), sa = std::sin(a.theta());
    const double cb = std::cos(b.theta()), sb = std::sin(b.theta());
    return {Point2{ca, sa}, Point2{-sa, ca}, Point2{cb, sb}, Point2{-sb, cb}};
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double cross(Point2 o, Point2 a, Point2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point2> convex_hull(std::span<const Point2> input) {
    std::vector<Point2> pts(input.begin(), input.end());
    std::sort(pts.begin(), pts.end(), [](const Point2& l, const Point2& r) {
        return l.x < r.x || (l.x == r.x && l.y < r.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

double normalize_half_turn(double theta) {
    double t = std::fmod(theta + kPi / 2.0, kPi);
    if (t < 0.0) t += kPi;
    double r = t - kPi / 2.0;
    if (r >= kPi / 2.0) r -= kPi;
    if (r < -kPi / 2.0) r = -kPi / 2.0;
    return r;
}

double normalize_axis(double theta) { return -normalize_half_turn(-theta); }

OrientedBox::OrientedBox(double cx, double cy, double w, double h, double theta)
    : cx_(cx), cy_(cy), w_(w), h_(h), theta_(0.0) {
    if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) ||
        !std::isfinite(h) || !std::isfinite(theta)) {
        throw std::invalid_argument("oriented box fields must be finite");
    }
    if (!(w > 0.0) || !(h > 0.0)) {
        throw std::invalid_argument("oriented box sides must be positive");
    }
    theta_ = normalize_half_turn(theta);
}

double OrientedBox::half_extent_x() const noexcept {
    return 0.5 * (w_ * std::abs(std::cos(theta_)) + h_ * std::abs(std::sin(theta_)));
}

double OrientedBox::half_extent_y() const noexcept {
    return 0.5 * (w_ * std::abs(std::sin(theta_)) + h_ * std::abs(std::cos(theta_)));
}

double OrientedBox::half_diagonal() const noexcept { return 0.5 * std::hypot(w_, h_); }

OrientedBox OrientedBox::with_pose(double cx, double cy, double theta) const {
    return OrientedBox(cx, cy, w_, h_, theta);
}

OrientedBox OrientedBox::translated(double dx, double dy) const {
    return OrientedBox(cx_ + dx, cy_ + dy, w_, h_, theta_);
}

OrientedBox OrientedBox::rotated(double delta) const {
    return OrientedBox(cx_, cy_, w_, h_, theta_ + delta);
}

bool OrientedBox::contains(Point2 p) const noexcept {
    const double c = std::cos(theta_), s = std::sin(theta_);
    const double dx = p.x - cx_, dy = p.y - cy_;
    const double u = dx * c + dy * s;
    const double v = -dx * s + dy * c;
    return std::abs(u) <= 0.5 * w_ && std::abs(v) <= 0.5 * h_;
}

std::array<Point2, 4> corners(const OrientedBox& box) {
    const double c = std::cos(box.theta()), s = std::sin(box.theta());
    const double hw = 0.5 * box.w(), hh = 0.5 * box.h();
    constexpr std::array<std::array<double, 2>, 4> signs{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
    std::array<Point2, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double lx = signs[i][0] * hw, ly = signs[i][1] * hh;
        out[i] = {box.cx() + c * lx - s * ly, box.cy() + s * lx + c * ly};
    }
    return out;
}

bool overlaps(const OrientedBox& a, const OrientedBox& b) {
    const auto ca = corners(a), cb = corners(b);
    for (const auto& axis : separating_axes(a, b)) {
        const Interval ia = project(ca, axis.x, axis.y);
        const Interval ib = project(cb, axis.x, axis.y);
        if (ia.hi < ib.lo || ib.hi < ia.lo) return false;
    }
    return true;
}

double penetration_depth(const OrientedBox& a, const OrientedBox& b) {
    const auto ca = corners(a), cb = corners(b);
    double depth = std::numeric_limits<double>::infinity();
    for (const auto& axis : separating_axes(a, b)) {
        const Interval ia = project(ca, axis.x, axis.y);
        const Interval ib = project(cb, axis.x, axis.y);
        const double d = std::min(ia.hi - ib.lo, ib.hi - ia.lo);
        if (d < 0.0) return 0.0;
        depth = std::min(depth, d);
    }
    return depth;
}

double min_gap(const OrientedBox& a, const OrientedBox& b) {
    if (overlaps(a, b)) return 0.0;
    // Disjoint convex polygons: the closest pair always involves a vertex.
    const auto ca = corners(a), cb = corners(b);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
            best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
        }
    }
    return best;
}

double grasp_yaw(const OrientedBox& box) {
    const double yaw = box.w() >= box.h() ? box.theta() + kPi / 2.0 : box.theta();
    return normalize_axis(yaw);
}

OrientedBox min_area_rect(std::span<const Point2> points) {
    const auto hull = convex_hull(points);
    if (hull.size() < 3) {
        throw std::invalid_argument("min_area_rect needs three non-collinear points");
    }
    double best_area = std::numeric_limits<double>::infinity();
    double best_cx = 0, best_cy = 0, best_w = 0, best_h = 0, best_theta = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2 a = hull[i], b = hull[(i + 1) % hull.size()];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (len == 0.0) continue;
        const double ux = (b.x - a.x) / len, uy = (b.y - a.y) / len;
        double umin = std::numeric_limits<double>::infinity(), umax = -umin;
        double vmin = umin, vmax = -umin;
        for (const auto& p : hull) {
            const double u = p.x * ux + p.y * uy;
            const double v = -p.x * uy + p.y * ux;
            umin = std::min(umin, u);
            umax = std::max(umax, u);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        const double area = (umax - umin) * (vmax - vmin);
        if (area < best_area) {
            best_area = area;
            const double mu = 0.5 * (umin + umax), mv = 0.5 * (vmin + vmax);
            best_cx = mu * ux - mv * uy;
            best_cy = mu * uy + mv * ux;
            best_w = umax - umin;
            best_h = vmax - vmin;
            best_theta = std::atan2(uy, ux);
        }
    }
    return OrientedBox(best_cx, best_cy, best_w, best_h, best_theta);
}

void validate(const Calibration& calib) {
    if (!(calib.px_per_meter > 0.0) || !std::isfinite(calib.px_per_meter)) {
        throw std::invalid_argument("px_per_meter must be positive");
    }
}

WorldPoint pixel_to_world(Point2 p, const Calibration& calib) {
    return {calib.origin_world.x + p.x / calib.px_per_meter,
            calib.origin_world.y + p.y / calib.px_per_meter, calib.table_height};
}

Point2 world_to_pixel(const WorldPoint& w, const Calibration& calib) {
    return {(w.x - calib.origin_world.x) * calib.px_per_meter,
            (w.y - calib.origin_world.y) * calib.px_per_meter};
}

}  // namespace rearrange
