#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

// Oriented-rectangle math in image pixel coordinates.
//
// Frame: origin at the workspace top-left, +x to the right, +y toward the
// bottom of the image. "In front of" means larger y. Angles are radians
// measured from the image +x axis.

namespace rearrange {

inline constexpr double kPi = std::numbers::pi;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

// Maps an angle to [-pi/2, pi/2). Rectangles are symmetric under a half turn.
double normalize_half_turn(double theta);

// Rectangle with center (cx, cy), side lengths w (along theta) and h, and
// rotation theta of the w axis from +x. Theta is stored normalized to
// [-pi/2, pi/2); the corner set does not change under normalization.
class OrientedBox {
public:
    // Throws std::invalid_argument unless all fields are finite and w, h > 0.
    OrientedBox(double cx, double cy, double w, double h, double theta = 0.0);

    double cx() const noexcept { return cx_; }
    double cy() const noexcept { return cy_; }
    double w() const noexcept { return w_; }
    double h() const noexcept { return h_; }
    double theta() const noexcept { return theta_; }
    Point2 center() const noexcept { return {cx_, cy_}; }
    double area() const noexcept { return w_ * h_; }

    // Half extents of the axis-aligned bounding box.
    double half_extent_x() const noexcept;
    double half_extent_y() const noexcept;
    double half_diagonal() const noexcept;

    OrientedBox with_pose(double cx, double cy, double theta) const;
    OrientedBox translated(double dx, double dy) const;
    // Rotation about the box's own center.
    OrientedBox rotated(double delta) const;

    // Closed containment test.
    bool contains(Point2 p) const noexcept;

    friend bool operator==(const OrientedBox&, const OrientedBox&) = default;

private:
    double cx_, cy_, w_, h_, theta_;
};

// Counter-clockwise (in the math sense of the x/y components) starting from
// the corner at local (+w/2, +h/2).
std::array<Point2, 4> corners(const OrientedBox& box);

// True iff the closed rectangles intersect (separating-axis test).
bool overlaps(const OrientedBox& a, const OrientedBox& b);

// Smallest projection overlap over the four separating axes; 0 when disjoint.
double penetration_depth(const OrientedBox& a, const OrientedBox& b);

// Minimum Euclidean distance between the two boundaries, 0 when they overlap.
double min_gap(const OrientedBox& a, const OrientedBox& b);

// Jaw-closing direction of a parallel gripper centered on the box,
// perpendicular to the longest edge. theta + pi/2 when w >= h, theta
// otherwise. Result lies in (-pi/2, pi/2]: the jaw axis is undirected, and
// pi/2 (not -pi/2) is reported for an axis-aligned box that is long in x.
double grasp_yaw(const OrientedBox& box);

// Maps an angle to (-pi/2, pi/2].
double normalize_axis(double theta);

// Minimum-area enclosing rectangle of a point set (rotating edges over the
// convex hull). Needs at least three non-collinear points.
OrientedBox min_area_rect(std::span<const Point2> points);

struct Calibration {
    double px_per_meter = 1000.0;
    Point2 origin_world{};  // meters, world position of pixel (0, 0)
    double table_height = 0.0;

    friend bool operator==(const Calibration&, const Calibration&) = default;
};

struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Throws std::invalid_argument if px_per_meter <= 0.
void validate(const Calibration& calib);

WorldPoint pixel_to_world(Point2 p, const Calibration& calib);
Point2 world_to_pixel(const WorldPoint& w, const Calibration& calib);

}  // namespace rearrange
