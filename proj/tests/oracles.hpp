#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. None of them reuse the library's geometry routines.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rearrange/geometry.hpp"

namespace oracle {

struct P {
    double x, y;
};

// Corners straight from the rotation matrix, in polygon order.
inline std::array<P, 4> box_corners(double cx, double cy, double w, double h, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double lx[4] = {w / 2, -w / 2, -w / 2, w / 2};
    const double ly[4] = {h / 2, h / 2, -h / 2, -h / 2};
    std::array<P, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = {cx + c * lx[i] - s * ly[i], cy + s * lx[i] + c * ly[i]};
    return out;
}

inline std::array<P, 4> box_corners(const rearrange::OrientedBox& b) {
    return box_corners(b.cx(), b.cy(), b.w(), b.h(), b.theta());
}

// x-interval of a convex polygon on the horizontal line y, if it crosses it.
inline std::optional<std::pair<double, double>> row_interval(const std::array<P, 4>& poly, double y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < 4; ++i) {
        const P a = poly[i], b = poly[(i + 1) % 4];
        if ((a.y - y) * (b.y - y) > 0) continue;
        if (a.y == b.y) {
            lo = std::min({lo, a.x, b.x});
            hi = std::max({hi, a.x, b.x});
            continue;
        }
        const double t = (y - a.y) / (b.y - a.y);
        const double x = a.x + t * (b.x - a.x);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

// True when some cell center of the `cell`-pixel grid lies in both boxes.
inline bool raster_overlap(const rearrange::OrientedBox& a, const rearrange::OrientedBox& b,
                           double cell = 0.01) {
    const auto pa = box_corners(a), pb = box_corners(b);
    auto ybounds = [](const std::array<P, 4>& p) {
        double lo = p[0].y, hi = p[0].y;
        for (const auto& q : p) {
            lo = std::min(lo, q.y);
            hi = std::max(hi, q.y);
        }
        return std::make_pair(lo, hi);
    };
    const auto [alo, ahi] = ybounds(pa);
    const auto [blo, bhi] = ybounds(pb);
    const double ylo = std::max(alo, blo), yhi = std::min(ahi, bhi);
    if (ylo > yhi) return false;
    const long r0 = static_cast<long>(std::floor(ylo / cell - 0.5)) - 1;
    const long r1 = static_cast<long>(std::ceil(yhi / cell - 0.5)) + 1;
    for (long r = r0; r <= r1; ++r) {
        const double y = (static_cast<double>(r) + 0.5) * cell;
        const auto ia = row_interval(pa, y);
        const auto ib = row_interval(pb, y);
        if (!ia || !ib) continue;
        const double lo = std::max(ia->first, ib->first);
        const double hi = std::min(ia->second, ib->second);
        if (lo > hi) continue;
        // Is there a cell center k*cell + cell/2 in [lo, hi]?
        const double k = std::ceil(lo / cell - 0.5);
        if ((k + 0.5) * cell <= hi) return true;
    }
    return false;
}

inline double point_segment(P p, P a, P b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 == 0 ? 0 : ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline double cross(P o, P a, P b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

inline bool segments_intersect(P a, P b, P c, P d) {
    const double d1 = cross(c, d, a), d2 = cross(c, d, b);
    const double d3 = cross(a, b, c), d4 = cross(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline double segment_segment(P a, P b, P c, P d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment(a, c, d), point_segment(b, c, d), point_segment(c, a, b),
                     point_segment(d, a, b)});
}

// Minimum over the 16 edge pairs. Only meaningful for disjoint boxes.
inline double edge_pair_gap(const rearrange::OrientedBox& a, const rearrange::OrientedBox& b) {
    const auto pa = box_corners(a), pb = box_corners(b);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            best = std::min(best, segment_segment(pa[i], pa[(i + 1) % 4], pb[j], pb[(j + 1) % 4]));
        }
    }
    return best;
}

// Smallest projection overlap over the four edge normals; <= 0 when separated.
inline double sat_depth(const rearrange::OrientedBox& a, const rearrange::OrientedBox& b) {
    const auto pa = box_corners(a), pb = box_corners(b);
    double best = std::numeric_limits<double>::infinity();
    for (const auto* poly : {&pa, &pb}) {
        for (int i = 0; i < 2; ++i) {
            const P e{(*poly)[i + 1].x - (*poly)[i].x, (*poly)[i + 1].y - (*poly)[i].y};
            const double len = std::hypot(e.x, e.y);
            const P n{-e.y / len, e.x / len};
            auto project = [&](const std::array<P, 4>& q) {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (const auto& c : q) {
                    const double d = c.x * n.x + c.y * n.y;
                    lo = std::min(lo, d);
                    hi = std::max(hi, d);
                }
                return std::make_pair(lo, hi);
            };
            const auto [alo, ahi] = project(pa);
            const auto [blo, bhi] = project(pb);
            best = std::min(best, std::min(ahi, bhi) - std::max(alo, blo));
        }
    }
    return best;
}

// Deterministic test RNG (xorshift64*), independent of the library's.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x2545F4914F6CDD1DULL) {}
    std::uint64_t next() {
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545F4914F6CDD1DULL;
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

private:
    std::uint64_t s_;
};

inline rearrange::OrientedBox random_box(Rng& rng, double lo, double hi) {
    return rearrange::OrientedBox(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(4, 80),
                                  rng.uniform(4, 80), rng.uniform(-3.2, 3.2));
}

inline std::filesystem::path data_dir() { return REARRANGE_DATA_DIR; }

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() /
               ("rearrange-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace oracle
