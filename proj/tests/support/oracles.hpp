#pragma once

// Test-side reference computations. Nothing here calls into the library's
// metric or search code; only plain data types are shared.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "latrefine/lattice.hpp"
#include "latrefine/model.hpp"

namespace oracle {

using latrefine::CaTrace;
using latrefine::LatticeModel;
using latrefine::LatticePoint;
using latrefine::Vec3;

inline constexpr double kBond = 3.8;

inline double fcc_unit() { return kBond / std::sqrt(2.0); }

inline Vec3 fcc_coords(const LatticePoint& p) {
    const double u = fcc_unit();
    return {p.x * u, p.y * u, p.z * u};
}

inline double dist(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Squared pair-distance deviations over the first k residues, pair by pair.
inline double pair_sum(const std::vector<Vec3>& a, const std::vector<Vec3>& b, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double d = dist(a[i], a[j]) - dist(b[i], b[j]);
            s += d * d;
        }
    return s;
}

inline double drmsd(const std::vector<Vec3>& a, const std::vector<Vec3>& b, std::size_t k) {
    if (k < 2) return 0.0;
    return std::sqrt(pair_sum(a, b, k) / (static_cast<double>(k) * (k - 1) / 2.0));
}

inline double drmsd(const std::vector<Vec3>& a, const std::vector<Vec3>& b) { return drmsd(a, b, a.size()); }

inline std::vector<Vec3> fcc_coords(std::span<const LatticePoint> pts) {
    std::vector<Vec3> out;
    for (const auto& p : pts) out.push_back(fcc_coords(p));
    return out;
}

// ---------------------------------------------------------------------------
// sphere sizes

// Every FCC node in the bounding cube, filtered by Euclidean distance.
inline std::vector<LatticePoint> fcc_cube_scan(const LatticePoint& c, double radius) {
    const int h = static_cast<int>(std::ceil(radius / fcc_unit())) + 1;
    std::vector<LatticePoint> out;
    for (int x = c.x - h; x <= c.x + h; ++x)
        for (int y = c.y - h; y <= c.y + h; ++y)
            for (int z = c.z - h; z <= c.z + h; ++z) {
                if (((x + y + z) % 2 + 2) % 2 != 0) continue;
                if (dist(fcc_coords({x, y, z}), fcc_coords(c)) <= radius + 1e-9) out.push_back({x, y, z});
            }
    return out;
}

// r2(m): representations as a sum of two squares, via 4 * (d_1(m) - d_3(m)).
inline std::int64_t sum_of_two_squares(std::int64_t m) {
    if (m == 0) return 1;
    std::int64_t d1 = 0, d3 = 0;
    for (std::int64_t d = 1; d <= m; ++d) {
        if (m % d != 0) continue;
        if (d % 4 == 1) ++d1;
        if (d % 4 == 3) ++d3;
    }
    return 4 * (d1 - d3);
}

// r3(s) = sum over x of r2(s - x^2).
inline std::int64_t sum_of_three_squares(std::int64_t s) {
    std::int64_t total = 0;
    for (std::int64_t x = -s; x <= s; ++x)
        if (x * x <= s) total += sum_of_two_squares(s - x * x);
    return total;
}

// x^2+y^2+z^2 and x+y+z share parity, so the FCC shell at squared integer
// length s is empty for odd s and holds r3(s) nodes otherwise.
inline std::int64_t fcc_shell_count(double radius) {
    const double limit = radius / fcc_unit();
    const auto s_max = static_cast<std::int64_t>(std::floor(limit * limit + 1e-9));
    std::int64_t total = 0;
    for (std::int64_t s = 0; s <= s_max; s += 2) total += sum_of_three_squares(s);
    return total;
}

// ---------------------------------------------------------------------------
// walks

inline std::vector<LatticePoint> fcc_steps() {
    std::vector<LatticePoint> v;
    for (int a : {-1, 1})
        for (int b : {-1, 1}) {
            v.push_back({a, b, 0});
            v.push_back({a, 0, b});
            v.push_back({0, a, b});
        }
    return v;
}

inline bool fcc_adjacent(const LatticePoint& a, const LatticePoint& b) {
    const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y), dz = std::abs(a.z - b.z);
    return dx <= 1 && dy <= 1 && dz <= 1 && dx + dy + dz == 2;
}

inline bool fcc_saw(std::span<const LatticePoint> pts) {
    std::set<std::tuple<int, int, int>> seen;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (((p.x + p.y + p.z) % 2 + 2) % 2 != 0) return false;
        if (i > 0 && !fcc_adjacent(pts[i - 1], p)) return false;
        if (!seen.insert({p.x, p.y, p.z}).second) return false;
    }
    return true;
}

// Best dRMSD over every FCC self-avoiding walk of the trace's length starting at the origin.
inline double best_anchored_saw_drmsd(const std::vector<Vec3>& trace) {
    const std::size_t n = trace.size();
    const auto steps = fcc_steps();
    std::vector<LatticePoint> walk{{0, 0, 0}};
    double best = std::numeric_limits<double>::infinity();
    auto rec = [&](auto&& self) -> void {
        if (walk.size() == n) {
            best = std::min(best, drmsd(fcc_coords(walk), trace));
            return;
        }
        for (const auto& s : steps) {
            const LatticePoint p{walk.back().x + s.x, walk.back().y + s.y, walk.back().z + s.z};
            if (std::find(walk.begin(), walk.end(), p) != walk.end()) continue;
            walk.push_back(p);
            self(self);
            walk.pop_back();
        }
    };
    rec(rec);
    return best;
}

// Optimal completion of `prefix` where residue i ranges over FCC nodes within
// `radius` of initial[i]; objective is the raw pair sum. +inf if none exists.
inline double best_completion(const std::vector<LatticePoint>& initial, const std::vector<Vec3>& trace,
                              double radius, std::vector<LatticePoint> prefix) {
    const std::size_t n = initial.size();
    std::vector<std::vector<LatticePoint>> dom(n);
    for (std::size_t i = 0; i < n; ++i) dom[i] = fcc_cube_scan(initial[i], radius);
    double best = std::numeric_limits<double>::infinity();
    auto rec = [&](auto&& self) -> void {
        if (prefix.size() == n) {
            if (fcc_saw(prefix)) best = std::min(best, pair_sum(fcc_coords(prefix), trace, n));
            return;
        }
        for (const auto& v : dom[prefix.size()]) {
            if (!prefix.empty() && !fcc_adjacent(prefix.back(), v)) continue;
            if (std::find(prefix.begin(), prefix.end(), v) != prefix.end()) continue;
            prefix.push_back(v);
            self(self);
            prefix.pop_back();
        }
    };
    rec(rec);
    return best;
}

// ---------------------------------------------------------------------------
// random inputs

struct Instance {
    LatticeModel model;
    CaTrace trace;
};

inline std::vector<LatticePoint> random_fcc_saw(std::size_t n, std::mt19937_64& rng) {
    const auto steps = fcc_steps();
    for (;;) {
        std::vector<LatticePoint> walk{{0, 0, 0}};
        while (walk.size() < n) {
            std::vector<LatticePoint> free;
            for (const auto& s : steps) {
                const LatticePoint p{walk.back().x + s.x, walk.back().y + s.y, walk.back().z + s.z};
                if (std::find(walk.begin(), walk.end(), p) == walk.end()) free.push_back(p);
            }
            if (free.empty()) break;
            walk.push_back(free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)]);
        }
        if (walk.size() == n) return walk;
    }
}

// A random FCC walk as the initial model, and as trace the same walk in
// Angstrom with Gaussian noise on every coordinate.
inline Instance random_instance(std::size_t n, std::mt19937_64& rng, double noise = 1.0) {
    Instance inst;
    inst.model.points = random_fcc_saw(n, rng);
    inst.model.spec = latrefine::LatticeSpec::fcc();
    std::normal_distribution<double> g(0.0, noise);
    for (const auto& p : inst.model.points) {
        const Vec3 c = fcc_coords(p);
        inst.trace.coords.push_back({c.x + g(rng), c.y + g(rng), c.z + g(rng)});
    }
    inst.trace.id = "random" + std::to_string(n);
    return inst;
}

// ---------------------------------------------------------------------------
// rotations

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 rotation(double ax, double ay, double az, double angle) {
    const double len = std::sqrt(ax * ax + ay * ay + az * az);
    ax /= len, ay /= len, az /= len;
    const double c = std::cos(angle), s = std::sin(angle), t = 1 - c;
    return {{{t * ax * ax + c, t * ax * ay - s * az, t * ax * az + s * ay},
             {t * ax * ay + s * az, t * ay * ay + c, t * ay * az - s * ax},
             {t * ax * az - s * ay, t * ay * az + s * ax, t * az * az + c}}};
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    return rotation(g(rng), g(rng), g(rng) + 1e-3, u(rng));
}

inline Vec3 apply(const Mat3& r, const Vec3& p, const Vec3& t = {}) {
    return {r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + t.x,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + t.y,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + t.z};
}

inline std::vector<Vec3> apply(const Mat3& r, const std::vector<Vec3>& pts, const Vec3& t = {}) {
    std::vector<Vec3> out;
    for (const auto& p : pts) out.push_back(apply(r, p, t));
    return out;
}

// Coordinate RMSD after the best rotation, found by coarse-to-fine search
// over Euler angles with both sets centered.
inline double grid_crmsd(const std::vector<Vec3>& mobile, const std::vector<Vec3>& target) {
    const auto centered = [](std::vector<Vec3> v) {
        Vec3 c{};
        for (const auto& p : v) c = {c.x + p.x, c.y + p.y, c.z + p.z};
        const double n = static_cast<double>(v.size());
        for (auto& p : v) p = {p.x - c.x / n, p.y - c.y / n, p.z - c.z / n};
        return v;
    };
    const auto a = centered(mobile), b = centered(target);
    const auto euler = [](double al, double be, double ga) {
        const Mat3 z1 = rotation(0, 0, 1, al), y = rotation(0, 1, 0, be), z2 = rotation(0, 0, 1, ga);
        Mat3 m{}, r{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) m[i][j] += z1[i][k] * y[k][j];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) r[i][j] += m[i][k] * z2[k][j];
        return r;
    };
    const auto rmsd = [&](double al, double be, double ga) {
        const Mat3 r = euler(al, be, ga);
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = dist(apply(r, a[i]), b[i]);
            s += d * d;
        }
        return std::sqrt(s / static_cast<double>(a.size()));
    };
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 3> at{};
    const int steps = 36;
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j <= steps / 2; ++j)
            for (int k = 0; k < steps; ++k) {
                const double al = 2 * M_PI * i / steps, be = M_PI * j / (steps / 2), ga = 2 * M_PI * k / steps;
                const double v = rmsd(al, be, ga);
                if (v < best) best = v, at = {al, be, ga};
            }
    for (double h = 2 * M_PI / steps; h > 1e-7; h *= 0.5) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (int d = 0; d < 3; ++d)
                for (double sgn : {-1.0, 1.0}) {
                    auto t = at;
                    t[d] += sgn * h;
                    const double v = rmsd(t[0], t[1], t[2]);
                    if (v < best - 1e-15) best = v, at = t, moved = true;
                }
        }
    }
    return best;
}

}  // namespace oracle
