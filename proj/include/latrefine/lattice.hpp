#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latrefine/geometry.hpp"

namespace latrefine {

/// Length of a lattice edge after scaling: mean consecutive C-alpha distance.
inline constexpr double kCaCaDistance = 3.8;

enum class LatticeKind { Cubic3D, FCC };

std::string_view to_string(LatticeKind kind);
/// Accepts "cubic"/"cubic3d" and "fcc" (case-insensitive).
std::optional<LatticeKind> parse_lattice_kind(std::string_view name);

/// Node of a lattice in its internal integer frame.
struct LatticePoint {
    int x = 0;
    int y = 0;
    int z = 0;

    constexpr LatticePoint& operator+=(const LatticePoint& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr LatticePoint& operator-=(const LatticePoint& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    friend constexpr LatticePoint operator+(LatticePoint a, const LatticePoint& b) { return a += b; }
    friend constexpr LatticePoint operator-(LatticePoint a, const LatticePoint& b) { return a -= b; }
    friend constexpr LatticePoint operator-(const LatticePoint& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr auto operator<=>(const LatticePoint&, const LatticePoint&) = default;

    constexpr std::int64_t norm2() const {
        return std::int64_t{x} * x + std::int64_t{y} * y + std::int64_t{z} * z;
    }
};

struct LatticePointHash {
    std::size_t operator()(const LatticePoint& p) const noexcept {
        auto h = static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x));
        h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(p.y);
        h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(p.z);
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

/// Returns the full neighbor set of `kind` in the internal integer frame.
/// Cubic3D: the 6 axis steps. FCC: the 12 permutations of (+-1,+-1,0).
std::vector<LatticePoint> neighbor_vectors(LatticeKind kind);

/// A lattice together with its neighbor set and the Angstrom length of one
/// internal integer unit. Immutable after construction.
class LatticeSpec {
public:
    explicit LatticeSpec(LatticeKind kind, double bond_length = kCaCaDistance);

    static LatticeSpec cubic() { return LatticeSpec(LatticeKind::Cubic3D); }
    static LatticeSpec fcc() { return LatticeSpec(LatticeKind::FCC); }

    LatticeKind kind() const { return kind_; }
    std::span<const LatticePoint> neighbors() const { return neighbors_; }
    std::size_t coordination() const { return neighbors_.size(); }
    /// Angstrom per internal integer unit.
    double unit_scale() const { return unit_scale_; }
    /// Squared integer length shared by every neighbor vector.
    std::int64_t neighbor_norm2() const { return neighbor_norm2_; }

    bool contains(const LatticePoint& p) const;
    bool are_neighbors(const LatticePoint& a, const LatticePoint& b) const {
        return (a - b).norm2() == neighbor_norm2_ && contains(a) && contains(b);
    }

    /// Throws LatticeError for a point off the lattice (odd-parity FCC triple).
    Vec3 to_euclidean(const LatticePoint& p) const;
    /// Euclidean distance between two lattice points in Angstrom.
    double distance(const LatticePoint& a, const LatticePoint& b) const;

    /// Nearest lattice node to `v` if it lies within `tolerance` Angstrom.
    std::optional<LatticePoint> snap(const Vec3& v, double tolerance) const;

    friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
        return a.kind_ == b.kind_ && a.unit_scale_ == b.unit_scale_;
    }

private:
    LatticeKind kind_;
    std::vector<LatticePoint> neighbors_;
    double unit_scale_;
    std::int64_t neighbor_norm2_;
};

/// All lattice nodes within `radius_ang` Angstrom of `center`, center included,
/// sorted by distance from `center` and then lexicographically.
std::vector<LatticePoint> enumerate_sphere(const LatticePoint& center, double radius_ang,
                                           const LatticeSpec& spec);

/// Signed axis permutation; the 48 of them form the point group shared by the
/// cubic and FCC lattices in the cubic integer frame.
struct PointSymmetry {
    std::array<int, 3> axis{0, 1, 2};
    std::array<int, 3> sign{1, 1, 1};

    constexpr LatticePoint apply(const LatticePoint& p) const {
        const std::array<int, 3> c{p.x, p.y, p.z};
        return {sign[0] * c[axis[0]], sign[1] * c[axis[1]], sign[2] * c[axis[2]]};
    }
};

std::span<const PointSymmetry> point_symmetries();

}  // namespace latrefine
