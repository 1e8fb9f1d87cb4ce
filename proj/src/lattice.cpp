#include "latrefine/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "latrefine/errors.hpp"

namespace latrefine {

std::string_view to_string(LatticeKind kind) {
    switch (kind) {
        case LatticeKind::Cubic3D:
            return "cubic";
        case LatticeKind::FCC:
            return "fcc";
    }
    return "unknown";
}

std::optional<LatticeKind> parse_lattice_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "cubic" || lower == "cubic3d" || lower == "3d-cubic") return LatticeKind::Cubic3D;
    if (lower == "fcc") return LatticeKind::FCC;
    return std::nullopt;
}

std::vector<LatticePoint> neighbor_vectors(LatticeKind kind) {
    std::vector<LatticePoint> out;
    switch (kind) {
        case LatticeKind::Cubic3D:
            out = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
            break;
        case LatticeKind::FCC:
            for (int a : {1, -1}) {
                for (int b : {1, -1}) {
                    out.push_back({a, b, 0});
                    out.push_back({a, 0, b});
                    out.push_back({0, a, b});
                }
            }
            break;
    }
    return out;
}

LatticeSpec::LatticeSpec(LatticeKind kind, double bond_length)
    : kind_(kind), neighbors_(neighbor_vectors(kind)) {
    neighbor_norm2_ = neighbors_.front().norm2();
    unit_scale_ = bond_length / std::sqrt(static_cast<double>(neighbor_norm2_));
}

bool LatticeSpec::contains(const LatticePoint& p) const {
    if (kind_ == LatticeKind::FCC) return ((p.x + p.y + p.z) & 1) == 0;
    return true;
}

Vec3 LatticeSpec::to_euclidean(const LatticePoint& p) const {
    if (!contains(p)) {
        std::ostringstream msg;
        msg << "point (" << p.x << ',' << p.y << ',' << p.z << ") violates the " << to_string(kind_)
            << " parity rule";
        throw LatticeError(msg.str());
    }
    return {unit_scale_ * p.x, unit_scale_ * p.y, unit_scale_ * p.z};
}

double LatticeSpec::distance(const LatticePoint& a, const LatticePoint& b) const {
    return unit_scale_ * std::sqrt(static_cast<double>((a - b).norm2()));
}

std::optional<LatticePoint> LatticeSpec::snap(const Vec3& v, double tolerance) const {
    const std::array<double, 3> scaled{v.x / unit_scale_, v.y / unit_scale_, v.z / unit_scale_};
    std::array<int, 3> r{};
    for (int i = 0; i < 3; ++i) r[i] = static_cast<int>(std::lround(scaled[i]));
    if (kind_ == LatticeKind::FCC && ((r[0] + r[1] + r[2]) & 1) != 0) {
        // flip the coordinate whose rounding was least certain
        int worst = 0;
        double worst_err = -1.0;
        for (int i = 0; i < 3; ++i) {
            const double err = std::abs(scaled[i] - r[i]);
            if (err > worst_err) {
                worst_err = err;
                worst = i;
            }
        }
        r[worst] += scaled[worst] > r[worst] ? 1 : -1;
    }
    const LatticePoint p{r[0], r[1], r[2]};
    const Vec3 e{unit_scale_ * p.x, unit_scale_ * p.y, unit_scale_ * p.z};
    if (latrefine::distance(e, v) > tolerance) return std::nullopt;
    return p;
}

std::vector<LatticePoint> enumerate_sphere(const LatticePoint& center, double radius_ang,
                                           const LatticeSpec& spec) {
    if (!(radius_ang >= 0.0)) throw ArgumentError("sphere radius must be non-negative");
    if (!spec.contains(center)) throw LatticeError("sphere center is not a lattice node");
    const double radius_units = radius_ang / spec.unit_scale();
    const double limit = radius_units * radius_units * (1.0 + 1e-12) + 1e-12;
    const int half = static_cast<int>(std::ceil(radius_units - 1e-12));

    std::vector<LatticePoint> out;
    for (int dx = -half; dx <= half; ++dx) {
        for (int dy = -half; dy <= half; ++dy) {
            for (int dz = -half; dz <= half; ++dz) {
                const LatticePoint d{dx, dy, dz};
                if (static_cast<double>(d.norm2()) > limit) continue;
                const LatticePoint p = center + d;
                if (spec.contains(p)) out.push_back(p);
            }
        }
    }
    std::sort(out.begin(), out.end(), [&](const LatticePoint& a, const LatticePoint& b) {
        const auto na = (a - center).norm2();
        const auto nb = (b - center).norm2();
        if (na != nb) return na < nb;
        return a < b;
    });
    return out;
}

std::span<const PointSymmetry> point_symmetries() {
    static const std::vector<PointSymmetry> group = [] {
        std::vector<PointSymmetry> g;
        std::array<int, 3> axis{0, 1, 2};
        do {
            for (int s = 0; s < 8; ++s) {
                PointSymmetry op;
                op.axis = axis;
                op.sign = {(s & 1) ? -1 : 1, (s & 2) ? -1 : 1, (s & 4) ? -1 : 1};
                g.push_back(op);
            }
        } while (std::next_permutation(axis.begin(), axis.end()));
        return g;
    }();
    return group;
}

}  // namespace latrefine
