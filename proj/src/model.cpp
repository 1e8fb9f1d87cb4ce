#include "latrefine/model.hpp"

#include <sstream>
#include <unordered_map>

#include "latrefine/errors.hpp"

namespace latrefine {

std::string SawViolation::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::OffLattice:
            os << "residue " << index + 1 << " is not a lattice node";
            break;
        case Kind::NotContiguous:
            os << "connectivity violated between residues " << index << " and " << index + 1;
            break;
        case Kind::SelfIntersection:
            os << "self-avoidance violated: residues " << other + 1 << " and " << index + 1
               << " share a lattice node";
            break;
    }
    return os.str();
}

std::optional<SawViolation> LatticeModel::check() const {
    std::unordered_map<LatticePoint, std::size_t, LatticePointHash> seen;
    seen.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!spec.contains(points[i])) return SawViolation{SawViolation::Kind::OffLattice, i};
        if (i > 0 && (points[i] - points[i - 1]).norm2() != spec.neighbor_norm2())
            return SawViolation{SawViolation::Kind::NotContiguous, i};
        auto [it, inserted] = seen.emplace(points[i], i);
        if (!inserted) return SawViolation{SawViolation::Kind::SelfIntersection, i, it->second};
    }
    return std::nullopt;
}

void LatticeModel::validate() const {
    if (auto v = check()) throw InvalidModelError(v->describe(), v->index);
}

std::vector<Vec3> LatticeModel::euclidean() const {
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(spec.to_euclidean(p));
    return out;
}

std::size_t count_discrepancies(const LatticeModel& a, const LatticeModel& b) {
    if (a.size() != b.size()) throw ArgumentError("models differ in length");
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a.points[i] != b.points[i];
    return n;
}

}  // namespace latrefine
