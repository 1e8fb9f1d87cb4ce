#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "latrefine/geometry.hpp"
#include "latrefine/lattice.hpp"

namespace latrefine {

/// Backbone trace: ordered C-alpha coordinates in Angstrom.
struct CaTrace {
    std::vector<Vec3> coords;
    std::string id;
    /// Three-letter residue names parallel to `coords`; may be empty.
    std::vector<std::string> residue_names;

    std::size_t size() const { return coords.size(); }
};

struct SawViolation {
    enum class Kind { OffLattice, NotContiguous, SelfIntersection };
    Kind kind;
    /// Offending residue (for NotContiguous: the later of the two).
    std::size_t index;
    /// For SelfIntersection: the earlier residue occupying the same node.
    std::size_t other = 0;

    std::string describe() const;
};

/// Ordered lattice nodes representing a backbone. Intended to be a
/// self-avoiding walk; `check()` reports the first violation.
struct LatticeModel {
    std::vector<LatticePoint> points;
    LatticeSpec spec = LatticeSpec::fcc();

    std::size_t size() const { return points.size(); }

    std::optional<SawViolation> check() const;
    bool is_saw() const { return !check().has_value(); }
    /// Throws InvalidModelError naming the violated invariant and index.
    void validate() const;

    std::vector<Vec3> euclidean() const;

    friend bool operator==(const LatticeModel& a, const LatticeModel& b) {
        return a.spec == b.spec && a.points == b.points;
    }
};

/// Number of residues placed differently in `a` and `b` (equal lengths).
std::size_t count_discrepancies(const LatticeModel& a, const LatticeModel& b);

}  // namespace latrefine
