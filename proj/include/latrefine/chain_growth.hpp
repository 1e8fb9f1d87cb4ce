#pragma once

#include <cstddef>

#include "latrefine/lattice.hpp"
#include "latrefine/model.hpp"

namespace latrefine {

inline constexpr std::size_t kDefaultBeamWidth = 100;

struct ChainGrowthStats {
    /// Partial models scored over the whole run.
    std::size_t candidates = 0;
    /// Largest number of candidates seen at a single elongation step.
    std::size_t widest_step = 0;
};

/// Greedy N-to-C chain growth keeping the `beam_width` best partial models
/// (by squared pair-distance deviation over the placed prefix) after every
/// elongation. Residue 1 sits at the origin and prefixes equivalent under a
/// lattice point symmetry are grown only once. Deterministic; ties are broken
/// by lexicographic point order.
///
/// Throws ArgumentError for an empty trace or zero width and
/// BeamExhaustedError when no entry can be extended.
LatticeModel greedy_fit(const CaTrace& trace, const LatticeSpec& spec, std::size_t beam_width = kDefaultBeamWidth,
                        ChainGrowthStats* stats = nullptr);

}  // namespace latrefine
