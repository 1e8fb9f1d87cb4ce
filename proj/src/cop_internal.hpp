#pragma once

#include <span>

#include "latrefine/refine.hpp"

namespace latrefine::detail {

/// (lo - t)^2 or (t - hi)^2 when `t` falls outside [lo, hi], else 0.
inline double range_gap2(double lo, double hi, double t) {
    if (t < lo) return (lo - t) * (lo - t);
    if (t > hi) return (t - hi) * (t - hi);
    return 0.0;
}

/// Relaxed part of lower_bound: every pair with at least one unassigned
/// variable, where the next variable is confined to `next_box`, and later ones
/// to their full domain boxes.
double relaxed_pair_bound(const CopInstance& instance, std::span<const LatticePoint> prefix,
                          const LatticeBox& next_box, std::span<const double> suffix_pairs);

/// suffix[m] = relaxed bound over pairs i<j with both i, j >= m, using the
/// full domain boxes. Size n + 1.
std::vector<double> suffix_box_pairs(const CopInstance& instance);

}  // namespace latrefine::detail
