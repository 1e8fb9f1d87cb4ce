#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "latrefine/geometry.hpp"
#include "latrefine/model.hpp"

namespace latrefine {

/// Sum over pairs i<j<k of (|a_j-a_i| - |b_j-b_i|)^2. This un-normalized sum is
/// the objective minimized by chain growth and refinement.
double squared_deviation_sum(std::span<const Vec3> a, std::span<const Vec3> b, std::size_t k);
inline double squared_deviation_sum(std::span<const Vec3> a, std::span<const Vec3> b) {
    return squared_deviation_sum(a, b, a.size());
}

/// dRMSD of an objective sum over the first `n` residues; 0 when n < 2.
double drmsd_from_objective(double squared_sum, std::size_t n);

/// Distance RMSD between two coordinate lists of equal length n >= 2.
double drmsd(std::span<const Vec3> a, std::span<const Vec3> b);
double drmsd(const LatticeModel& model, const CaTrace& trace);

/// dRMSD restricted to the first k residues. The model may be a prefix of
/// length >= k. Defined as 0 for k < 2.
double drmsd_partial(const LatticeModel& model, const CaTrace& trace, std::size_t k);

/// Streaming form of squared_deviation_sum: residues are appended one at a
/// time against a fixed target, each push adding the pairs it closes.
class PairDeviationAccumulator {
public:
    explicit PairDeviationAccumulator(std::span<const Vec3> target) : target_(target) {}

    /// Contribution `p` would add if pushed next.
    double delta(const Vec3& p) const;
    void push(const Vec3& p);
    void pop();

    std::size_t size() const { return placed_.size(); }
    double sum() const { return sums_.empty() ? 0.0 : sums_.back(); }
    double drmsd() const { return drmsd_from_objective(sum(), placed_.size()); }

private:
    std::span<const Vec3> target_;
    std::vector<Vec3> placed_;
    std::vector<double> sums_;
};

struct RigidTransform {
    std::array<std::array<double, 3>, 3> rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    Vec3 translation{};

    Vec3 apply(const Vec3& p) const;
    std::vector<Vec3> apply(std::span<const Vec3> pts) const;
    bool is_identity(double tol = 1e-12) const;
};

struct Superposition {
    RigidTransform transform;
    double crmsd = 0.0;
};

/// Plain coordinate RMSD without any fitting.
double coordinate_rmsd(std::span<const Vec3> a, std::span<const Vec3> b);

/// Least-squares rigid fit (proper rotation + translation) of `mobile` onto
/// `target` and the resulting coordinate RMSD. Coincident input points yield
/// the identity rotation.
Superposition superpose(std::span<const Vec3> mobile, std::span<const Vec3> target);
Superposition superpose_crmsd(const LatticeModel& model, const CaTrace& trace);

}  // namespace latrefine
