#include "latrefine/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "latrefine/errors.hpp"

namespace latrefine {

double squared_deviation_sum(std::span<const Vec3> a, std::span<const Vec3> b, std::size_t k) {
    if (k > a.size() || k > b.size()) throw ArgumentError("prefix length exceeds structure length");
    double sum = 0.0;
    for (std::size_t j = 1; j < k; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const double d = distance(a[i], a[j]) - distance(b[i], b[j]);
            sum += d * d;
        }
    }
    return sum;
}

double drmsd_from_objective(double squared_sum, std::size_t n) {
    if (n < 2) return 0.0;
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return std::sqrt(squared_sum / pairs);
}

double drmsd(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.size() != b.size()) throw ArgumentError("dRMSD needs structures of equal length");
    if (a.size() < 2) throw ArgumentError("dRMSD needs at least two residues");
    return drmsd_from_objective(squared_deviation_sum(a, b), a.size());
}

double drmsd(const LatticeModel& model, const CaTrace& trace) {
    const auto coords = model.euclidean();
    return drmsd(coords, trace.coords);
}

double drmsd_partial(const LatticeModel& model, const CaTrace& trace, std::size_t k) {
    if (k > model.size() || k > trace.size()) throw ArgumentError("prefix length exceeds structure length");
    if (k < 2) return 0.0;
    std::vector<Vec3> coords;
    coords.reserve(k);
    for (std::size_t i = 0; i < k; ++i) coords.push_back(model.spec.to_euclidean(model.points[i]));
    return drmsd_from_objective(squared_deviation_sum(coords, trace.coords, k), k);
}

double PairDeviationAccumulator::delta(const Vec3& p) const {
    const std::size_t k = placed_.size();
    if (k >= target_.size()) throw ArgumentError("accumulator already holds the full target");
    double add = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double d = distance(placed_[i], p) - distance(target_[i], target_[k]);
        add += d * d;
    }
    return add;
}

void PairDeviationAccumulator::push(const Vec3& p) {
    const double add = delta(p);
    sums_.push_back(sum() + add);
    placed_.push_back(p);
}

void PairDeviationAccumulator::pop() {
    if (placed_.empty()) return;
    placed_.pop_back();
    sums_.pop_back();
}

Vec3 RigidTransform::apply(const Vec3& p) const {
    const auto& r = rotation;
    return {r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + translation.x,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + translation.y,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + translation.z};
}

std::vector<Vec3> RigidTransform::apply(std::span<const Vec3> pts) const {
    std::vector<Vec3> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(apply(p));
    return out;
}

bool RigidTransform::is_identity(double tol) const {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(rotation[i][j] - (i == j ? 1.0 : 0.0)) > tol) return false;
    return translation.norm() <= tol;
}

double coordinate_rmsd(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.size() != b.size()) throw ArgumentError("cRMSD needs structures of equal length");
    if (a.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).norm2();
    return std::sqrt(sum / static_cast<double>(a.size()));
}

namespace {

Vec3 centroid(std::span<const Vec3> pts) {
    Vec3 c;
    for (const auto& p : pts) c += p;
    return c * (1.0 / static_cast<double>(pts.size()));
}

}  // namespace

Superposition superpose(std::span<const Vec3> mobile, std::span<const Vec3> target) {
    if (mobile.size() != target.size()) throw ArgumentError("superposition needs structures of equal length");
    if (mobile.empty()) throw ArgumentError("superposition needs at least one point");

    const Vec3 cm = centroid(mobile);
    const Vec3 ct = centroid(target);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < mobile.size(); ++i) {
        const Vec3 a = mobile[i] - cm;
        const Vec3 b = target[i] - ct;
        cov += Eigen::Vector3d(a.x, a.y, a.z) * Eigen::Vector3d(b.x, b.y, b.z).transpose();
    }

    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    if (cov.norm() > 1e-12) {
        Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::Matrix3d& u = svd.matrixU();
        const Eigen::Matrix3d& v = svd.matrixV();
        Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
        // reflection correction
        if ((v * u.transpose()).determinant() < 0.0) fix(2, 2) = -1.0;
        rot = v * fix * u.transpose();
    }

    Superposition out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.transform.rotation[i][j] = rot(i, j);
    const Eigen::Vector3d shift =
        Eigen::Vector3d(ct.x, ct.y, ct.z) - rot * Eigen::Vector3d(cm.x, cm.y, cm.z);
    out.transform.translation = {shift.x(), shift.y(), shift.z()};

    const auto moved = out.transform.apply(mobile);
    out.crmsd = coordinate_rmsd(moved, target);
    return out;
}

Superposition superpose_crmsd(const LatticeModel& model, const CaTrace& trace) {
    const auto coords = model.euclidean();
    return superpose(coords, trace.coords);
}

}  // namespace latrefine
