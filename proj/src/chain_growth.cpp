#include "latrefine/chain_growth.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "latrefine/errors.hpp"
#include "latrefine/metrics.hpp"

namespace latrefine {

namespace {

struct BeamEntry {
    std::vector<LatticePoint> points;
    double score = 0.0;
    /// Point symmetries (bit i = point_symmetries()[i]) fixing every placed node.
    std::uint64_t stabilizer = 0;
};

struct Candidate {
    std::size_t parent;
    LatticePoint next;
    double score;
    std::uint64_t stabilizer;
};

std::uint64_t full_group_mask() {
    const auto n = point_symmetries().size();
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

int determinant(const PointSymmetry& g) {
    // parity of the axis permutation times the product of the signs
    const auto& a = g.axis;
    int inversions = (a[0] > a[1]) + (a[0] > a[2]) + (a[1] > a[2]);
    return (inversions % 2 == 0 ? 1 : -1) * g.sign[0] * g.sign[1] * g.sign[2];
}

// dRMSD cannot distinguish mirror images; pick the handedness whose
// superposition onto the trace is closer. The reflection fixes residues 1
// and 2, and residue 3 too when the lattice allows it.
void fix_handedness(LatticeModel& model, const CaTrace& trace) {
    if (model.size() < 4) return;
    const PointSymmetry* mirror = nullptr;
    for (const auto& g : point_symmetries()) {
        if (determinant(g) > 0 || g.apply(model.points[1]) != model.points[1]) continue;
        if (mirror == nullptr) mirror = &g;
        if (g.apply(model.points[2]) == model.points[2]) {
            mirror = &g;
            break;
        }
    }
    if (mirror == nullptr) return;
    LatticeModel mirrored{{}, model.spec};
    mirrored.points.reserve(model.size());
    for (const auto& p : model.points) mirrored.points.push_back(mirror->apply(p));
    if (superpose_crmsd(mirrored, trace).crmsd < superpose_crmsd(model, trace).crmsd - 1e-9)
        model = std::move(mirrored);
}

bool occupied(const std::vector<LatticePoint>& pts, const LatticePoint& p) {
    return std::find(pts.begin(), pts.end(), p) != pts.end();
}

}  // namespace

LatticeModel greedy_fit(const CaTrace& trace, const LatticeSpec& spec, std::size_t beam_width,
                        ChainGrowthStats* stats) {
    const std::size_t n = trace.size();
    if (n == 0) throw ArgumentError("cannot fit an empty trace");
    if (beam_width == 0) throw ArgumentError("beam width must be positive");

    std::vector<double> target(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) target[i * n + j] = distance(trace.coords[i], trace.coords[j]);

    const auto group = point_symmetries();
    std::vector<BeamEntry> beam(1);
    beam[0].points.push_back({0, 0, 0});
    beam[0].stabilizer = full_group_mask();

    ChainGrowthStats local;
    std::vector<Candidate> candidates;
    for (std::size_t k = 1; k < n; ++k) {
        candidates.clear();
        for (std::size_t b = 0; b < beam.size(); ++b) {
            const BeamEntry& entry = beam[b];
            const LatticePoint last = entry.points.back();
            for (const LatticePoint& step : spec.neighbors()) {
                const LatticePoint p = last + step;
                if (occupied(entry.points, p)) continue;

                // keep only the orbit representative under the prefix stabilizer
                bool canonical = true;
                std::uint64_t fixing = 0;
                for (std::size_t g = 0; g < group.size() && canonical; ++g) {
                    if (!(entry.stabilizer >> g & 1)) continue;
                    const LatticePoint image = group[g].apply(p);
                    if (image > p) canonical = false;
                    if (image == p) fixing |= std::uint64_t{1} << g;
                }
                if (!canonical) continue;

                double add = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    const double d = spec.distance(entry.points[i], p) - target[i * n + k];
                    add += d * d;
                }
                candidates.push_back({b, p, entry.score + add, fixing});
            }
        }
        if (candidates.empty()) {
            throw BeamExhaustedError("chain growth beam exhausted at residue " + std::to_string(k + 1), k);
        }
        local.candidates += candidates.size();
        local.widest_step = std::max(local.widest_step, candidates.size());

        const auto better = [&](const Candidate& a, const Candidate& c) {
            if (a.score != c.score) return a.score < c.score;
            const auto& pa = beam[a.parent].points;
            const auto& pc = beam[c.parent].points;
            if (a.parent != c.parent && pa != pc)
                return std::lexicographical_compare(pa.begin(), pa.end(), pc.begin(), pc.end());
            return a.next < c.next;
        };
        const std::size_t keep = std::min(beam_width, candidates.size());
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                          candidates.end(), better);

        std::vector<BeamEntry> next;
        next.reserve(keep);
        for (std::size_t c = 0; c < keep; ++c) {
            const Candidate& cand = candidates[c];
            BeamEntry e;
            e.points.reserve(k + 1);
            e.points = beam[cand.parent].points;
            e.points.push_back(cand.next);
            e.score = cand.score;
            e.stabilizer = cand.stabilizer;
            next.push_back(std::move(e));
        }
        beam = std::move(next);
    }

    if (stats != nullptr) *stats = local;
    LatticeModel model{std::move(beam.front().points), spec};
    fix_handedness(model, trace);
    model.validate();
    return model;
}

}  // namespace latrefine
