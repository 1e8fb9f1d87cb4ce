#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latrefine/geometry.hpp"
#include "latrefine/lattice.hpp"
#include "latrefine/model.hpp"

namespace latrefine {

enum class SearchStrategy { Brute, BranchAndBound, Lds };

std::string_view to_string(SearchStrategy s);
std::optional<SearchStrategy> parse_strategy(std::string_view name);

struct RefineConfig {
    /// Relaxation radius in lattice units.
    int d_max = 1;
    /// Maximum number of residues placed differently from the initial model (LDS only).
    int k = 4;
    SearchStrategy strategy = SearchStrategy::Lds;
    /// Angstrom per unit of d_max.
    double f_scale = kCaCaDistance;
    /// Wall-clock limit in seconds; unset means run to completion.
    std::optional<double> time_limit;
    /// Run a forward/backward contiguity pass over the whole unassigned
    /// suffix at every node instead of only pruning the next variable.
    bool full_arc_consistency = false;
    /// Prune branch-and-bound with the bounding-box lower bound.
    bool use_bound = true;
    /// Also prune LDS with the bound; the optimum within the cap is unchanged.
    bool lds_bound = false;
    /// Brute force refuses instances whose contiguous-walk count exceeds this.
    double brute_force_limit = 1e8;
};

/// Integer axis-aligned box in the lattice frame.
struct LatticeBox {
    LatticePoint lo;
    LatticePoint hi;

    static LatticeBox around(std::span<const LatticePoint> pts);
    static LatticeBox point(const LatticePoint& p) { return {p, p}; }
};

/// Achievable Euclidean distance range (Angstrom) between any point of `a`
/// and any point of `b`, relaxed to real space.
std::pair<double, double> distance_range(const LatticeBox& a, const LatticeBox& b, double unit_scale);

/// Refinement problem: one variable per residue, each ranging over the
/// lattice sphere of radius f_scale * d_max around the initial position.
/// Domain values are ordered by distance from the initial position (so the
/// initial position is always value 0), ties lexicographic.
class CopInstance {
public:
    std::size_t size() const { return domains_.size(); }
    const LatticeSpec& spec() const { return initial_.spec; }
    const LatticeModel& initial_model() const { return initial_; }
    std::span<const Vec3> trace() const { return trace_; }
    const RefineConfig& config() const { return config_; }

    std::span<const LatticePoint> domain(std::size_t i) const { return domains_[i]; }
    const LatticeBox& domain_box(std::size_t i) const { return boxes_[i]; }
    /// Target pair distance |P_j - P_i| in Angstrom.
    double target(std::size_t i, std::size_t j) const { return targets_[i * size() + j]; }

    /// Indices into domain(i+1) adjacent to domain(i)[a], ascending.
    std::span<const std::uint32_t> successors(std::size_t i, std::size_t a) const {
        return succ_[i][a];
    }
    /// (earlier variable, value index) pairs whose value equals domain(i)[a].
    struct Clash {
        std::uint32_t var;
        std::uint32_t value;
    };
    std::span<const Clash> earlier_clashes(std::size_t i, std::size_t a) const { return clashes_[i][a]; }
    /// Later variables j whose initial position equals domain(i)[a].
    std::span<const std::uint32_t> blocks_initial_of(std::size_t i, std::size_t a) const {
        return blocks_[i][a];
    }

    /// Lattice distance in Angstrom from integer squared length, via lookup.
    double lattice_distance(const LatticePoint& a, const LatticePoint& b) const;

    /// Sum over i<j of (|X_j - X_i| - |P_j - P_i|)^2 for a complete assignment.
    double objective(std::span<const LatticePoint> points) const;
    double initial_objective() const { return initial_objective_; }

    /// Pair term contribution of placing `p` at position `k` against `placed[0..k)`.
    double added_terms(std::span<const LatticePoint> placed, std::size_t k, const LatticePoint& p) const;

    /// Upper estimate of the number of complete assignments satisfying
    /// contiguity (self-avoidance ignored).
    double contiguous_walk_count() const;

private:
    friend CopInstance build_cop(const CaTrace&, const LatticeModel&, const RefineConfig&);
    CopInstance() = default;

    LatticeModel initial_;
    std::vector<Vec3> trace_;
    RefineConfig config_;
    std::vector<std::vector<LatticePoint>> domains_;
    std::vector<LatticeBox> boxes_;
    std::vector<double> targets_;
    std::vector<std::vector<std::vector<std::uint32_t>>> succ_;
    std::vector<std::vector<std::vector<Clash>>> clashes_;
    std::vector<std::vector<std::vector<std::uint32_t>>> blocks_;
    std::vector<double> sqrt_table_;
    double initial_objective_ = 0.0;
};

/// Throws ArgumentError on length mismatch or bad config and
/// InvalidModelError when `model` is not a self-avoiding walk.
CopInstance build_cop(const CaTrace& trace, const LatticeModel& model, const RefineConfig& config);

struct Propagation {
    bool failed = false;
    /// Variable whose domain emptied (valid when failed).
    std::size_t failed_var = 0;
    /// Pruned domains of the unassigned variables prefix.size() .. n-1.
    std::vector<std::vector<LatticePoint>> domains;
};

/// Prunes the domains after assigning `prefix` to X_1..X_k: the next domain
/// keeps only unoccupied neighbors of X_k, later domains drop occupied
/// values. With `full_arc_consistency` contiguity is enforced forward and
/// backward along the whole suffix.
Propagation propagate(const CopInstance& instance, std::span<const LatticePoint> prefix,
                      bool full_arc_consistency = false);

/// Admissible bound on the objective of any completion of `prefix`: exact
/// terms for assigned pairs, and for every other pair the squared gap between
/// its target distance and the achievable range of the (point or box)
/// regions. Returns +inf when the next variable has no legal value.
double lower_bound(const CopInstance& instance, std::span<const LatticePoint> prefix);

struct TrajectoryPoint {
    double seconds;
    double objective;
};

struct SearchStats {
    std::uint64_t nodes = 0;
    std::uint64_t failures = 0;
    std::uint64_t leaves = 0;
    std::uint64_t pruned_by_bound = 0;
    std::vector<TrajectoryPoint> trajectory;
    double elapsed_seconds = 0.0;
    bool complete = true;
};

struct SearchResult {
    LatticeModel model;
    double objective = 0.0;
    double drmsd = 0.0;
    std::size_t discrepancies = 0;
    SearchStats stats;

    bool improved(const CopInstance& instance) const { return objective < instance.initial_objective(); }
};

/// Depth-first branch-and-bound seeded with the initial model. Returns the
/// optimum over the domains when it completes, else the incumbent with
/// stats.complete = false.
SearchResult bnb_search(const CopInstance& instance, std::optional<double> time_limit = std::nullopt,
                        bool use_bound = true);

/// Exhaustive search over assignments with at most `k` residues placed away
/// from their initial position.
SearchResult lds_search(const CopInstance& instance, std::size_t k, std::optional<double> time_limit = std::nullopt,
                        bool use_bound = false);

/// Plain enumeration of contiguous walks in the domains, filtered for
/// self-avoidance and scored from scratch. Throws InstanceTooLargeError
/// above config().brute_force_limit walks.
SearchResult brute_force(const CopInstance& instance);

/// Runs the strategy, time limit and pruning options of instance.config().
SearchResult run_search(const CopInstance& instance);

/// Builds the instance and runs the configured strategy.
SearchResult refine(const CaTrace& trace, const LatticeModel& model, const RefineConfig& config);

}  // namespace latrefine
