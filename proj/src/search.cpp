#include <chrono>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "cop_internal.hpp"
#include "latrefine/errors.hpp"
#include "latrefine/metrics.hpp"
#include "latrefine/refine.hpp"

namespace latrefine {

namespace {

using Clock = std::chrono::steady_clock;

// Minimum objective decrease that replaces the incumbent.
constexpr double kImprovement = 1e-12;

class Searcher {
public:
    Searcher(const CopInstance& inst, std::size_t discrepancy_cap, bool use_bound, std::optional<double> time_limit)
        : inst_(inst),
          n_(inst.size()),
          cap_(discrepancy_cap),
          use_bound_(use_bound),
          full_ac_(inst.config().full_arc_consistency),
          start_(Clock::now()) {
        if (time_limit) deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                                                 std::chrono::duration<double>(*time_limit));
        assign_.assign(n_, 0);
        points_.assign(n_, LatticePoint{});
        partial_.assign(n_, 0.0);
        disc_.assign(n_, 0);
        blocked_.assign(n_, 0);
        blocked_upto_.assign(n_, 0);
        cand_.resize(n_);
        best_obj_ = inst.initial_objective();
        best_points_ = inst.initial_model().points;
        if (use_bound_) suffix_ = detail::suffix_box_pairs(inst);
    }

    SearchResult run() {
        descend(0);
        SearchResult r;
        r.model = LatticeModel{best_points_, inst_.spec()};
        r.objective = best_obj_;
        r.drmsd = drmsd_from_objective(best_obj_, n_);
        r.discrepancies = count_discrepancies(r.model, inst_.initial_model());
        stats_.elapsed_seconds = seconds();
        stats_.complete = !aborted_;
        r.stats = std::move(stats_);
        r.model.validate();
        return r;
    }

private:
    double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

    bool occupied(std::size_t level, std::uint32_t value) const {
        for (const auto& c : inst_.earlier_clashes(level, value))
            if (assign_[c.var] == c.value) return true;
        return false;
    }

    std::size_t discrepancies_before(std::size_t level) const { return level == 0 ? 0 : disc_[level - 1]; }

    // Whether a contiguous, collision-free completion of levels [level, n)
    // exists; on success narrows `cands` to values that start one.
    bool suffix_supported(std::size_t level, std::vector<std::uint32_t>& cands) {
        std::vector<std::vector<char>> reach(n_ - level);
        reach[0].assign(inst_.domain(level).size(), 0);
        for (auto a : cands) reach[0][a] = 1;
        for (std::size_t t = 1; t < reach.size(); ++t) {
            const std::size_t j = level + t;
            reach[t].assign(inst_.domain(j).size(), 0);
            bool any = false;
            for (std::uint32_t a = 0; a < reach[t - 1].size(); ++a) {
                if (!reach[t - 1][a]) continue;
                for (auto b : inst_.successors(j - 1, a)) {
                    if (reach[t][b] || occupied(j, b)) continue;
                    reach[t][b] = 1;
                    any = true;
                }
            }
            if (!any) return false;
        }
        for (std::size_t t = reach.size() - 1; t-- > 0;) {
            const std::size_t j = level + t;
            for (std::uint32_t a = 0; a < reach[t].size(); ++a) {
                if (!reach[t][a]) continue;
                bool supported = false;
                for (auto b : inst_.successors(j, a))
                    if (reach[t + 1][b]) {
                        supported = true;
                        break;
                    }
                if (!supported) reach[t][a] = 0;
            }
        }
        std::erase_if(cands, [&](std::uint32_t a) { return !reach[0][a]; });
        return !cands.empty();
    }

    void descend(std::size_t level) {
        if (aborted_) return;
        if (level == n_) {
            ++stats_.leaves;
            const double obj = n_ == 0 ? 0.0 : partial_[n_ - 1];
            if (obj < best_obj_ - kImprovement) {
                best_obj_ = obj;
                best_points_ = points_;
                stats_.trajectory.push_back({seconds(), obj});
            }
            return;
        }

        auto& cands = cand_[level];
        cands.clear();
        const std::size_t disc = discrepancies_before(level);
        const auto consider = [&](std::uint32_t a) {
            if (a != 0 && disc + 1 > cap_) return;
            if (!occupied(level, a)) cands.push_back(a);
        };
        if (level == 0) {
            for (std::uint32_t a = 0; a < inst_.domain(0).size(); ++a) consider(a);
        } else {
            for (auto a : inst_.successors(level - 1, assign_[level - 1])) consider(a);
        }
        if (cands.empty()) {
            ++stats_.failures;
            return;
        }
        if (full_ac_ && !suffix_supported(level, cands)) {
            ++stats_.failures;
            return;
        }

        const double prev = level == 0 ? 0.0 : partial_[level - 1];
        if (use_bound_) {
            LatticeBox box = LatticeBox::point(inst_.domain(level)[cands.front()]);
            for (auto a : cands) {
                const auto& p = inst_.domain(level)[a];
                box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
                box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y), std::max(box.hi.z, p.z)};
            }
            const std::span<const LatticePoint> prefix(points_.data(), level);
            const double bound = prev + detail::relaxed_pair_bound(inst_, prefix, box, suffix_);
            if (bound >= best_obj_ - kImprovement) {
                ++stats_.pruned_by_bound;
                return;
            }
        }

        for (auto a : cands) {
            if ((++stats_.nodes & 1023) == 0 && deadline_ && Clock::now() >= *deadline_) {
                aborted_ = true;
                return;
            }
            const LatticePoint p = inst_.domain(level)[a];
            assign_[level] = a;
            points_[level] = p;
            partial_[level] = prev + inst_.added_terms(points_, level, p);
            disc_[level] = disc + (a != 0);

            for (auto j : inst_.blocks_initial_of(level, a)) {
                ++blocked_[j];
                ++blocked_total_;
            }
            blocked_upto_[level] = (level == 0 ? 0 : blocked_upto_[level - 1]) + blocked_[level];

            bool viable = true;
            if (cap_ < n_) {
                // discrepancies already forced on later residues
                std::size_t forced = blocked_total_ - blocked_upto_[level];
                if (level + 1 < n_ && blocked_[level + 1] == 0 &&
                    !inst_.spec().are_neighbors(p, inst_.initial_model().points[level + 1]))
                    ++forced;
                viable = disc_[level] + forced <= cap_;
            }
            if (viable) {
                descend(level + 1);
            } else {
                ++stats_.failures;
            }

            for (auto j : inst_.blocks_initial_of(level, a)) {
                --blocked_[j];
                --blocked_total_;
            }
            if (aborted_) return;
        }
    }

    const CopInstance& inst_;
    std::size_t n_;
    std::size_t cap_;
    bool use_bound_;
    bool full_ac_;
    Clock::time_point start_;
    std::optional<Clock::time_point> deadline_;
    bool aborted_ = false;

    std::vector<std::uint32_t> assign_;
    std::vector<LatticePoint> points_;
    std::vector<double> partial_;
    std::vector<std::size_t> disc_;
    std::vector<int> blocked_;
    std::vector<std::size_t> blocked_upto_;
    std::size_t blocked_total_ = 0;
    std::vector<std::vector<std::uint32_t>> cand_;
    std::vector<double> suffix_;

    double best_obj_;
    std::vector<LatticePoint> best_points_;
    SearchStats stats_;
};

}  // namespace

SearchResult bnb_search(const CopInstance& instance, std::optional<double> time_limit, bool use_bound) {
    Searcher s(instance, std::numeric_limits<std::size_t>::max(), use_bound, time_limit);
    return s.run();
}

SearchResult lds_search(const CopInstance& instance, std::size_t k, std::optional<double> time_limit,
                        bool use_bound) {
    Searcher s(instance, k, use_bound, time_limit);
    return s.run();
}

SearchResult brute_force(const CopInstance& instance) {
    const double walks = instance.contiguous_walk_count();
    if (walks > instance.config().brute_force_limit) {
        std::ostringstream msg;
        msg << "brute force refused: ~" << walks << " contiguous walks exceed the limit of "
            << instance.config().brute_force_limit;
        throw InstanceTooLargeError(msg.str(), walks);
    }

    const auto start = Clock::now();
    const std::size_t n = instance.size();
    const LatticeSpec& spec = instance.spec();
    const std::vector<Vec3> trace(instance.trace().begin(), instance.trace().end());

    SearchResult best;
    best.model = instance.initial_model();
    best.objective = instance.initial_objective();

    std::vector<LatticePoint> walk;
    walk.reserve(n);
    const auto score = [&] {
        std::unordered_set<LatticePoint, LatticePointHash> seen(walk.begin(), walk.end());
        if (seen.size() != walk.size()) {
            ++best.stats.failures;
            return;
        }
        ++best.stats.leaves;
        std::vector<Vec3> coords;
        coords.reserve(n);
        for (const auto& p : walk) coords.push_back(spec.to_euclidean(p));
        const double obj = squared_deviation_sum(coords, trace);
        if (obj < best.objective - kImprovement) {
            best.objective = obj;
            best.model.points = walk;
            best.stats.trajectory.push_back({std::chrono::duration<double>(Clock::now() - start).count(), obj});
        }
    };
    const auto enumerate = [&](auto&& self, std::size_t level) -> void {
        if (level == n) {
            score();
            return;
        }
        for (const auto& v : instance.domain(level)) {
            if (level > 0 && !spec.are_neighbors(walk.back(), v)) continue;
            ++best.stats.nodes;
            walk.push_back(v);
            self(self, level + 1);
            walk.pop_back();
        }
    };
    enumerate(enumerate, 0);

    best.drmsd = drmsd_from_objective(best.objective, n);
    best.discrepancies = count_discrepancies(best.model, instance.initial_model());
    best.stats.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    best.model.validate();
    return best;
}

SearchResult run_search(const CopInstance& instance) {
    const RefineConfig& config = instance.config();
    switch (config.strategy) {
        case SearchStrategy::Brute:
            return brute_force(instance);
        case SearchStrategy::BranchAndBound:
            return bnb_search(instance, config.time_limit, config.use_bound);
        case SearchStrategy::Lds:
            return lds_search(instance, static_cast<std::size_t>(config.k), config.time_limit, config.lds_bound);
    }
    throw ArgumentError("unknown search strategy");
}

SearchResult refine(const CaTrace& trace, const LatticeModel& model, const RefineConfig& config) {
    return run_search(build_cop(trace, model, config));
}

}  // namespace latrefine
