#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "cop_internal.hpp"
#include "latrefine/errors.hpp"
#include "latrefine/refine.hpp"

namespace latrefine {

std::string_view to_string(SearchStrategy s) {
    switch (s) {
        case SearchStrategy::Brute:
            return "brute";
        case SearchStrategy::BranchAndBound:
            return "bnb";
        case SearchStrategy::Lds:
            return "lds";
    }
    return "unknown";
}

std::optional<SearchStrategy> parse_strategy(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "brute") return SearchStrategy::Brute;
    if (lower == "bnb") return SearchStrategy::BranchAndBound;
    if (lower == "lds") return SearchStrategy::Lds;
    return std::nullopt;
}

LatticeBox LatticeBox::around(std::span<const LatticePoint> pts) {
    if (pts.empty()) throw ArgumentError("bounding box of an empty point set");
    LatticeBox box{pts.front(), pts.front()};
    for (const auto& p : pts) {
        box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
        box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y), std::max(box.hi.z, p.z)};
    }
    return box;
}

std::pair<double, double> distance_range(const LatticeBox& a, const LatticeBox& b, double unit_scale) {
    const auto axis = [](int alo, int ahi, int blo, int bhi) {
        const double gap = std::max({0, blo - ahi, alo - bhi});
        const double far = std::max(std::abs(bhi - alo), std::abs(ahi - blo));
        return std::pair<double, double>{gap, far};
    };
    const auto [gx, fx] = axis(a.lo.x, a.hi.x, b.lo.x, b.hi.x);
    const auto [gy, fy] = axis(a.lo.y, a.hi.y, b.lo.y, b.hi.y);
    const auto [gz, fz] = axis(a.lo.z, a.hi.z, b.lo.z, b.hi.z);
    return {unit_scale * std::sqrt(gx * gx + gy * gy + gz * gz), unit_scale * std::sqrt(fx * fx + fy * fy + fz * fz)};
}

CopInstance build_cop(const CaTrace& trace, const LatticeModel& model, const RefineConfig& config) {
    const std::size_t n = model.size();
    if (trace.size() != n) throw ArgumentError("trace and model differ in length");
    if (n == 0) throw ArgumentError("cannot refine an empty model");
    if (config.d_max < 0 || config.k < 0) throw ArgumentError("d_max and K must be non-negative");
    if (!(config.f_scale > 0.0)) throw ArgumentError("f_scale must be positive");
    model.validate();

    CopInstance inst;
    inst.initial_ = model;
    inst.trace_ = trace.coords;
    inst.config_ = config;

    const double radius = config.f_scale * config.d_max;
    inst.domains_.reserve(n);
    for (const auto& m : model.points) inst.domains_.push_back(enumerate_sphere(m, radius, model.spec));
    for (const auto& d : inst.domains_) inst.boxes_.push_back(LatticeBox::around(d));

    inst.targets_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inst.targets_[i * n + j] = distance(trace.coords[i], trace.coords[j]);

    // adjacency between consecutive domains
    inst.succ_.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::unordered_map<LatticePoint, std::uint32_t, LatticePointHash> next_index;
        const auto& next = inst.domains_[i + 1];
        for (std::uint32_t b = 0; b < next.size(); ++b) next_index.emplace(next[b], b);
        auto& lists = inst.succ_[i];
        lists.resize(inst.domains_[i].size());
        for (std::size_t a = 0; a < inst.domains_[i].size(); ++a) {
            for (const auto& step : model.spec.neighbors()) {
                auto it = next_index.find(inst.domains_[i][a] + step);
                if (it != next_index.end()) lists[a].push_back(it->second);
            }
            std::sort(lists[a].begin(), lists[a].end());
        }
    }
    inst.succ_[n - 1].resize(inst.domains_[n - 1].size());

    // value clashes with earlier variables, and which initial positions a value blocks
    std::unordered_map<LatticePoint, std::vector<CopInstance::Clash>, LatticePointHash> owners;
    std::unordered_map<LatticePoint, std::uint32_t, LatticePointHash> initial_owner;
    for (std::uint32_t j = 0; j < n; ++j) initial_owner.emplace(model.points[j], j);
    inst.clashes_.resize(n);
    inst.blocks_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto& dom = inst.domains_[i];
        inst.clashes_[i].resize(dom.size());
        inst.blocks_[i].resize(dom.size());
        for (std::uint32_t a = 0; a < dom.size(); ++a) {
            auto& list = owners[dom[a]];
            inst.clashes_[i][a] = list;
            list.push_back({i, a});
            auto it = initial_owner.find(dom[a]);
            if (it != initial_owner.end() && it->second > i) inst.blocks_[i][a].push_back(it->second);
        }
    }

    LatticeBox all = inst.boxes_.front();
    for (const auto& b : inst.boxes_) {
        all.lo = {std::min(all.lo.x, b.lo.x), std::min(all.lo.y, b.lo.y), std::min(all.lo.z, b.lo.z)};
        all.hi = {std::max(all.hi.x, b.hi.x), std::max(all.hi.y, b.hi.y), std::max(all.hi.z, b.hi.z)};
    }
    const auto max_norm2 = static_cast<std::size_t>((all.hi - all.lo).norm2());
    inst.sqrt_table_.resize(max_norm2 + 1);
    for (std::size_t q = 0; q <= max_norm2; ++q)
        inst.sqrt_table_[q] = model.spec.unit_scale() * std::sqrt(static_cast<double>(q));

    inst.initial_objective_ = inst.objective(model.points);
    return inst;
}

double CopInstance::lattice_distance(const LatticePoint& a, const LatticePoint& b) const {
    const auto q = static_cast<std::size_t>((a - b).norm2());
    if (q < sqrt_table_.size()) return sqrt_table_[q];
    return spec().unit_scale() * std::sqrt(static_cast<double>(q));
}

double CopInstance::added_terms(std::span<const LatticePoint> placed, std::size_t k, const LatticePoint& p) const {
    const std::size_t n = size();
    double add = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double d = lattice_distance(placed[i], p) - targets_[i * n + k];
        add += d * d;
    }
    return add;
}

double CopInstance::objective(std::span<const LatticePoint> points) const {
    if (points.size() != size()) throw ArgumentError("assignment does not cover every variable");
    double sum = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k) sum += added_terms(points, k, points[k]);
    return sum;
}

double CopInstance::contiguous_walk_count() const {
    std::vector<double> ways(domains_[0].size(), 1.0);
    for (std::size_t i = 0; i + 1 < size(); ++i) {
        std::vector<double> next(domains_[i + 1].size(), 0.0);
        for (std::size_t a = 0; a < ways.size(); ++a)
            for (auto b : succ_[i][a]) next[b] += ways[a];
        ways = std::move(next);
    }
    double total = 0.0;
    for (double w : ways) total += w;
    return total;
}

Propagation propagate(const CopInstance& instance, std::span<const LatticePoint> prefix,
                      bool full_arc_consistency) {
    const std::size_t n = instance.size();
    const std::size_t k = prefix.size();
    if (k > n) throw ArgumentError("prefix longer than the instance");

    Propagation out;
    const std::unordered_set<LatticePoint, LatticePointHash> occupied(prefix.begin(), prefix.end());
    const LatticeSpec& spec = instance.spec();

    for (std::size_t j = k; j < n; ++j) {
        std::vector<LatticePoint> kept;
        for (const auto& v : instance.domain(j)) {
            if (occupied.count(v)) continue;
            if (j == k && k > 0 && (v - prefix.back()).norm2() != spec.neighbor_norm2()) continue;
            kept.push_back(v);
        }
        out.domains.push_back(std::move(kept));
    }

    const auto adjacent = [&](const LatticePoint& a, const LatticePoint& b) {
        return (a - b).norm2() == spec.neighbor_norm2();
    };
    if (full_arc_consistency && out.domains.size() > 1) {
        for (std::size_t t = 1; t < out.domains.size(); ++t) {
            auto& cur = out.domains[t];
            const auto& prev = out.domains[t - 1];
            std::erase_if(cur, [&](const LatticePoint& v) {
                return std::none_of(prev.begin(), prev.end(), [&](const LatticePoint& u) { return adjacent(u, v); });
            });
        }
        for (std::size_t t = out.domains.size() - 1; t-- > 0;) {
            auto& cur = out.domains[t];
            const auto& next = out.domains[t + 1];
            std::erase_if(cur, [&](const LatticePoint& u) {
                return std::none_of(next.begin(), next.end(), [&](const LatticePoint& v) { return adjacent(u, v); });
            });
        }
    }

    for (std::size_t t = 0; t < out.domains.size(); ++t) {
        if (out.domains[t].empty()) {
            out.failed = true;
            out.failed_var = k + t;
            break;
        }
    }
    return out;
}

namespace detail {

std::vector<double> suffix_box_pairs(const CopInstance& instance) {
    const std::size_t n = instance.size();
    const double scale = instance.spec().unit_scale();
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t m = n; m-- > 0;) {
        double row = 0.0;
        for (std::size_t j = m + 1; j < n; ++j) {
            const auto [lo, hi] = distance_range(instance.domain_box(m), instance.domain_box(j), scale);
            row += range_gap2(lo, hi, instance.target(m, j));
        }
        suffix[m] = suffix[m + 1] + row;
    }
    return suffix;
}

double relaxed_pair_bound(const CopInstance& instance, std::span<const LatticePoint> prefix,
                          const LatticeBox& next_box, std::span<const double> suffix_pairs) {
    const std::size_t n = instance.size();
    const std::size_t k = prefix.size();
    const double scale = instance.spec().unit_scale();
    double bound = 0.0;

    const auto box_of = [&](std::size_t j) -> const LatticeBox& {
        return j == k ? next_box : instance.domain_box(j);
    };
    for (std::size_t i = 0; i < k; ++i) {
        const LatticeBox pt = LatticeBox::point(prefix[i]);
        for (std::size_t j = k; j < n; ++j) {
            const auto [lo, hi] = distance_range(pt, box_of(j), scale);
            bound += range_gap2(lo, hi, instance.target(i, j));
        }
    }
    for (std::size_t j = k + 1; j < n; ++j) {
        const auto [lo, hi] = distance_range(next_box, instance.domain_box(j), scale);
        bound += range_gap2(lo, hi, instance.target(k, j));
    }
    return bound + suffix_pairs[k + 1];
}

}  // namespace detail

double lower_bound(const CopInstance& instance, std::span<const LatticePoint> prefix) {
    const std::size_t n = instance.size();
    const std::size_t k = prefix.size();
    if (k > n) throw ArgumentError("prefix longer than the instance");

    double fixed = 0.0;
    for (std::size_t j = 1; j < k; ++j) fixed += instance.added_terms(prefix, j, prefix[j]);
    if (k == n) return fixed;

    const auto next = propagate(instance, prefix, false);
    if (next.domains.front().empty()) return std::numeric_limits<double>::infinity();
    const auto suffix = detail::suffix_box_pairs(instance);
    return fixed + detail::relaxed_pair_bound(instance, prefix, LatticeBox::around(next.domains.front()), suffix);
}

}  // namespace latrefine
