#pragma once

#include "sipkit/rational.hpp"
#include "sipkit/stream.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sipkit {

/// Lexicographic order on grid points (coordinate 0 first).
bool lex_less(const GridPoint& a, const GridPoint& b);
std::int64_t dot(const GridPoint& a, const GridPoint& b);
std::int64_t squared_distance(const GridPoint& a, const GridPoint& b);

/// Closed Euclidean ball with grid center; the radius is carried squared.
struct BallRange {
    using point_type = GridPoint;

    GridPoint center;
    std::int64_t radius2 = 0;

    Rational cost() const { return Rational(radius2); }
    bool contains(const GridPoint& p) const { return squared_distance(center, p) <= radius2; }
    bool params_less(const BallRange& o) const;
    bool operator==(const BallRange& o) const { return radius2 == o.radius2 && center == o.center; }
};

/// Region lo <= <normal, x> <= hi. Canonical form: gcd(normal) = 1 and the
/// first nonzero coordinate of the normal is positive.
struct SlabRange {
    using point_type = GridPoint;

    GridPoint normal;
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    /// Reduces an arbitrary (normal, lo, hi) to canonical form describing the same region.
    static SlabRange canonical(GridPoint normal, std::int64_t lo, std::int64_t hi);

    /// Squared width (hi - lo)^2 / |normal|^2.
    Rational cost() const;
    bool contains(const GridPoint& p) const {
        const auto v = dot(normal, p);
        return lo <= v && v <= hi;
    }
    bool params_less(const SlabRange& o) const;
    bool operator==(const SlabRange& o) const { return lo == o.lo && hi == o.hi && normal == o.normal; }
};

/// Union of k Euclidean balls with distinct grid centers and one common radius.
struct BallUnionRange {
    using point_type = GridPoint;

    std::vector<GridPoint> centers;  // sorted lexicographically
    std::int64_t radius2 = 0;

    Rational cost() const { return Rational(radius2); }
    bool contains(const GridPoint& p) const;
    bool params_less(const BallUnionRange& o) const;
    bool operator==(const BallUnionRange& o) const { return radius2 == o.radius2 && centers == o.centers; }
};

/// Union of k metric balls B(z, r) for a set Z of k distinct elements.
struct MetricBallUnionRange {
    using point_type = int;

    std::vector<int> centers;  // sorted ascending
    std::int64_t radius = 0;
    const MetricSpace* metric = nullptr;

    Rational cost() const { return Rational(radius); }
    bool contains(int x) const;
    bool params_less(const MetricBallUnionRange& o) const { return centers < o.centers; }
    bool operator==(const MetricBallUnionRange& o) const { return radius == o.radius && centers == o.centers; }
};

/// A k-slab: multiset of k slabs, cost = largest squared width.
struct KSlabRange {
    using point_type = GridPoint;

    std::vector<SlabRange> slabs;  // sorted by (cost, params)

    static KSlabRange canonical(std::vector<SlabRange> slabs);

    Rational cost() const;
    bool contains(const GridPoint& p) const {
        return std::any_of(slabs.begin(), slabs.end(), [&](const SlabRange& s) { return s.contains(p); });
    }
    bool params_less(const KSlabRange& o) const;
    bool operator==(const KSlabRange& o) const { return slabs == o.slabs; }
};

template <class R>
concept Range = requires(const R& r, const typename R::point_type& p) {
    { r.cost() } -> std::convertible_to<Rational>;
    { r.contains(p) } -> std::convertible_to<bool>;
    { r.params_less(r) } -> std::convertible_to<bool>;
};

/// Enumerable family of ranges in canonical order: non-decreasing cost, ties
/// broken by lexicographic parameter order. Backed by an explicit sorted table.
template <Range R>
class RangeSpace {
public:
    using range_type = R;
    using point_type = typename R::point_type;

    RangeSpace(std::string kind, std::vector<R> ranges) : kind_(std::move(kind)) {
        std::vector<Rational> costs;
        costs.reserve(ranges.size());
        for (const auto& r : ranges) costs.push_back(r.cost());
        std::vector<std::size_t> order(ranges.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (costs[a] != costs[b]) return costs[a] < costs[b];
            return ranges[a].params_less(ranges[b]);
        });
        ranges_.reserve(ranges.size());
        costs_.reserve(ranges.size());
        for (auto i : order) {
            if (!ranges_.empty() && ranges_.back() == ranges[i]) continue;
            ranges_.push_back(std::move(ranges[i]));
            costs_.push_back(costs[i]);
        }
    }

    const std::string& kind() const { return kind_; }
    std::uint64_t size() const { return ranges_.size(); }
    const R& at(std::uint64_t i) const { return ranges_.at(i); }
    const Rational& cost(std::uint64_t i) const { return costs_.at(i); }
    bool contains(std::uint64_t i, const point_type& p) const { return ranges_[i].contains(p); }

    /// Position of r in the canonical order, if r (in canonical form) is a member.
    std::optional<std::uint64_t> index_of(const R& r) const {
        const Rational c = r.cost();
        std::size_t lo = 0, hi = ranges_.size();
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            bool less = costs_[mid] != c ? costs_[mid] < c : ranges_[mid].params_less(r);
            if (less)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo < ranges_.size() && ranges_[lo] == r) return lo;
        return std::nullopt;
    }

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::uint64_t i = 0; i < ranges_.size(); ++i)
            if (!fn(i, ranges_[i])) return;
    }

private:
    std::string kind_;
    std::vector<R> ranges_;
    std::vector<Rational> costs_;
};

using BallSpace = RangeSpace<BallRange>;
using SlabSpace = RangeSpace<SlabRange>;
using BallUnionSpace = RangeSpace<BallUnionRange>;
using MetricBallUnionSpace = RangeSpace<MetricBallUnionRange>;
using KSlabSpace = RangeSpace<KSlabRange>;

/// Squared distances realizable between points of [m]^d, ascending.
std::vector<std::int64_t> grid_squared_radii(std::int64_t m, int d);

/// Primitive normals of hyperplanes spanned by grid points of [m]^d, canonical and sorted.
std::vector<GridPoint> grid_slab_normals(std::int64_t m, int d);

/// Balls with centers in [m]^d and squared radius from grid_squared_radii.
BallSpace make_ball_space(const GridUniverse& grid);
/// Slabs whose normal comes from grid_slab_normals and whose two bounding hyperplanes
/// each pass through a grid point (widths from zero upward).
SlabSpace make_slab_space(const GridUniverse& grid);
BallUnionSpace make_ball_union_space(const GridUniverse& grid, int k);
/// |R| = C(m, k) * (#distinct distances) <= m^{k+2}. The metric must outlive the space.
MetricBallUnionSpace make_metric_ball_union_space(const MetricSpace& metric, int k);
/// k-multisets of slabs from `slabs`.
KSlabSpace make_kslab_space(const SlabSpace& slabs, int k);

/// Calls fn(update) for every range containing p, in canonical order.
template <Range R, class Fn>
void for_each_containing(const RangeSpace<R>& space, const typename R::point_type& p, Fn&& fn) {
    for (std::uint64_t i = 0; i < space.size(); ++i)
        if (space.contains(i, p)) fn(StreamUpdate{i, 1});
}

/// Derived stream: one (index(sigma), +1) per point p and range sigma containing p.
template <Range R>
std::vector<StreamUpdate> derive_range_stream(std::span<const typename R::point_type> points, const RangeSpace<R>& space) {
    std::vector<StreamUpdate> out;
    for (const auto& p : points) for_each_containing(space, p, [&](const StreamUpdate& u) { out.push_back(u); });
    return out;
}

/// Smallest index whose range has cost exactly w, else -1. Scans the enumeration
/// holding a single range at a time.
template <Range R>
std::int64_t cost_to_index(const RangeSpace<R>& space, const Rational& w) {
    std::int64_t found = -1;
    space.for_each([&](std::uint64_t i, const R& r) {
        const Rational c = r.cost();
        if (c == w) {
            found = static_cast<std::int64_t>(i);
            return false;
        }
        return c < w;
    });
    return found;
}

}  // namespace sipkit
