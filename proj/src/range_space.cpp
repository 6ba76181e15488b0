#include "sipkit/range_space.hpp"

#include "combinations.hpp"

#include <numeric>
#include <set>

namespace sipkit {

namespace {

std::int64_t gcd_all(const GridPoint& v) {
    std::int64_t g = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) g = std::gcd(g, v(i));
    return g;
}

bool lex_positive(const GridPoint& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) > 0) return true;
        if (v(i) < 0) return false;
    }
    return false;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

/// Determinant of a small square integer matrix by cofactor expansion.
std::int64_t det(const std::vector<std::vector<std::int64_t>>& a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    std::int64_t total = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<std::int64_t>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<std::int64_t> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(a[r][k]);
            minor.push_back(std::move(row));
        }
        std::int64_t term = a[0][c] * det(minor);
        total += (c % 2 == 0) ? term : -term;
    }
    return total;
}

/// Generalized cross product of d-1 vectors in d dimensions.
GridPoint cross(const std::vector<GridPoint>& vs, int d) {
    GridPoint out(d);
    for (int i = 0; i < d; ++i) {
        std::vector<std::vector<std::int64_t>> minor;
        for (const auto& v : vs) {
            std::vector<std::int64_t> row;
            for (int k = 0; k < d; ++k)
                if (k != i) row.push_back(v(k));
            minor.push_back(std::move(row));
        }
        std::int64_t m = det(minor);
        out(i) = (i % 2 == 0) ? m : -m;
    }
    return out;
}

GridPoint primitive(GridPoint v) {
    const auto g = gcd_all(v);
    if (g > 1) v /= g;
    if (!lex_positive(v)) v = -v;
    return v;
}

template <class Fn>
void for_each_grid_point(const GridUniverse& grid, Fn&& fn) {
    for (std::uint64_t i = 0; i < grid.size(); ++i) fn(grid.decode(i));
}

using detail::for_each_combination;

bool slab_key_less(const SlabRange& a, const SlabRange& b) {
    const auto ca = a.cost(), cb = b.cost();
    if (ca != cb) return ca < cb;
    return a.params_less(b);
}

}  // namespace

bool lex_less(const GridPoint& a, const GridPoint& b) {
    const auto n = std::min(a.size(), b.size());
    for (Eigen::Index i = 0; i < n; ++i)
        if (a(i) != b(i)) return a(i) < b(i);
    return a.size() < b.size();
}

std::int64_t dot(const GridPoint& a, const GridPoint& b) { return a.dot(b); }

std::int64_t squared_distance(const GridPoint& a, const GridPoint& b) { return (a - b).squaredNorm(); }

bool BallRange::params_less(const BallRange& o) const { return lex_less(center, o.center); }

SlabRange SlabRange::canonical(GridPoint normal, std::int64_t lo, std::int64_t hi) {
    const auto g = gcd_all(normal);
    if (g == 0) throw std::invalid_argument("slab normal must be nonzero");
    if (lo > hi) std::swap(lo, hi);
    normal /= g;
    lo = ceil_div(lo, g);
    hi = floor_div(hi, g);
    if (!lex_positive(normal)) {
        normal = -normal;
        std::int64_t nlo = -hi, nhi = -lo;
        lo = nlo;
        hi = nhi;
    }
    return SlabRange{std::move(normal), lo, hi};
}

Rational SlabRange::cost() const {
    const std::int64_t w = hi - lo;
    return Rational(static_cast<Rational::Int>(w) * w, normal.squaredNorm());
}

bool SlabRange::params_less(const SlabRange& o) const {
    if (normal != o.normal) return lex_less(normal, o.normal);
    if (lo != o.lo) return lo < o.lo;
    return hi < o.hi;
}

bool BallUnionRange::contains(const GridPoint& p) const {
    return std::any_of(centers.begin(), centers.end(),
                       [&](const GridPoint& c) { return squared_distance(c, p) <= radius2; });
}

bool BallUnionRange::params_less(const BallUnionRange& o) const {
    return std::lexicographical_compare(centers.begin(), centers.end(), o.centers.begin(), o.centers.end(), lex_less);
}

bool MetricBallUnionRange::contains(int x) const {
    return std::any_of(centers.begin(), centers.end(), [&](int c) { return (*metric)(c, x) <= radius; });
}

KSlabRange KSlabRange::canonical(std::vector<SlabRange> slabs) {
    std::sort(slabs.begin(), slabs.end(), slab_key_less);
    return KSlabRange{std::move(slabs)};
}

Rational KSlabRange::cost() const {
    Rational best(0);
    for (const auto& s : slabs) best = std::max(best, s.cost());
    return best;
}

bool KSlabRange::params_less(const KSlabRange& o) const {
    return std::lexicographical_compare(slabs.begin(), slabs.end(), o.slabs.begin(), o.slabs.end(), slab_key_less);
}

std::vector<std::int64_t> grid_squared_radii(std::int64_t m, int d) {
    std::set<std::int64_t> vals{0};
    for (int i = 0; i < d; ++i) {
        std::set<std::int64_t> next;
        for (auto v : vals)
            for (std::int64_t t = 0; t < m; ++t) next.insert(v + t * t);
        vals = std::move(next);
    }
    return {vals.begin(), vals.end()};
}

std::vector<GridPoint> grid_slab_normals(std::int64_t m, int d) {
    if (d == 1) return {make_point({1})};
    // Nonzero difference vectors of the grid, taken up to sign.
    std::vector<GridPoint> diffs;
    const GridUniverse box(2 * m - 1, d);
    for (std::uint64_t i = 0; i < box.size(); ++i) {
        GridPoint v = box.decode(i).array() - (m - 1);
        if (lex_positive(v) && gcd_all(v) == 1) diffs.push_back(v);
    }
    std::set<GridPoint, decltype(&lex_less)> normals(&lex_less);
    const int nd = static_cast<int>(diffs.size());
    // The cross product vanishes unless the d-1 directions are independent.
    for_each_combination(nd, d - 1, [&](const std::vector<int>& idx) {
        std::vector<GridPoint> vs;
        for (int i : idx) vs.push_back(diffs[static_cast<std::size_t>(i)]);
        GridPoint n = cross(vs, d);
        if (gcd_all(n) != 0) normals.insert(primitive(n));
    });
    return {normals.begin(), normals.end()};
}

BallSpace make_ball_space(const GridUniverse& grid) {
    const auto radii = grid_squared_radii(grid.m(), grid.d());
    std::vector<BallRange> ranges;
    ranges.reserve(grid.size() * radii.size());
    for_each_grid_point(grid, [&](const GridPoint& c) {
        for (auto r2 : radii) ranges.push_back(BallRange{c, r2});
    });
    return BallSpace("balls", std::move(ranges));
}

SlabSpace make_slab_space(const GridUniverse& grid) {
    std::vector<SlabRange> ranges;
    for (const auto& n : grid_slab_normals(grid.m(), grid.d())) {
        std::set<std::int64_t> offsets;
        for_each_grid_point(grid, [&](const GridPoint& p) { offsets.insert(dot(n, p)); });
        std::vector<std::int64_t> vals(offsets.begin(), offsets.end());
        for (std::size_t a = 0; a < vals.size(); ++a)
            for (std::size_t b = a; b < vals.size(); ++b) ranges.push_back(SlabRange{n, vals[a], vals[b]});
    }
    return SlabSpace("slabs", std::move(ranges));
}

BallUnionSpace make_ball_union_space(const GridUniverse& grid, int k) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    const auto radii = grid_squared_radii(grid.m(), grid.d());
    std::vector<GridPoint> pts;
    for_each_grid_point(grid, [&](const GridPoint& p) { pts.push_back(p); });
    std::sort(pts.begin(), pts.end(), lex_less);
    std::vector<BallUnionRange> ranges;
    for_each_combination(static_cast<int>(pts.size()), k, [&](const std::vector<int>& idx) {
        std::vector<GridPoint> cs;
        for (int i : idx) cs.push_back(pts[static_cast<std::size_t>(i)]);
        for (auto r2 : radii) ranges.push_back(BallUnionRange{cs, r2});
    });
    return BallUnionSpace("k-ball-unions", std::move(ranges));
}

MetricBallUnionSpace make_metric_ball_union_space(const MetricSpace& metric, int k) {
    if (k < 1 || k > metric.size()) throw std::invalid_argument("k must lie in [1, m]");
    const auto radii = metric.distinct_distances();
    std::vector<MetricBallUnionRange> ranges;
    for_each_combination(metric.size(), k, [&](const std::vector<int>& idx) {
        for (auto r : radii) ranges.push_back(MetricBallUnionRange{idx, r, &metric});
    });
    return MetricBallUnionSpace("metric-k-ball-unions", std::move(ranges));
}

KSlabSpace make_kslab_space(const SlabSpace& slabs, int k) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    const int n = static_cast<int>(slabs.size());
    std::vector<KSlabRange> ranges;
    // Multisets of size k are combinations of k from n + k - 1 with the usual shift.
    for_each_combination(n + k - 1, k, [&](const std::vector<int>& idx) {
        std::vector<SlabRange> pick;
        for (std::size_t j = 0; j < idx.size(); ++j) pick.push_back(slabs.at(static_cast<std::uint64_t>(idx[j]) - j));
        ranges.push_back(KSlabRange::canonical(std::move(pick)));
    });
    return KSlabSpace("k-slabs", std::move(ranges));
}

}  // namespace sipkit
