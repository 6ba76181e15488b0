#include "sipkit/ortho.hpp"
#include "sipkit/range_space.hpp"
#include "sipkit/stream.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace sipkit;

namespace {

std::vector<StreamUpdate> parse(const std::string& text, StreamHeader* h = nullptr) {
    std::istringstream in(text);
    return parse_stream(in, h);
}

SlabSpace line_intervals(std::int64_t m) { return make_slab_space(GridUniverse(m, 1)); }

}  // namespace

TEST(Stream, ParsesUpdates) {
    StreamHeader h;
    auto ups = parse("u=4\n2 +1\n2 +1\n0 -1\n", &h);
    EXPECT_EQ(h.universe, 4u);
    EXPECT_EQ(ups, (std::vector<StreamUpdate>{{2, 1}, {2, 1}, {0, -1}}));
    EXPECT_EQ(frequencies(ups, 4), (std::vector<std::int64_t>{-1, 0, 2, 0}));
}

TEST(Stream, EmptyBody) {
    EXPECT_TRUE(parse("u=4\n").empty());
    EXPECT_EQ(frequencies({}, 3), (std::vector<std::int64_t>{0, 0, 0}));
}

TEST(Stream, CommentsAndBlankLines) {
    auto ups = parse("# header next\nu=8\n\n3 +1\n# skip\n7 -2\n");
    EXPECT_EQ(ups, (std::vector<StreamUpdate>{{3, 1}, {7, -2}}));
}

TEST(Stream, ErrorsCarryLineNumbers) {
    try {
        parse("u=4\n1 +1\n5 +1\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("u=4\n1\n"), ParseError);
    EXPECT_THROW(parse("u=4\nx +1\n"), ParseError);
    EXPECT_THROW(parse("v=4\n"), ParseError);
}

TEST(Stream, FrequenciesMatchRecount) {
    Rng rng(3);
    std::vector<StreamUpdate> ups;
    for (int i = 0; i < 1000; ++i)
        ups.push_back({rng() % 50, static_cast<std::int64_t>(rng() % 7) - 3});
    auto a = frequencies(ups, 50);
    for (std::uint64_t idx = 0; idx < 50; ++idx) {
        std::int64_t c = 0;
        for (const auto& u : ups)
            if (u.index == idx) c += u.delta;
        EXPECT_EQ(a[idx], c);
    }
}

TEST(Stream, GridBijection) {
    for (std::int64_t m = 1; m <= 16; ++m)
        for (int d = 1; d <= 3; ++d) {
            GridUniverse g(m, d);
            for (std::uint64_t i = 0; i < g.size(); ++i) ASSERT_EQ(g.encode(g.decode(i)), i);
        }
    GridUniverse g(5, 2);
    EXPECT_EQ(g.encode(make_point({2, 3})), 17u);
}

TEST(Stream, GridPointStream) {
    std::istringstream in("grid m=4 d=2\n0 0\n3 1\n");
    GridUniverse g(1, 1);
    auto pts = read_points(in, &g);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[1], make_point({3, 1}));
    EXPECT_EQ(g.size(), 16u);
    EXPECT_THROW(parse("grid m=4 d=2\n4 0\n"), ParseError);
}

TEST(Stream, MetricValidation) {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> d(3, 3);
    d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    MetricSpace ok(d);
    EXPECT_EQ(ok.distinct_distances(), (std::vector<std::int64_t>{0, 1, 2}));
    d(0, 2) = d(2, 0) = 5;
    EXPECT_THROW(MetricSpace{d}, std::invalid_argument);
    d(0, 2) = 2;
    d(2, 0) = 1;
    EXPECT_THROW(MetricSpace{d}, std::invalid_argument);

    std::ostringstream out;
    write_metric(out, ok);
    std::istringstream in(out.str());
    EXPECT_EQ(read_metric(in).matrix(), ok.matrix());
}

TEST(RangeSpace, IntervalsOnALine) {
    auto s = line_intervals(4);
    EXPECT_EQ(s.size(), 10u);  // 4 + 3 + 2 + 1
    EXPECT_EQ(s.at(0).lo, 0);
    EXPECT_EQ(s.at(0).hi, 0);
    EXPECT_EQ(cost_to_index(s, Rational(1)), 4);  // after the four width-0 intervals
    EXPECT_EQ(s.at(4).hi - s.at(4).lo, 1);
    EXPECT_EQ(cost_to_index(s, Rational(0)), 0);
    EXPECT_EQ(cost_to_index(s, Rational(-1)), -1);
    EXPECT_EQ(cost_to_index(s, Rational(2)), -1);
}

TEST(RangeSpace, DerivedStreamSingletonAndEmpty) {
    auto s = line_intervals(3);
    std::vector<GridPoint> one = {make_point({1})};
    auto ups = derive_range_stream<SlabRange>(one, s);
    std::uint64_t expected = 0;
    for (std::uint64_t i = 0; i < s.size(); ++i) expected += s.contains(i, one[0]);
    EXPECT_EQ(ups.size(), expected);
    EXPECT_EQ(ups.size(), 4u);  // [0,1] [1,1] [0,2] [1,2]
    for (const auto& u : ups) EXPECT_TRUE(s.contains(u.index, one[0]));
    EXPECT_TRUE(derive_range_stream<SlabRange>(std::span<const GridPoint>{}, s).empty());
}

TEST(RangeSpace, DerivedCountOnLine) {
    auto s = line_intervals(8);
    std::vector<GridPoint> pts = {make_point({1}), make_point({2}), make_point({3})};
    auto f = frequencies(derive_range_stream<SlabRange>(pts, s), s.size());
    auto idx = s.index_of(SlabRange::canonical(make_point({1}), 2, 5));
    ASSERT_TRUE(idx);
    EXPECT_EQ(f[*idx], 2);
}

namespace {

template <class R>
void check_space(const RangeSpace<R>& s, std::span<const typename R::point_type> pts) {
    for (std::uint64_t i = 0; i + 1 < s.size(); ++i) {
        ASSERT_LE(s.cost(i), s.cost(i + 1));
        if (s.cost(i) == s.cost(i + 1)) ASSERT_TRUE(s.at(i).params_less(s.at(i + 1)));
    }
    for (std::uint64_t i = 0; i < s.size(); ++i) ASSERT_EQ(s.index_of(s.at(i)), i);
    auto f = frequencies(derive_range_stream<R>(pts, s), s.size());
    for (std::uint64_t i = 0; i < s.size(); ++i) {
        std::int64_t c = 0;
        for (const auto& p : pts) c += s.contains(i, p);
        ASSERT_EQ(f[i], c);
    }
    // cost_to_index returns the first range of each cost
    std::vector<std::uint64_t> firsts;
    for (std::uint64_t i = 0; i < s.size(); ++i)
        if (i == 0 || s.cost(i - 1) != s.cost(i)) firsts.push_back(i);
    const std::size_t step = std::max<std::size_t>(1, firsts.size() / 40);
    for (std::size_t k = 0; k < firsts.size(); k += step)
        ASSERT_EQ(cost_to_index(s, s.cost(firsts[k])), static_cast<std::int64_t>(firsts[k]));
}

std::vector<GridPoint> random_points(const GridUniverse& g, int n, Rng& rng) {
    std::vector<GridPoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back(g.decode(rng() % g.size()));
    return pts;
}

}  // namespace

TEST(RangeSpace, OrderingAndCountsExhaustive) {
    Rng rng(5);
    for (std::int64_t m = 1; m <= 8; ++m)
        for (int d = 1; d <= 2; ++d) {
            GridUniverse g(m, d);
            auto pts = random_points(g, 6, rng);
            check_space<BallRange>(make_ball_space(g), pts);
            check_space<SlabRange>(make_slab_space(g), pts);
        }
}

TEST(RangeSpace, BallMembershipIsExact) {
    GridUniverse g(5, 2);
    auto s = make_ball_space(g);
    for (std::uint64_t i = 0; i < s.size(); ++i) {
        const auto& b = s.at(i);
        for (std::uint64_t q = 0; q < g.size(); ++q) {
            auto p = g.decode(q);
            const auto dx = p(0) - b.center(0), dy = p(1) - b.center(1);
            ASSERT_EQ(s.contains(i, p), dx * dx + dy * dy <= b.radius2);
        }
    }
}

TEST(RangeSpace, SlabNormalsArePrimitiveAndSpanned) {
    auto normals = grid_slab_normals(3, 2);
    // directions through pairs of points in [3]^2: (1,0) (0,1) (1,1) (1,-1) (1,2) (2,1) (1,-2) (2,-1)
    EXPECT_EQ(normals.size(), 8u);
    for (const auto& n : normals) {
        EXPECT_TRUE(n(0) > 0 || (n(0) == 0 && n(1) > 0));
        EXPECT_EQ(std::gcd(n(0), n(1)), 1);
    }
    auto s = SlabRange::canonical(make_point({-2, 0}), -4, 2);
    EXPECT_EQ(s.normal, make_point({1, 0}));
    EXPECT_EQ(s.lo, -1);
    EXPECT_EQ(s.hi, 2);
    EXPECT_EQ(s.cost(), Rational(9));
}

TEST(RangeSpace, SlabSpaceSizeIsPolynomial) {
    // |R| = O(m^{d^2 + d})
    for (std::int64_t m = 2; m <= 6; ++m) {
        auto s = make_slab_space(GridUniverse(m, 2));
        EXPECT_LE(static_cast<double>(s.size()), 4.0 * std::pow(static_cast<double>(m), 6));
    }
}

TEST(RangeSpace, MetricBallUnions) {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> d(4, 4);
    d << 0, 1, 2, 3, 1, 0, 1, 2, 2, 1, 0, 1, 3, 2, 1, 0;
    MetricSpace metric(d);
    auto s = make_metric_ball_union_space(metric, 2);
    EXPECT_EQ(s.size(), 6u * 4u);
    std::vector<int> pts = {0, 1, 2, 3};
    check_space<MetricBallUnionRange>(s, pts);
}

TEST(RangeSpace, KSlabsAreMultisets) {
    auto slabs = line_intervals(2);  // [0,0] [1,1] [0,1]
    auto ks = make_kslab_space(slabs, 2);
    EXPECT_EQ(ks.size(), 6u);  // C(3+1, 2)
    std::vector<GridPoint> pts = {make_point({0}), make_point({1})};
    check_space<KSlabRange>(ks, pts);
}

TEST(Ortho, CountAndTrivialCases) {
    EXPECT_EQ(almost_orthogonal_count(400, Rational(1, 5)), 54);
    EXPECT_EQ(almost_orthogonal_count(4, Rational(1, 5)), 1);
    Rng rng(9);
    auto one = generate_almost_orthogonal(4, Rational(1, 5), rng);
    EXPECT_EQ(one.signs.rows(), 1);
    EXPECT_EQ(one.batches, 1);
    auto loose = generate_almost_orthogonal(4, Rational(1), rng);
    EXPECT_EQ(loose.batches, 1);
}

TEST(Ortho, FiftyFourVectorsAt400) {
    Rng rng(11);
    auto set = generate_almost_orthogonal(400, Rational::parse("0.2"), rng);
    ASSERT_EQ(set.signs.rows(), 54);
    ASSERT_EQ(set.signs.cols(), 400);
    Eigen::MatrixXi x = set.signs.cast<int>();
    Eigen::MatrixXi gram = x * x.transpose();
    for (int i = 0; i < 54; ++i) {
        EXPECT_EQ(gram(i, i), 400);  // unit norm after scaling by 1/sqrt(d)
        for (int j = 0; j < i; ++j) EXPECT_LE(5 * std::abs(gram(i, j)), 400);
    }
}
