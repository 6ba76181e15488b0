#include "sipkit/fingerprint.hpp"
#include "sipkit/grid_lde.hpp"
#include "sipkit/mle.hpp"
#include "sipkit/poly.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace sipkit;

namespace {

std::vector<FieldElement> elems(const PrimeField& f, std::initializer_list<std::int64_t> xs) {
    std::vector<FieldElement> out;
    for (auto x : xs) out.push_back(f.from_int(x));
    return out;
}

std::vector<StreamUpdate> as_updates(std::span<const std::int64_t> a) {
    std::vector<StreamUpdate> out;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0) out.push_back({i, a[i]});
    return out;
}

}  // namespace

TEST(Poly, InterpolationBasics) {
    PrimeField f(101);
    std::pair<FieldElement, FieldElement> c[] = {{f.zero(), f.from_uint(7)}};
    EXPECT_EQ(lagrange_interpolate(c).coefficients(), elems(f, {7}));
    std::pair<FieldElement, FieldElement> line[] = {{f.zero(), f.zero()}, {f.one(), f.one()}};
    EXPECT_EQ(lagrange_interpolate(line).coefficients(), elems(f, {0, 1}));
    std::pair<FieldElement, FieldElement> dup[] = {{f.one(), f.zero()}, {f.one(), f.one()}};
    EXPECT_THROW(lagrange_interpolate(dup), std::invalid_argument);
    EXPECT_THROW(lagrange_interpolate({}), std::invalid_argument);
}

TEST(Poly, RandomRoundTrip) {
    PrimeField f(101);
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<FieldElement, FieldElement>> pts;
        std::vector<std::uint64_t> nodes(101);
        std::iota(nodes.begin(), nodes.end(), 0);
        std::shuffle(nodes.begin(), nodes.end(), rng);
        for (int i = 0; i < 5; ++i) pts.push_back({f.from_uint(nodes[i]), sample(rng, f)});
        auto p = lagrange_interpolate(pts);
        EXPECT_LE(p.degree(), 4);
        for (const auto& [x, y] : pts) EXPECT_EQ(p(x), y);
    }
}

TEST(Poly, ConsecutiveInterpolatorMatchesGeneric) {
    Rng rng(5);
    for (std::uint64_t p : {std::uint64_t{101}, kMersenne61}) {
        PrimeField f(p);
        for (std::size_t n : {1u, 2u, 3u, 7u, 31u}) {
            ConsecutiveInterpolator interp(f, n);
            for (int t = 0; t < 5; ++t) {
                auto vals = sample_vector(rng, f, n);
                EXPECT_EQ(interp(vals).coefficients(), interpolate_consecutive(vals).coefficients());
            }
        }
        ConsecutiveInterpolator two(f, 2);
        EXPECT_THROW(two(elems(f, {1})), std::invalid_argument);
    }
    EXPECT_THROW(ConsecutiveInterpolator(PrimeField(101), 0), std::invalid_argument);
}

TEST(Field, BatchInvert) {
    PrimeField f(101);
    auto xs = elems(f, {1, 2, 50, 100});
    auto inv = xs;
    batch_invert(inv);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(xs[i] * inv[i], f.one());
    auto bad = elems(f, {3, 0});
    EXPECT_THROW(batch_invert(bad), std::domain_error);
}

TEST(Poly, HornerAndArithmetic) {
    PrimeField f(101);
    UnivariatePoly p(f, elems(f, {1, 2, 3}));  // 1 + 2X + 3X^2
    EXPECT_EQ(p(f.from_uint(2)).value(), 17u);
    UnivariatePoly q(f, elems(f, {0, 1}));
    EXPECT_EQ((p * q).coefficients(), elems(f, {0, 1, 2, 3}));
    EXPECT_EQ((p + q).coefficients(), elems(f, {1, 3, 3}));
    EXPECT_EQ(UnivariatePoly(f, elems(f, {5, 0, 0})).degree(), 0);
    EXPECT_EQ(UnivariatePoly(f).degree(), -1);
    EXPECT_EQ(p.padded(5).size(), 5u);
    EXPECT_THROW(p.padded(2), std::invalid_argument);
}

TEST(Mle, ChiExamples) {
    PrimeField f(101);
    EXPECT_EQ(chi_eval(std::vector<bool>{true}, elems(f, {0})).value(), 0u);
    EXPECT_EQ(chi_eval(std::vector<bool>{false, true}, elems(f, {0, 1})).value(), 1u);
    EXPECT_EQ(chi_eval(std::vector<bool>{true, true}, elems(f, {2, 3})).value(), 6u);
    EXPECT_EQ(chi_eval(3, elems(f, {2, 3})).value(), 6u);
    // bit order: index 1 is (0, 1), so chi_1(2, 3) = (1 - 2) * 3
    EXPECT_EQ(chi_eval(1, elems(f, {2, 3})), f.from_int(-3));
}

TEST(Mle, StreamingExample) {
    PrimeField f(101);
    MleEvalState st(elems(f, {2, 3}));
    EXPECT_TRUE(st.value().is_zero());
    std::int64_t a[] = {1, 2, 3, 4};
    for (const auto& u : as_updates(a)) st.update(u);
    EXPECT_EQ(st.value().value(), 8u);
    EXPECT_EQ(st.state_elements(), 3u);
    auto table = lift_table(a, f, 2);
    EXPECT_EQ(mle_full_eval(table, elems(f, {2, 3})).value(), 8u);
}

TEST(Mle, BooleanPointsRecoverEntries) {
    PrimeField f(101);
    std::int64_t a[] = {5, -1, 0, 9, 3, 3, 7, 2};
    auto table = lift_table(a, f, 3);
    for (std::uint64_t q = 0; q < 8; ++q) {
        std::vector<FieldElement> x;
        for (bool b : index_bits(q, 3)) x.push_back(b ? f.one() : f.zero());
        EXPECT_EQ(mle_full_eval(table, x), f.from_int(a[q]));
        MleEvalState st(x);
        for (const auto& u : as_updates(a)) st.update(u);
        EXPECT_EQ(st.value(), f.from_int(a[q]));
    }
    std::vector<FieldElement> zeros(8, f.zero());
    EXPECT_TRUE(mle_full_eval(zeros, elems(f, {4, 5, 6})).is_zero());
}

TEST(Mle, StreamingMatchesOfflineAndOrderFree) {
    PrimeField f;
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const unsigned v = 1 + rng() % 6;
        std::vector<std::int64_t> a(std::size_t{1} << v);
        for (auto& x : a) x = static_cast<std::int64_t>(rng() % 21) - 10;
        auto r = sample_vector(rng, f, v);
        auto ups = as_updates(a);
        MleEvalState s1(r), s2(r);
        for (const auto& u : ups) s1.update(u);
        std::shuffle(ups.begin(), ups.end(), rng);
        for (const auto& u : ups) s2.update(u);
        EXPECT_EQ(s1.value(), s2.value());
        EXPECT_EQ(s1.value(), mle_full_eval(lift_table(a, f, v), r));
    }
}

TEST(Mle, Multilinearity) {
    PrimeField f;
    Rng rng(12);
    const unsigned v = 4;
    std::vector<std::int64_t> a(16);
    for (auto& x : a) x = static_cast<std::int64_t>(rng() % 100);
    auto table = lift_table(a, f, v);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = sample_vector(rng, f, v);
        for (unsigned k = 0; k < v; ++k) {
            auto x0 = x, x1 = x;
            x0[k] = f.zero();
            x1[k] = f.one();
            const auto e0 = mle_full_eval(table, x0), e1 = mle_full_eval(table, x1);
            EXPECT_EQ(e0 + x[k] * (e1 - e0), mle_full_eval(table, x));
        }
    }
}

TEST(Mle, NumVars) {
    EXPECT_EQ(num_vars_for(1), 1u);
    EXPECT_EQ(num_vars_for(2), 1u);
    EXPECT_EQ(num_vars_for(5), 3u);
    EXPECT_EQ(num_vars_for(256), 8u);
}

TEST(GridLde, SingleEntryAtNode) {
    PrimeField f(101);
    GridLdeState st(4, 3, f.zero());
    st.update(0, 2, f.from_uint(5));
    EXPECT_EQ(st.row(), elems(f, {0, 0, 5}));
    EXPECT_EQ(st.state_elements(), 5u);
}

TEST(GridLde, NodeRecoversColumn) {
    PrimeField f(101);
    const std::uint64_t h = 4, v = 3;
    std::vector<std::int64_t> a(h * v);
    std::iota(a.begin(), a.end(), 1);
    for (std::uint64_t node = 0; node < h; ++node) {
        GridLdeState st(h, v, f.from_uint(node));
        for (const auto& u : as_updates(a)) st.update(u);
        for (std::uint64_t y = 0; y < v; ++y) EXPECT_EQ(st.row()[y], f.from_int(a[node + h * y]));
    }
}

TEST(GridLde, MatchesInterpolationAndIsLinear) {
    PrimeField f;
    Rng rng(13);
    const std::uint64_t h = 4, v = 4;
    std::vector<std::int64_t> a(h * v), b(h * v);
    for (auto& x : a) x = static_cast<std::int64_t>(rng() % 50) - 25;
    for (auto& x : b) x = static_cast<std::int64_t>(rng() % 50) - 25;
    const auto r = sample(rng, f);
    GridLdeState sa(h, v, r), sb(h, v, r), sab(h, v, r);
    for (const auto& u : as_updates(a)) {
        sa.update(u);
        sab.update(u);
    }
    for (const auto& u : as_updates(b)) {
        sb.update(u);
        sab.update(u);
    }
    for (std::uint64_t y = 0; y < v; ++y) {
        std::vector<std::pair<FieldElement, FieldElement>> pts;
        for (std::uint64_t x = 0; x < h; ++x) pts.push_back({f.from_uint(x), f.from_int(a[x + h * y])});
        EXPECT_EQ(sa.row()[y], lagrange_interpolate(pts)(r));
        EXPECT_EQ(sab.row()[y], sa.row()[y] + sb.row()[y]);
    }
}

TEST(Fingerprint, Basics) {
    PrimeField f(101);
    const auto r = f.from_uint(17);
    Fingerprint a(r, 8), b(r, 8);
    EXPECT_TRUE(a.value().is_zero());
    a.update({3, 1});
    a.update({3, -1});
    EXPECT_TRUE(a.value().is_zero());
    a.update({2, 5});
    b.update({2, 5});
    EXPECT_TRUE(fp_equal(a, b));
    EXPECT_EQ(a.state_elements(), 2u);
    EXPECT_THROW(fp_equal(a, Fingerprint(f.from_uint(3), 8)), std::invalid_argument);
    EXPECT_THROW(fp_equal(a, Fingerprint(r, 9)), std::invalid_argument);
    EXPECT_THROW(a.update({8, 1}), std::out_of_range);
}

TEST(Fingerprint, NoCollisionsInLargeField) {
    PrimeField f;
    Rng rng(21);
    int collisions = 0;
    for (int t = 0; t < 100000; ++t) {
        const auto r = sample(rng, f);
        Fingerprint a(r, 8), b(r, 8);
        a.update({5, 1});
        b.update({5, 2});
        collisions += fp_equal(a, b);
    }
    EXPECT_EQ(collisions, 0);
}

TEST(Fingerprint, CollisionRateInSmallField) {
    PrimeField f(97);
    Rng rng(22);
    const int trials = 10000;
    // one differing coordinate, then a dense difference of degree u - 1 = 7
    const std::vector<std::vector<std::int64_t>> diffs = {{0, 0, 0, 2, 0, 0, 0, 0}, {1, 3, 0, 5, 2, 1, 4, 6}};
    for (const auto& diff : diffs) {
        int collisions = 0;
        for (int t = 0; t < trials; ++t) {
            const auto r = sample(rng, f);
            Fingerprint a(r, 8), b(r, 8);
            for (std::uint64_t i = 0; i < 8; ++i) {
                a.update({i, static_cast<std::int64_t>(i + 1)});
                b.update({i, static_cast<std::int64_t>(i + 1) + diff[i]});
            }
            collisions += fp_equal(a, b);
        }
        EXPECT_LE(static_cast<double>(collisions) / trials, 2.0 * 7 / 97);
    }
}
