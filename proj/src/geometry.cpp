#include "sipkit/geometry.hpp"

#include "combinations.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sipkit {

namespace {

std::vector<GridPoint> distinct_points(std::span<const GridPoint> pts) {
    std::vector<GridPoint> out(pts.begin(), pts.end());
    std::sort(out.begin(), out.end(), lex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool all_distinct(std::vector<GridPoint> pts) {
    const auto n = pts.size();
    return distinct_points(pts).size() == n;
}

Rational squared_distance(const RationalPoint& c, const GridPoint& p) {
    Rational s(0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Rational t = c[i] - Rational(p(static_cast<Eigen::Index>(i)));
        s += t * t;
    }
    return s;
}

/// Solves G x = b in place by Gaussian elimination; false if G is singular.
bool solve(std::vector<std::vector<Rational>>& g, std::vector<Rational>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && g[piv][col] == Rational(0)) ++piv;
        if (piv == n) return false;
        std::swap(g[piv], g[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || g[r][col] == Rational(0)) continue;
            const Rational f = g[r][col] / g[col][col];
            for (std::size_t c = col; c < n; ++c) g[r][c] -= f * g[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= g[i][i];
    return true;
}

std::size_t rank_of(std::vector<std::vector<Rational>> rows) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][c] == Rational(0)) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r][c] == Rational(0)) continue;
            const Rational f = rows[r][c] / rows[rank][c];
            for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
        }
        ++rank;
    }
    return rank;
}

ExactBall welzl(std::vector<GridPoint>& pts, std::size_t n, std::vector<GridPoint>& boundary, std::size_t d) {
    if (n == 0 || boundary.size() == d + 1) {
        if (boundary.empty()) return ExactBall{{}, Rational(-1)};
        auto b = circumball(boundary);
        if (!b) throw std::logic_error("dependent support set");
        return *b;
    }
    const GridPoint p = pts[n - 1];
    ExactBall ball = welzl(pts, n - 1, boundary, d);
    if (ball.radius2 >= Rational(0) && ball.contains(p)) return ball;
    boundary.push_back(p);
    ball = welzl(pts, n - 1, boundary, d);
    boundary.pop_back();
    return ball;
}

std::vector<std::int64_t> ints(const std::vector<std::string>& toks, std::size_t from, std::size_t line) {
    std::vector<std::int64_t> out;
    for (std::size_t i = from; i < toks.size(); ++i) {
        auto v = detail::to_int(toks[i]);
        if (!v) throw ParseError(line, "bad integer '" + toks[i] + "'");
        out.push_back(*v);
    }
    return out;
}

GridPoint to_point(const std::vector<std::int64_t>& v, std::size_t line) {
    if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) throw ParseError(line, "bad point dimension");
    GridPoint p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i)) = v[i];
    return p;
}

void put_point(std::ostream& os, const GridPoint& p) {
    for (Eigen::Index i = 0; i < p.size(); ++i) os << " " << p(i);
}

/// Lines of a claim block after the tag line; each line split into tokens.
std::vector<std::pair<std::size_t, std::vector<std::string>>> claim_lines(const std::string& text, const std::string& tag) {
    std::istringstream is(text);
    std::string t;
    std::size_t line = 0;
    if (!detail::next_content_line(is, t, line) || t != tag) throw ParseError(line, "expected claim tag '" + tag + "'");
    std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
    while (detail::next_content_line(is, t, line)) out.emplace_back(line, detail::split_ws(t));
    return out;
}

bool in_grid(const GridPoint& p, const GridUniverse& grid) { return p.size() == grid.d() && grid.contains(p); }

}  // namespace

// ---- exact geometry ----

bool ExactBall::contains(const GridPoint& p) const { return squared_distance(center, p) <= radius2; }

std::optional<ExactBall> circumball(std::span<const GridPoint> s) {
    if (s.empty()) return std::nullopt;
    const GridPoint& p0 = s[0];
    const auto d = static_cast<std::size_t>(p0.size());
    const std::size_t k = s.size() - 1;
    std::vector<std::vector<Rational>> g(k, std::vector<Rational>(k));
    std::vector<Rational> b(k);
    for (std::size_t i = 0; i < k; ++i) {
        const GridPoint di = s[i + 1] - p0;
        for (std::size_t j = 0; j < k; ++j) g[i][j] = Rational(di.dot(s[j + 1] - p0));
        b[i] = Rational(di.squaredNorm()) / Rational(2);
    }
    if (!solve(g, b)) return std::nullopt;
    RationalPoint c(d);
    for (std::size_t a = 0; a < d; ++a) {
        Rational x(p0(static_cast<Eigen::Index>(a)));
        for (std::size_t i = 0; i < k; ++i) x += b[i] * Rational((s[i + 1] - p0)(static_cast<Eigen::Index>(a)));
        c[a] = x;
    }
    ExactBall ball{c, Rational(0)};
    ball.radius2 = squared_distance(c, p0);
    return ball;
}

ExactBall meb_by_subsets(std::span<const GridPoint> pts) {
    const auto ds = distinct_points(pts);
    if (ds.empty()) throw std::invalid_argument("no points");
    const int d = static_cast<int>(ds[0].size());
    std::optional<ExactBall> best;
    const int n = static_cast<int>(ds.size());
    for (int size = 1; size <= std::min(d + 1, n); ++size) {
        detail::for_each_combination(n, size, [&](const std::vector<int>& idx) {
            std::vector<GridPoint> s;
            for (int i : idx) s.push_back(ds[static_cast<std::size_t>(i)]);
            auto b = circumball(s);
            if (!b || (best && b->radius2 >= best->radius2)) return;
            for (const auto& p : ds)
                if (!b->contains(p)) return;
            best = b;
        });
    }
    return *best;
}

ExactBall meb_welzl(std::span<const GridPoint> pts) {
    auto ds = distinct_points(pts);
    if (ds.empty()) throw std::invalid_argument("no points");
    // fixed permutation: reproducible claims, expected linear time
    Rng rng(0x5eed);
    std::shuffle(ds.begin(), ds.end(), rng);
    std::vector<GridPoint> boundary;
    return welzl(ds, ds.size(), boundary, static_cast<std::size_t>(ds[0].size()));
}

bool affinely_independent(std::span<const GridPoint> pts) {
    if (pts.size() <= 1) return true;
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        std::vector<Rational> r;
        for (Eigen::Index a = 0; a < pts[0].size(); ++a) r.emplace_back(pts[i](a) - pts[0](a));
        rows.push_back(std::move(r));
    }
    return rank_of(rows) == rows.size();
}

GridPoint round_center(const RationalPoint& c) {
    GridPoint p(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) p(static_cast<Eigen::Index>(i)) = c[i].round_half_up();
    return p;
}

std::int64_t feasibility_radius2(const Rational& radius2, std::span<const std::int64_t> radii) {
    if (radii.empty()) throw std::invalid_argument("no radii");
    for (auto s : radii) {
        const Rational t = Rational(s) - radius2 - Rational(1);
        if (t >= Rational(0) && t * t >= Rational(4) * radius2) return s;
    }
    return radii.back();
}

// ---- claims ----

std::string MebClaim::to_text() const {
    std::ostringstream os;
    os << "meb\ncenter";
    put_point(os, center);
    os << "\nradius2 " << radius2.str() << "\n";
    for (const auto& p : witness) {
        os << "point";
        put_point(os, p);
        os << "\n";
    }
    return os.str();
}

MebClaim MebClaim::parse(const std::string& text) {
    MebClaim c;
    bool have_center = false, have_radius = false;
    for (const auto& [line, toks] : claim_lines(text, "meb")) {
        if (toks[0] == "center") {
            c.center = to_point(ints(toks, 1, line), line);
            have_center = true;
        } else if (toks[0] == "radius2" && toks.size() == 2) {
            try {
                c.radius2 = Rational::parse(toks[1]);
            } catch (const std::exception&) {
                throw ParseError(line, "bad radius '" + toks[1] + "'");
            }
            have_radius = true;
        } else if (toks[0] == "point") {
            c.witness.push_back(to_point(ints(toks, 1, line), line));
        } else {
            throw ParseError(line, "unexpected '" + toks[0] + "'");
        }
    }
    if (!have_center || !have_radius) throw ParseError(0, "meb claim needs center and radius2");
    return c;
}

std::string WidthClaim::to_text() const {
    std::ostringstream os;
    os << "width\nnormal";
    put_point(os, slab.normal);
    os << "\noffsets " << slab.lo << " " << slab.hi << "\n";
    for (const auto& p : on_h1) {
        os << "h1";
        put_point(os, p);
        os << "\n";
    }
    for (const auto& p : on_h2) {
        os << "h2";
        put_point(os, p);
        os << "\n";
    }
    return os.str();
}

WidthClaim WidthClaim::parse(const std::string& text) {
    WidthClaim c;
    bool have_normal = false, have_offsets = false;
    for (const auto& [line, toks] : claim_lines(text, "width")) {
        if (toks[0] == "normal") {
            c.slab.normal = to_point(ints(toks, 1, line), line);
            have_normal = true;
        } else if (toks[0] == "offsets" && toks.size() == 3) {
            auto v = ints(toks, 1, line);
            c.slab.lo = v[0];
            c.slab.hi = v[1];
            have_offsets = true;
        } else if (toks[0] == "h1") {
            c.on_h1.push_back(to_point(ints(toks, 1, line), line));
        } else if (toks[0] == "h2") {
            c.on_h2.push_back(to_point(ints(toks, 1, line), line));
        } else {
            throw ParseError(line, "unexpected '" + toks[0] + "'");
        }
    }
    if (!have_normal || !have_offsets) throw ParseError(0, "width claim needs normal and offsets");
    return c;
}

std::string KCenterClaim::to_text() const {
    std::ostringstream os;
    os << "kcenter\ncenters";
    for (int x : centers) os << " " << x;
    os << "\nradius " << radius << "\nwitness";
    for (int x : witness) os << " " << x;
    os << "\n";
    return os.str();
}

KCenterClaim KCenterClaim::parse(const std::string& text) {
    KCenterClaim c;
    bool have_radius = false;
    auto as_ints = [](const std::vector<std::int64_t>& v) { return std::vector<int>(v.begin(), v.end()); };
    for (const auto& [line, toks] : claim_lines(text, "kcenter")) {
        if (toks[0] == "centers") {
            c.centers = as_ints(ints(toks, 1, line));
        } else if (toks[0] == "radius" && toks.size() == 2) {
            c.radius = ints(toks, 1, line)[0];
            have_radius = true;
        } else if (toks[0] == "witness") {
            c.witness = as_ints(ints(toks, 1, line));
        } else {
            throw ParseError(line, "unexpected '" + toks[0] + "'");
        }
    }
    if (!have_radius) throw ParseError(0, "kcenter claim needs a radius");
    return c;
}

std::string KSlabClaim::to_text() const {
    std::ostringstream os;
    os << "kslab\n";
    for (const auto& s : slabs) {
        os << "slab " << s.lo << " " << s.hi;
        put_point(os, s.normal);
        os << "\n";
    }
    return os.str();
}

KSlabClaim KSlabClaim::parse(const std::string& text) {
    KSlabClaim c;
    for (const auto& [line, toks] : claim_lines(text, "kslab")) {
        if (toks[0] != "slab" || toks.size() < 4) throw ParseError(line, "expected 'slab lo hi normal...'");
        auto v = ints(toks, 1, line);
        SlabRange s;
        s.lo = v[0];
        s.hi = v[1];
        s.normal = to_point({v.begin() + 2, v.end()}, line);
        c.slabs.push_back(s);
    }
    return c;
}

// ---- protocol plumbing ----

GeoVerifierState::GeoVerifierState(PrimeField field, std::uint64_t ranges, std::uint64_t universe, Rng& rng)
    : ranges_(field, ranges, rng), points_(field, universe, rng) {}

GeoOutcome GeoVerifierState::verify(Endpoint& ep, const std::function<ClaimCheck(const std::string&)>& check) const {
    ep.begin_session(0);
    ep.sample_state(state_elements());
    Frame f = ep.expect(PayloadKind::Claim);
    const std::string text(f.payload.begin(), f.payload.end());
    ClaimCheck cc;
    try {
        cc = check(text);
    } catch (const ParseError&) {
        cc = std::string("malformed");
    } catch (const std::invalid_argument&) {
        cc = std::string("malformed");
    }
    if (auto* why = std::get_if<std::string>(&cc)) {
        ep.send(PayloadKind::Verdict, verdict_payload(false, *why));
        return {false, *why, {}};
    }
    const auto& plan = std::get<GeoPlan>(cc);
    ep.sample_state(state_elements() + plan.claim_elements);
    ep.send(PayloadKind::Verdict, verdict_payload(true, ""));
    return run_plan(ep, plan);
}

GeoOutcome GeoVerifierState::run_plan(Endpoint& ep, const GeoPlan& plan) const {
    ep.begin_session(1);
    const auto rc = range_count(ep, ranges_, plan.range, static_cast<std::int64_t>(n_),
                                points_.state_elements() + 1 + plan.claim_elements);
    if (!rc.accepted) return {false, "range count " + rc.reason, {}};
    for (std::size_t i = 0; i < plan.witnesses.size(); ++i) {
        ep.begin_session(static_cast<std::uint32_t>(2 + i));
        const auto pq = points_.query(ep, plan.witnesses[i], std::nullopt, require_present(),
                                      ranges_.state_elements() + 1 + plan.claim_elements);
        if (!pq.accepted) return {false, "point query " + pq.reason, {}};
    }
    return {true, "", plan.value};
}

GeoProverState::GeoProverState(PrimeField field, std::uint64_t ranges, std::uint64_t universe)
    : ranges_(field, ranges), points_(field, universe) {}

std::string GeoProverState::prove(Endpoint& ep, const std::string& claim_text,
                                  const std::function<ClaimCheck(const std::string&)>& check,
                                  std::int64_t count_lie) const {
    ep.begin_session(0);
    ep.send(PayloadKind::Claim, {claim_text.begin(), claim_text.end()});
    Frame f = ep.expect(PayloadKind::Verdict);
    std::string verdict(f.payload.begin(), f.payload.end());
    if (verdict != "accept") return verdict;
    auto cc = check(claim_text);
    const auto* plan = std::get_if<GeoPlan>(&cc);
    if (!plan) throw std::logic_error("verifier accepted a claim the prover cannot plan");
    ep.begin_session(1);
    verdict = ranges_.answer(ep, plan->range, count_lie);
    for (std::size_t i = 0; i < plan->witnesses.size() && verdict == "accept"; ++i) {
        ep.begin_session(static_cast<std::uint32_t>(2 + i));
        verdict = points_.answer(ep, plan->witnesses[i]);
    }
    return verdict;
}

// ---- MEB ----

ClaimCheck check_meb_claim(const MebClaim& c, const GridUniverse& grid, const BallSpace& space) {
    const auto d = static_cast<std::size_t>(grid.d());
    if (!in_grid(c.center, grid) || c.witness.empty()) return std::string("malformed");
    for (const auto& p : c.witness)
        if (!in_grid(p, grid)) return std::string("malformed");
    if (c.witness.size() > d + 2) return std::string("witness too large");
    if (!all_distinct(c.witness)) return std::string("malformed");
    const ExactBall b = meb_by_subsets(c.witness);
    if (round_center(b.center) != c.center) return std::string("center");
    if (b.radius2 != c.radius2) return std::string("radius");
    const auto radii = grid_squared_radii(grid.m(), grid.d());
    const auto idx = space.index_of(BallRange{c.center, feasibility_radius2(c.radius2, radii)});
    if (!idx) return std::string("range");
    GeoPlan plan;
    plan.range = *idx;
    for (const auto& p : c.witness) plan.witnesses.push_back(grid.encode(p));
    plan.claim_elements = d + 2 + c.witness.size() * d;
    plan.value = c.radius2;
    return plan;
}

MebClaim meb_prove(std::span<const GridPoint> pts) {
    const ExactBall ball = meb_welzl(pts);
    std::vector<GridPoint> boundary;
    for (const auto& p : distinct_points(pts))
        if (squared_distance(ball.center, p) == ball.radius2) boundary.push_back(p);
    const int d = static_cast<int>(pts[0].size());
    const int nb = static_cast<int>(boundary.size());
    std::vector<GridPoint> witness;
    for (int size = 1; size <= std::min(d + 1, nb) && witness.empty(); ++size) {
        detail::for_each_combination(nb, size, [&](const std::vector<int>& idx) {
            std::vector<GridPoint> s;
            for (int i : idx) s.push_back(boundary[static_cast<std::size_t>(i)]);
            if (meb_by_subsets(s) != ball) return true;
            witness = std::move(s);
            return false;
        });
    }
    if (witness.empty()) throw std::runtime_error("no boundary witness for the enclosing ball");
    return MebClaim{round_center(ball.center), ball.radius2, witness};
}

// ---- width ----

ClaimCheck check_width_claim(const WidthClaim& c, const GridUniverse& grid, const SlabSpace& space) {
    const auto d = static_cast<std::size_t>(grid.d());
    const auto& s = c.slab;
    if (s.normal.size() != grid.d() || s.normal.isZero() || s.lo > s.hi) return std::string("malformed");
    for (const auto* side : {&c.on_h1, &c.on_h2})
        for (const auto& p : *side)
            if (!in_grid(p, grid)) return std::string("malformed");
    for (const auto& p : c.on_h1)
        if (dot(s.normal, p) != s.lo) return std::string("incidence");
    for (const auto& p : c.on_h2)
        if (dot(s.normal, p) != s.hi) return std::string("incidence");
    const std::size_t k1 = c.on_h1.size(), k2 = c.on_h2.size();
    const bool sizes_ok = s.lo < s.hi ? (k1 >= 1 && k2 >= 1 && k1 + k2 == d + 1) : (k2 == 0 && k1 >= 1 && k1 <= d);
    if (!sizes_ok) return std::string("witness size");
    std::vector<GridPoint> all = c.on_h1;
    all.insert(all.end(), c.on_h2.begin(), c.on_h2.end());
    if (!all_distinct(all) || !affinely_independent(all)) return std::string("witness degenerate");
    const SlabRange canon = SlabRange::canonical(s.normal, s.lo, s.hi);
    const auto idx = space.index_of(canon);
    if (!idx) return std::string("range");
    GeoPlan plan;
    plan.range = *idx;
    for (const auto& p : all) plan.witnesses.push_back(grid.encode(p));
    plan.claim_elements = d + 2 + all.size() * d;
    plan.value = canon.cost();
    return plan;
}

WidthClaim width_prove(std::span<const GridPoint> pts, const SlabSpace& space) {
    const auto ds = distinct_points(pts);
    if (ds.empty()) throw std::invalid_argument("no points");
    std::optional<SlabRange> best;
    space.for_each([&](std::uint64_t, const SlabRange& s) {
        for (const auto& p : ds)
            if (!s.contains(p)) return true;
        best = s;
        return false;
    });
    if (!best) throw std::runtime_error("no covering slab in the range space");
    WidthClaim claim{*best, {}, {}};
    std::vector<GridPoint> h1, h2;
    for (const auto& p : ds) {
        if (dot(best->normal, p) == best->lo) h1.push_back(p);
        if (dot(best->normal, p) == best->hi) h2.push_back(p);
    }
    const int d = static_cast<int>(ds[0].size());
    if (best->lo == best->hi) {
        for (const auto& p : h1) {
            claim.on_h1.push_back(p);
            if (!affinely_independent(claim.on_h1)) claim.on_h1.pop_back();
        }
        return claim;
    }
    const int n1 = static_cast<int>(h1.size()), n2 = static_cast<int>(h2.size());
    for (int k1 = 1; k1 <= d; ++k1) {
        const int k2 = d + 1 - k1;
        bool found = false;
        detail::for_each_combination(n1, k1, [&](const std::vector<int>& i1) {
            detail::for_each_combination(n2, k2, [&](const std::vector<int>& i2) {
                std::vector<GridPoint> all;
                for (int i : i1) all.push_back(h1[static_cast<std::size_t>(i)]);
                for (int i : i2) all.push_back(h2[static_cast<std::size_t>(i)]);
                if (!affinely_independent(all)) return true;
                claim.on_h1.assign(all.begin(), all.begin() + k1);
                claim.on_h2.assign(all.begin() + k1, all.end());
                found = true;
                return false;
            });
            return !found;
        });
        if (found) return claim;
    }
    throw std::runtime_error("no incidence witness for the optimal slab");
}

Rational width_oracle_pairs(std::span<const GridPoint> pts) {
    const auto ds = distinct_points(pts);
    if (ds.size() < 2) return Rational(0);
    if (ds[0].size() != 2) throw std::invalid_argument("pair oracle is planar");
    std::optional<Rational> best;
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = i + 1; j < ds.size(); ++j) {
            const GridPoint e = ds[j] - ds[i];
            const GridPoint n = make_point({-e(1), e(0)});
            std::int64_t lo = dot(n, ds[0]), hi = lo;
            for (const auto& p : ds) {
                lo = std::min(lo, dot(n, p));
                hi = std::max(hi, dot(n, p));
            }
            const Rational w(static_cast<Rational::Int>(hi - lo) * (hi - lo), n.squaredNorm());
            if (!best || w < *best) best = w;
        }
    return *best;
}

// ---- metric k-center ----

ClaimCheck check_kcenter_claim(const KCenterClaim& c, int k, const MetricSpace& metric, const MetricBallUnionSpace& space) {
    const int m = metric.size();
    auto valid = [&](const std::vector<int>& xs) {
        std::set<int> seen;
        for (int x : xs)
            if (x < 0 || x >= m || !seen.insert(x).second) return false;
        return true;
    };
    if (static_cast<int>(c.centers.size()) != k || !valid(c.centers) || !valid(c.witness) || c.radius < 0)
        return std::string("malformed");
    const auto w = static_cast<int>(c.witness.size());
    if (c.radius > 0) {
        if (w != k + 1) return std::string("witness size");
        for (int i = 0; i < w; ++i)
            for (int j = i + 1; j < w; ++j)
                if (metric(c.witness[static_cast<std::size_t>(i)], c.witness[static_cast<std::size_t>(j)]) < c.radius)
                    return std::string("witness distance");
    } else if (w < 1 || w > k + 1) {
        return std::string("witness size");
    }
    std::vector<int> sorted = c.centers;
    std::sort(sorted.begin(), sorted.end());
    const auto idx = space.index_of(MetricBallUnionRange{sorted, c.radius, &metric});
    if (!idx) return std::string("range");
    GeoPlan plan;
    plan.range = *idx;
    for (int x : c.witness) plan.witnesses.push_back(static_cast<std::uint64_t>(x));
    plan.claim_elements = static_cast<std::size_t>(k + 1 + w);
    plan.value = Rational(c.radius);
    return plan;
}

KCenterClaim kcenter_prove(const MetricSpace& metric, std::span<const int> pts, int k) {
    std::vector<int> ds(pts.begin(), pts.end());
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    if (ds.empty()) throw std::invalid_argument("no points");
    if (k < 1 || k > metric.size()) throw std::invalid_argument("k must lie in [1, m]");
    KCenterClaim c;
    if (static_cast<int>(ds.size()) <= k) {
        c.centers = ds;
        for (int x = 0; static_cast<int>(c.centers.size()) < k; ++x)
            if (!std::binary_search(ds.begin(), ds.end(), x)) c.centers.push_back(x);
        c.radius = 0;
        c.witness = ds;
        return c;
    }
    std::vector<std::int64_t> near(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) near[i] = metric(ds[i], ds[0]);
    c.centers.push_back(ds[0]);
    auto farthest = [&] {
        std::size_t best = 0;
        for (std::size_t i = 1; i < ds.size(); ++i)
            if (near[i] > near[best]) best = i;
        return best;
    };
    while (static_cast<int>(c.centers.size()) < k) {
        const std::size_t f = farthest();
        c.centers.push_back(ds[f]);
        for (std::size_t i = 0; i < ds.size(); ++i) near[i] = std::min(near[i], metric(ds[i], ds[f]));
    }
    const std::size_t u = farthest();
    c.radius = near[u];
    c.witness = c.centers;
    c.witness.push_back(ds[u]);
    return c;
}

std::int64_t kcenter_opt(const MetricSpace& metric, std::span<const int> pts, int k) {
    std::optional<std::int64_t> best;
    detail::for_each_combination(metric.size(), k, [&](const std::vector<int>& cs) {
        std::int64_t worst = 0;
        for (int p : pts) {
            std::int64_t near = metric(p, cs[0]);
            for (int c : cs) near = std::min(near, metric(p, c));
            worst = std::max(worst, near);
            if (best && worst >= *best) return;
        }
        best = worst;
    });
    if (!best) throw std::invalid_argument("k must lie in [1, m]");
    return *best;
}

std::optional<std::int64_t> distance_below(const MetricSpace& metric, std::int64_t r) {
    std::optional<std::int64_t> out;
    for (auto x : metric.distinct_distances())
        if (x < r) out = x;
    return out;
}

MetricSpace random_graph_metric(int m, Rng& rng, std::int64_t max_weight) {
    if (m < 1) throw std::invalid_argument("metric size must be positive");
    constexpr std::int64_t inf = std::int64_t{1} << 40;
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> d =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, m, inf);
    std::uniform_int_distribution<std::int64_t> w(1, max_weight);
    auto edge = [&](int a, int b) {
        const auto x = w(rng);
        d(a, b) = d(b, a) = std::min(d(a, b), x);
    };
    for (int i = 1; i < m; ++i) edge(i, std::uniform_int_distribution<int>(0, i - 1)(rng));
    std::uniform_int_distribution<int> any(0, m - 1);
    for (int e = 0; e < m; ++e) {
        const int a = any(rng), b = any(rng);
        if (a != b) edge(a, b);
    }
    for (int i = 0; i < m; ++i) d(i, i) = 0;
    for (int t = 0; t < m; ++t)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) d(i, j) = std::min(d(i, j), d(i, t) + d(t, j));
    return MetricSpace(std::move(d));
}

// ---- k-slab ----

ClaimCheck check_kslab_claim(const KSlabClaim& c, int k, const KSlabSpace& space) {
    if (static_cast<int>(c.slabs.size()) != k) return std::string("malformed");
    std::vector<SlabRange> canon;
    for (const auto& s : c.slabs) {
        if (s.normal.isZero()) return std::string("malformed");
        canon.push_back(SlabRange::canonical(s.normal, s.lo, s.hi));
    }
    const KSlabRange ks = KSlabRange::canonical(std::move(canon));
    const auto idx = space.index_of(ks);
    if (!idx) return std::string("range");
    GeoPlan plan;
    plan.range = *idx;
    plan.claim_elements = 0;
    for (const auto& s : ks.slabs) plan.claim_elements += static_cast<std::size_t>(s.normal.size()) + 2;
    plan.value = ks.cost();
    return plan;
}

KSlabClaim kslab_prove(std::span<const GridPoint> pts, const KSlabSpace& space) {
    std::optional<KSlabRange> best;
    space.for_each([&](std::uint64_t, const KSlabRange& r) {
        for (const auto& p : pts)
            if (!r.contains(p)) return true;
        best = r;
        return false;
    });
    if (!best) throw std::runtime_error("no covering k-slab in the range space");
    return KSlabClaim{best->slabs};
}

}  // namespace sipkit
