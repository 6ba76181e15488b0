#pragma once

#include "sipkit/pq_rc.hpp"
#include "sipkit/range_space.hpp"
#include "sipkit/rational.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sipkit {

// ---- exact small-case geometry ----

using RationalPoint = std::vector<Rational>;

struct ExactBall {
    RationalPoint center;
    Rational radius2;

    bool contains(const GridPoint& p) const;
    bool operator==(const ExactBall&) const = default;
};

/// Center and squared radius of the smallest ball with every point of s on its
/// boundary and its center in the affine hull of s; nullopt if s is affinely dependent.
std::optional<ExactBall> circumball(std::span<const GridPoint> s);

/// Minimum enclosing ball by enumerating circumballs of subsets of size <= d+1.
/// Exact; meant for witness sets and test oracles.
ExactBall meb_by_subsets(std::span<const GridPoint> pts);

/// Welzl's recursion in exact arithmetic.
ExactBall meb_welzl(std::span<const GridPoint> pts);

bool affinely_independent(std::span<const GridPoint> pts);

GridPoint round_center(const RationalPoint& c);

/// Smallest squared radius s in `radii` (ascending) with sqrt(s) >= sqrt(radius2) + 1;
/// the largest one when none qualifies.
std::int64_t feasibility_radius2(const Rational& radius2, std::span<const std::int64_t> radii);

// ---- claims ----

struct MebClaim {
    GridPoint center;
    Rational radius2;
    std::vector<GridPoint> witness;

    std::string to_text() const;
    static MebClaim parse(const std::string& text);
    bool operator==(const MebClaim&) const = default;
};

struct WidthClaim {
    SlabRange slab;                // lo on h1, hi on h2
    std::vector<GridPoint> on_h1;  // <normal, p> = lo
    std::vector<GridPoint> on_h2;  // <normal, p> = hi

    std::string to_text() const;
    static WidthClaim parse(const std::string& text);
    bool operator==(const WidthClaim&) const = default;
};

struct KCenterClaim {
    std::vector<int> centers;
    std::int64_t radius = 0;
    std::vector<int> witness;

    std::string to_text() const;
    static KCenterClaim parse(const std::string& text);
    bool operator==(const KCenterClaim&) const = default;
};

struct KSlabClaim {
    std::vector<SlabRange> slabs;

    std::string to_text() const;
    static KSlabClaim parse(const std::string& text);
    bool operator==(const KSlabClaim&) const = default;
};

// ---- protocol plumbing shared by the four protocols ----

/// What the verifier asks after accepting a claim: RangeCount(range) = n in
/// session 1, then PointQuery(w) >= 1 in sessions 2, 3, ...
struct GeoPlan {
    std::uint64_t range = 0;
    std::vector<std::uint64_t> witnesses;  // point universe indices
    std::size_t claim_elements = 0;        // integers the verifier keeps from the claim
    Rational value;                        // the claimed cost
};

/// Either a reject reason or the plan.
using ClaimCheck = std::variant<std::string, GeoPlan>;

struct GeoOutcome {
    bool accepted = false;
    std::string reason;
    Rational value;  // on accept, the claimed cost (squared radius or width, metric radius)
};

/// Verifier stream state: MLE of the derived range stream, MLE of the point
/// stream, and the count n.
class GeoVerifierState {
public:
    GeoVerifierState(PrimeField field, std::uint64_t ranges, std::uint64_t universe, Rng& rng);

    template <Range R>
    void observe(const RangeSpace<R>& space, const typename R::point_type& p, std::uint64_t index) {
        observe_derived(ranges_, space, p);
        points_.observe({index, 1});
        ++n_;
    }

    std::uint64_t count() const { return n_; }
    std::size_t state_elements() const { return ranges_.state_elements() + points_.state_elements() + 1; }

    /// Session 0: receive the claim, run `check`, send its verdict; then the plan.
    /// Parse errors in the claim count as a "malformed" reject.
    GeoOutcome verify(Endpoint& ep, const std::function<ClaimCheck(const std::string&)>& check) const;
    GeoOutcome run_plan(Endpoint& ep, const GeoPlan& plan) const;

private:
    PointQueryVerifier ranges_;
    PointQueryVerifier points_;
    std::uint64_t n_ = 0;
};

class GeoProverState {
public:
    GeoProverState(PrimeField field, std::uint64_t ranges, std::uint64_t universe);

    template <Range R>
    void observe(const RangeSpace<R>& space, const typename R::point_type& p, std::uint64_t index) {
        observe_derived(ranges_, space, p);
        points_.observe({index, 1});
        ++n_;
    }

    std::uint64_t count() const { return n_; }
    std::int64_t range_count(std::uint64_t range) const { return ranges_.frequencies().at(range); }

    /// Sends the claim, then answers the plan. `count_lie` shifts the RangeCount answer.
    std::string prove(Endpoint& ep, const std::string& claim_text, const std::function<ClaimCheck(const std::string&)>& check,
                      std::int64_t count_lie = 0) const;

private:
    PointQueryProver ranges_;
    PointQueryProver points_;
    std::uint64_t n_ = 0;
};

// ---- MEB ----

/// Local checks on an MEB claim against grid and ball space.
ClaimCheck check_meb_claim(const MebClaim& c, const GridUniverse& grid, const BallSpace& space);
MebClaim meb_prove(std::span<const GridPoint> pts);

// ---- width ----

ClaimCheck check_width_claim(const WidthClaim& c, const GridUniverse& grid, const SlabSpace& space);
/// First covering slab in canonical order plus an incidence witness.
/// Throws std::runtime_error if no witness exists.
WidthClaim width_prove(std::span<const GridPoint> pts, const SlabSpace& space);
/// Minimum squared width over directions perpendicular to a point difference (d = 2).
Rational width_oracle_pairs(std::span<const GridPoint> pts);

// ---- metric k-center ----

ClaimCheck check_kcenter_claim(const KCenterClaim& c, int k, const MetricSpace& metric, const MetricBallUnionSpace& space);
/// Farthest-first traversal from the lowest id, ties to the lowest id.
KCenterClaim kcenter_prove(const MetricSpace& metric, std::span<const int> pts, int k);
/// Exhaustive optimum over k-subsets of the metric as centers.
std::int64_t kcenter_opt(const MetricSpace& metric, std::span<const int> pts, int k);
/// Largest distance of the metric strictly below `r`, if any.
std::optional<std::int64_t> distance_below(const MetricSpace& metric, std::int64_t r);

/// Shortest-path metric of a random connected graph with small integer weights.
MetricSpace random_graph_metric(int m, Rng& rng, std::int64_t max_weight = 3);

// ---- k-slab feasibility ----

ClaimCheck check_kslab_claim(const KSlabClaim& c, int k, const KSlabSpace& space);
/// First covering k-slab in canonical order.
KSlabClaim kslab_prove(std::span<const GridPoint> pts, const KSlabSpace& space);

}  // namespace sipkit
