#pragma once

#include "sipkit/mle.hpp"
#include "sipkit/range_space.hpp"
#include "sipkit/sumcheck.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sipkit {

/// Throws std::invalid_argument unless |F| >= u * delta^2. delta <= 0 skips the check.
void check_field_policy(const PrimeField& field, std::uint64_t u, std::int64_t delta);

struct PointQueryResult {
    bool accepted = false;
    std::string reason;
    std::optional<FieldElement> value;

    std::int64_t as_int() const { return value ? value->to_signed() : 0; }
};

/// Verifier side: a random point fixed before the stream, the MLE of the
/// frequency vector at that point, and nothing that depends on the query.
class PointQueryVerifier {
public:
    PointQueryVerifier(PrimeField field, std::uint64_t u, Rng& rng, std::int64_t delta = 0);

    std::uint64_t universe() const { return u_; }
    const MleEvalState& mle() const { return mle_; }
    void observe(const StreamUpdate& upd);
    std::size_t state_elements() const { return mle_.state_elements(); }

    /// Sum-check on a_hat * chi_q. With `expected`, the first message must sum to it.
    /// `held_state` counts other verifier state alive during the session.
    PointQueryResult query(Endpoint& ep, std::uint64_t q, std::optional<std::int64_t> expected = std::nullopt,
                           const AcceptCheck& check = {}, std::size_t held_state = 0) const;

private:
    PrimeField field_;
    std::uint64_t u_;
    MleEvalState mle_;
};

class PointQueryProver {
public:
    PointQueryProver(PrimeField field, std::uint64_t u);

    std::uint64_t universe() const { return u_; }
    void observe(const StreamUpdate& upd);
    const std::vector<std::int64_t>& frequencies() const { return freqs_; }

    SumcheckProver prover_for(std::uint64_t q) const;
    /// Runs the prover side; a nonzero `lie` shifts the claimed value. Returns the verdict text.
    std::string answer(Endpoint& ep, std::uint64_t q, std::int64_t lie = 0) const;

private:
    PrimeField field_;
    std::uint64_t u_;
    std::vector<std::int64_t> freqs_;
};

/// Feeds the derived stream of point p (one update per range containing it).
template <Range R, class Sink>
void observe_derived(Sink& sink, const RangeSpace<R>& space, const typename R::point_type& p) {
    for_each_containing(space, p, [&](const StreamUpdate& u) { sink.observe(u); });
}

/// Accepts iff the prover convinces the verifier that |points in sigma| = k.
inline PointQueryResult range_count(Endpoint& ep, const PointQueryVerifier& pq, std::uint64_t sigma, std::int64_t k,
                                    std::size_t held_state = 0) {
    return pq.query(ep, sigma, k, {}, held_state);
}

/// Accept check requiring the verified frequency to be at least one.
AcceptCheck require_present();

}  // namespace sipkit
