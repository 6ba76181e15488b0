#include "sipkit/pq_rc.hpp"

#include <stdexcept>

namespace sipkit {

void check_field_policy(const PrimeField& field, std::uint64_t u, std::int64_t delta) {
    if (delta <= 0) return;
    const unsigned __int128 need = static_cast<unsigned __int128>(u) * static_cast<unsigned __int128>(delta) *
                                   static_cast<unsigned __int128>(delta);
    if (static_cast<unsigned __int128>(field.modulus()) < need)
        throw std::invalid_argument("field too small: need |F| >= u * delta^2");
}

PointQueryVerifier::PointQueryVerifier(PrimeField field, std::uint64_t u, Rng& rng, std::int64_t delta)
    : field_(field), u_(u), mle_(sample_vector(rng, field, num_vars_for(u))) {
    if (u == 0) throw std::invalid_argument("empty universe");
    check_field_policy(field, u, delta);
}

void PointQueryVerifier::observe(const StreamUpdate& upd) {
    if (upd.index >= u_) throw std::out_of_range("update index outside the universe");
    mle_.update(upd);
}

PointQueryResult PointQueryVerifier::query(Endpoint& ep, std::uint64_t q, std::optional<std::int64_t> expected,
                                           const AcceptCheck& check, std::size_t held_state) const {
    if (q >= u_) throw std::out_of_range("query outside the universe");
    const unsigned v = mle_.num_vars();
    std::optional<FieldElement> exp;
    if (expected) exp = field_.from_int(*expected);
    SumcheckVerifier vs(std::vector<int>(v, 2), mle_.point(), exp);
    auto oracle = [&] { return mle_.value() * chi_eval(q, mle_.point()); };
    const auto out = verify_sumcheck(ep, vs, oracle, 1 + held_state, check);
    return PointQueryResult{out.accepted, out.reason, out.claimed_sum};
}

AcceptCheck require_present() {
    return [](const FieldElement& x) { return x.to_signed() >= 1 ? std::string() : std::string("not in stream"); };
}

PointQueryProver::PointQueryProver(PrimeField field, std::uint64_t u) : field_(field), u_(u), freqs_(u, 0) {
    if (u == 0) throw std::invalid_argument("empty universe");
}

void PointQueryProver::observe(const StreamUpdate& upd) {
    if (upd.index >= u_) throw std::out_of_range("update index outside the universe");
    freqs_[upd.index] += upd.delta;
}

SumcheckProver PointQueryProver::prover_for(std::uint64_t q) const {
    if (q >= u_) throw std::out_of_range("query outside the universe");
    const unsigned v = num_vars_for(u_);
    auto a = lift_table(freqs_, field_, v);
    std::vector<FieldElement> chi(a.size(), field_.zero());
    chi[q] = field_.one();
    return SumcheckProver(field_, {std::move(a), std::move(chi)}, 2,
                          [](std::span<const FieldElement> x) { return x[0] * x[1]; });
}

std::string PointQueryProver::answer(Endpoint& ep, std::uint64_t q, std::int64_t lie) const {
    auto honest = prover_for(q);
    if (lie == 0) return prove_sumcheck(ep, honest);
    GreedyCheatingProver cheat(std::move(honest), field_.from_int(lie));
    return prove_sumcheck(ep, cheat);
}

}  // namespace sipkit
