#include "sipkit/sumcheck.hpp"

#include <stdexcept>

namespace sipkit {

SumcheckProver::SumcheckProver(PrimeField field, std::vector<std::vector<FieldElement>> tables, int degree,
                               Combiner combine)
    : field_(field), tables_(std::move(tables)), degree_(degree), combine_(std::move(combine)), v_(0) {
    if (tables_.empty()) throw std::invalid_argument("sum-check needs at least one table");
    if (degree_ < 0) throw std::invalid_argument("negative degree");
    const std::size_t size = tables_.front().size();
    if (size < 2 || (size & (size - 1)) != 0) throw std::invalid_argument("table size must be a power of two >= 2");
    for (const auto& t : tables_)
        if (t.size() != size) throw std::invalid_argument("tables differ in size");
    while ((std::size_t{1} << v_) < size) ++v_;
}

FieldElement SumcheckProver::eval_at(std::size_t b, const FieldElement& t, std::vector<FieldElement>& scratch) const {
    const std::size_t half = tables_.front().size() / 2;
    for (std::size_t k = 0; k < tables_.size(); ++k) {
        const auto& T = tables_[k];
        scratch[k] = T[b] + t * (T[b + half] - T[b]);
    }
    return combine_(scratch);
}

std::vector<FieldElement> SumcheckProver::message() {
    if (round_ >= v_) throw std::logic_error("all rounds already bound");
    const std::size_t half = tables_.front().size() / 2;
    std::vector<FieldElement> scratch(tables_.size(), field_.zero());
    std::vector<FieldElement> values;
    values.reserve(static_cast<std::size_t>(degree_) + 1);
    for (int t = 0; t <= degree_; ++t) {
        const FieldElement tv = field_.from_uint(static_cast<std::uint64_t>(t));
        FieldElement acc = field_.zero();
        for (std::size_t b = 0; b < half; ++b) acc += eval_at(b, tv, scratch);
        values.push_back(acc);
    }
    return interpolate_consecutive(values).padded(static_cast<std::size_t>(degree_) + 1);
}

void SumcheckProver::bind(const FieldElement& r) {
    if (round_ >= v_) throw std::logic_error("all rounds already bound");
    const std::size_t half = tables_.front().size() / 2;
    for (auto& T : tables_) {
        for (std::size_t b = 0; b < half; ++b) T[b] += r * (T[b + half] - T[b]);
        T.resize(half);
    }
    ++round_;
}

FieldElement SumcheckProver::total() const {
    std::vector<FieldElement> scratch(tables_.size(), field_.zero());
    FieldElement acc = field_.zero();
    for (std::size_t b = 0; b < tables_.front().size(); ++b) {
        for (std::size_t k = 0; k < tables_.size(); ++k) scratch[k] = tables_[k][b];
        acc += combine_(scratch);
    }
    return acc;
}

GreedyCheatingProver::GreedyCheatingProver(SumcheckProver honest, FieldElement offset)
    : honest_(std::move(honest)), delta_(offset) {}

std::vector<FieldElement> GreedyCheatingProver::message() {
    auto m = honest_.message();
    if (m.size() < 2) m.resize(2, delta_.field().zero());
    m[1] += delta_;
    return m;
}

void GreedyCheatingProver::bind(const FieldElement& r) {
    delta_ *= r;
    honest_.bind(r);
}

SumcheckVerifier::SumcheckVerifier(std::vector<int> degree_bounds, std::vector<FieldElement> challenges,
                                   std::optional<FieldElement> expected_sum)
    : bounds_(std::move(degree_bounds)), challenges_(std::move(challenges)), expected_(std::move(expected_sum)) {
    if (challenges_.empty()) throw std::invalid_argument("sum-check needs at least one variable");
    if (bounds_.size() != challenges_.size()) throw std::invalid_argument("one degree bound per variable");
    running_ = challenges_.front().field().zero();
}

std::optional<FieldElement> SumcheckVerifier::receive(unsigned j, std::span<const FieldElement> coeffs) {
    if (rejected() || j != round_ || round_ >= challenges_.size())
        throw ProtocolError("sum-check message for round " + std::to_string(j) + " out of order");
    if (coeffs.size() > static_cast<std::size_t>(bounds_[j]) + 1) {
        reason_ = "degree";
        return std::nullopt;
    }
    const PrimeField f = running_.field();
    FieldElement at0 = coeffs.empty() ? f.zero() : coeffs[0];
    FieldElement at1 = f.zero();
    for (const auto& c : coeffs) at1 += c;
    const FieldElement s = at0 + at1;
    if (j == 0) {
        if (expected_ && !(s == *expected_)) {
            reason_ = "sum";
            return std::nullopt;
        }
        claim_ = s;
    } else if (!(s == running_)) {
        reason_ = "sum";
        return std::nullopt;
    }
    const FieldElement& r = challenges_[j];
    FieldElement val = f.zero();
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) val = val * r + *it;
    running_ = val;
    last_msg_ = coeffs.size();
    ++round_;
    return r;
}

bool SumcheckVerifier::final_check(const FieldElement& g_at_r) {
    if (rejected() || round_ != challenges_.size()) throw ProtocolError("final check before all rounds");
    if (!(running_ == g_at_r)) reason_ = "final";
    return !rejected();
}

std::size_t SumcheckVerifier::state_elements() const { return challenges_.size() + 2 + last_msg_; }

FrequencyStatistic::FrequencyStatistic(UnivariatePoly h_, std::uint64_t u_)
    : h(std::move(h_)), u(u_), v(num_vars_for(u_)) {}

SumcheckProver FrequencyStatistic::prover(std::span<const std::int64_t> freqs) const {
    auto table = lift_table(freqs, h.field(), v);
    auto poly = h;
    return SumcheckProver(h.field(), {std::move(table)}, degree(),
                          [poly](std::span<const FieldElement> x) { return poly(x[0]); });
}

FieldElement FrequencyStatistic::evaluate(std::span<const std::int64_t> freqs) const {
    const PrimeField f = h.field();
    FieldElement acc = f.zero();
    const std::uint64_t n = std::uint64_t{1} << v;
    for (std::uint64_t i = 0; i < n; ++i) acc += h(f.from_int(i < freqs.size() ? freqs[i] : 0));
    return acc;
}

FrequencyStatisticVerifier::FrequencyStatisticVerifier(FrequencyStatistic fs, Rng& rng)
    : fs_(std::move(fs)), mle_(sample_vector(rng, fs_.h.field(), fs_.v)) {}

void FrequencyStatisticVerifier::observe(const StreamUpdate& upd) {
    if (upd.index >= fs_.u) throw std::out_of_range("update index outside the universe");
    mle_.update(upd);
}

SumcheckOutcome FrequencyStatisticVerifier::verify(Endpoint& ep) const {
    SumcheckVerifier vs(fs_.degree_bounds(), mle_.point());
    return verify_sumcheck(ep, vs, [&] { return fs_.h(mle_.value()); }, 1);
}

SumcheckOutcome verify_sumcheck(Endpoint& ep, SumcheckVerifier& vs, const std::function<FieldElement()>& oracle,
                                std::size_t extra_state, const AcceptCheck& check) {
    SumcheckOutcome out;
    for (unsigned j = 0; j < vs.num_vars(); ++j) {
        std::vector<FieldElement> coeffs;
        try {
            coeffs = ep.expect_elements(PayloadKind::Polynomial);
        } catch (const std::invalid_argument&) {
            out.reason = "malformed";
            ep.send(PayloadKind::Verdict, verdict_payload(false, out.reason));
            return out;
        }
        const auto r = vs.receive(j, coeffs);
        ep.sample_state(vs.state_elements() + extra_state);
        if (!r) {
            out.reason = vs.reason();
            out.claimed_sum = vs.claimed_sum();
            ep.send(PayloadKind::Verdict, verdict_payload(false, out.reason));
            return out;
        }
        const FieldElement c[1] = {*r};
        ep.send_elements(PayloadKind::Challenge, c);
    }
    out.accepted = vs.final_check(oracle());
    out.reason = vs.reason();
    out.claimed_sum = vs.claimed_sum();
    if (out.accepted && check) {
        out.reason = check(*out.claimed_sum);
        out.accepted = out.reason.empty();
    }
    ep.send(PayloadKind::Verdict, verdict_payload(out.accepted, out.reason));
    return out;
}

std::string prove_sumcheck(Endpoint& ep, RoundProver& prover) {
    for (unsigned j = 0; j < prover.num_vars(); ++j) {
        ep.send_elements(PayloadKind::Polynomial, prover.message());
        Frame f = ep.recv();
        if (f.kind == PayloadKind::Verdict) return std::string(f.payload.begin(), f.payload.end());
        if (f.kind != PayloadKind::Challenge) throw ProtocolError("expected a challenge frame");
        const auto r = decode_elements(f.payload, ep.field());
        if (r.size() != 1) throw ProtocolError("challenge frame must hold one element");
        prover.bind(r[0]);
    }
    Frame f = ep.expect(PayloadKind::Verdict);
    return std::string(f.payload.begin(), f.payload.end());
}

}  // namespace sipkit
