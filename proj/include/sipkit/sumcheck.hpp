#pragma once

#include "sipkit/field.hpp"
#include "sipkit/mle.hpp"
#include "sipkit/poly.hpp"
#include "sipkit/transport.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sipkit {

struct SumcheckInstance {
    unsigned v = 0;
    std::vector<int> degree_bounds;  // one per variable
    FieldElement claimed_sum;
};

/// Source of round messages. Round j's message is a coefficient vector; bind()
/// fixes variable j to the verifier's challenge.
class RoundProver {
public:
    virtual ~RoundProver() = default;
    virtual unsigned num_vars() const = 0;
    virtual std::vector<FieldElement> message() = 0;
    virtual void bind(const FieldElement& r) = 0;
};

/// g(x) = combine(T_1(x), ..., T_m(x)) for multilinear tables T_k of size 2^v.
/// combine must have degree at most `degree` in its inputs jointly.
class SumcheckProver : public RoundProver {
public:
    using Combiner = std::function<FieldElement(std::span<const FieldElement>)>;

    SumcheckProver(PrimeField field, std::vector<std::vector<FieldElement>> tables, int degree, Combiner combine);

    unsigned num_vars() const override { return v_; }
    int degree() const { return degree_; }
    unsigned round() const { return round_; }

    /// True g_j, padded to degree + 1 coefficients.
    std::vector<FieldElement> message() override;
    void bind(const FieldElement& r) override;

    /// Sum of g over the remaining cube.
    FieldElement total() const;

private:
    FieldElement eval_at(std::size_t b, const FieldElement& t, std::vector<FieldElement>& scratch) const;

    PrimeField field_;
    std::vector<std::vector<FieldElement>> tables_;
    int degree_;
    Combiner combine_;
    unsigned v_;
    unsigned round_ = 0;
};

/// Claims a sum off by `offset` and patches each round with a linear term so
/// the consistency checks pass; caught unless some challenge is zero.
class GreedyCheatingProver : public RoundProver {
public:
    GreedyCheatingProver(SumcheckProver honest, FieldElement offset);

    unsigned num_vars() const override { return honest_.num_vars(); }
    std::vector<FieldElement> message() override;
    void bind(const FieldElement& r) override;

private:
    SumcheckProver honest_;
    FieldElement delta_;
};

/// Verifier whose challenges were drawn before the stream (they are the point
/// at which the oracle was evaluated) and are revealed one per round.
class SumcheckVerifier {
public:
    /// With no expected sum, the claim is read off the first message.
    SumcheckVerifier(std::vector<int> degree_bounds, std::vector<FieldElement> challenges,
                     std::optional<FieldElement> expected_sum = std::nullopt);

    unsigned num_vars() const { return static_cast<unsigned>(challenges_.size()); }
    unsigned round() const { return round_; }

    /// Checks round j (0-based, must be the next round). Returns the challenge
    /// to reveal, or nullopt after a rejection.
    std::optional<FieldElement> receive(unsigned j, std::span<const FieldElement> coeffs);
    /// Compares g_v(r_v) with the oracle value g(r).
    bool final_check(const FieldElement& g_at_r);

    bool rejected() const { return !reason_.empty(); }
    const std::string& reason() const { return reason_; }
    /// The sum being verified: expected sum, or g_1(0) + g_1(1).
    const std::optional<FieldElement>& claimed_sum() const { return claim_; }

    std::size_t state_elements() const;

private:
    std::vector<int> bounds_;
    std::vector<FieldElement> challenges_;
    std::optional<FieldElement> expected_;
    std::optional<FieldElement> claim_;
    FieldElement running_;  // g_{j-1}(r_{j-1})
    std::size_t last_msg_ = 0;
    unsigned round_ = 0;
    std::string reason_;
};

/// h applied to the multilinear extension of a frequency vector.
struct FrequencyStatistic {
    UnivariatePoly h;
    std::uint64_t u;
    unsigned v;

    FrequencyStatistic(UnivariatePoly h, std::uint64_t u);

    int degree() const { return std::max(h.degree(), 0); }
    std::vector<int> degree_bounds() const { return std::vector<int>(v, degree()); }
    SumcheckProver prover(std::span<const std::int64_t> freqs) const;
    /// Exact sum_i h(a_i) over the padded universe.
    FieldElement evaluate(std::span<const std::int64_t> freqs) const;
};

struct SumcheckOutcome;

/// Streaming verifier for sum_i h(a_i): the point is drawn before the stream and
/// the only stream state is the multilinear extension at that point.
class FrequencyStatisticVerifier {
public:
    FrequencyStatisticVerifier(FrequencyStatistic fs, Rng& rng);

    const FrequencyStatistic& statistic() const { return fs_; }
    void observe(const StreamUpdate& upd);
    /// Runs the rounds and sends the verdict.
    SumcheckOutcome verify(Endpoint& ep) const;
    std::size_t stream_state_elements() const { return mle_.state_elements(); }

private:
    FrequencyStatistic fs_;
    MleEvalState mle_;
};

struct SumcheckOutcome {
    bool accepted = false;
    std::string reason;  // "degree", "sum", "final", "malformed", or empty
    std::optional<FieldElement> claimed_sum;
};

/// Extra condition on a verified sum; returns a reject reason or an empty string.
using AcceptCheck = std::function<std::string(const FieldElement& verified_sum)>;

/// Verifier loop over an endpoint. `oracle` yields g(r) once every round has
/// passed. `extra_state` is verifier state held outside the sum-check (e.g. the
/// oracle accumulator). `check` runs on the verified sum before the verdict
/// frame is sent.
SumcheckOutcome verify_sumcheck(Endpoint& ep, SumcheckVerifier& vs, const std::function<FieldElement()>& oracle,
                                std::size_t extra_state = 0, const AcceptCheck& check = {});

/// Prover loop over an endpoint; returns the verifier's verdict text.
std::string prove_sumcheck(Endpoint& ep, RoundProver& prover);

inline std::vector<std::uint8_t> verdict_payload(bool accepted, const std::string& reason) {
    std::string s = accepted ? "accept" : "reject:" + reason;
    return {s.begin(), s.end()};
}

}  // namespace sipkit
