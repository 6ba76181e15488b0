#include "sipkit/mle.hpp"

#include <stdexcept>

namespace sipkit {

unsigned num_vars_for(std::uint64_t u) {
    unsigned v = 1;
    while (v < 63 && (std::uint64_t{1} << v) < u) ++v;
    return v;
}

std::vector<bool> index_bits(std::uint64_t i, unsigned v) {
    std::vector<bool> bits(v);
    for (unsigned k = 0; k < v; ++k) bits[k] = (i >> (v - 1 - k)) & 1;
    return bits;
}

FieldElement chi_eval(const std::vector<bool>& i, std::span<const FieldElement> x) {
    if (i.size() != x.size()) throw std::invalid_argument("chi_eval: length mismatch");
    if (x.empty()) throw std::invalid_argument("chi_eval: empty point");
    const PrimeField field = x.front().field();
    FieldElement acc = field.one();
    for (std::size_t k = 0; k < x.size(); ++k) acc *= i[k] ? x[k] : field.one() - x[k];
    return acc;
}

FieldElement chi_eval(std::uint64_t index, std::span<const FieldElement> x) {
    const auto v = x.size();
    if (v == 0) throw std::invalid_argument("chi_eval: empty point");
    if (v < 64 && (index >> v) != 0) throw std::out_of_range("chi_eval: index outside hypercube");
    const FieldElement one = x.front().field().one();
    FieldElement acc = one;
    for (std::size_t k = 0; k < v; ++k) {
        const bool bit = (index >> (v - 1 - k)) & 1;
        acc *= bit ? x[k] : one - x[k];
    }
    return acc;
}

MleEvalState::MleEvalState(std::vector<FieldElement> point) : r_(std::move(point)) {
    if (r_.empty()) throw std::invalid_argument("MLE point must have at least one coordinate");
    acc_ = r_.front().field().zero();
}

void MleEvalState::update(const StreamUpdate& upd) {
    acc_ += acc_.field().from_int(upd.delta) * chi_eval(upd.index, r_);
}

void MleEvalState::merge(const MleEvalState& other) {
    if (other.r_ != r_) throw std::invalid_argument("cannot merge MLE states at different points");
    acc_ += other.acc_;
}

FieldElement mle_full_eval(std::span<const FieldElement> a, std::span<const FieldElement> x) {
    if (x.empty()) throw std::invalid_argument("mle_full_eval: empty point");
    if (x.size() >= 63 || a.size() != (std::size_t{1} << x.size()))
        throw std::invalid_argument("mle_full_eval: table size must be 2^v");
    // Fold the top variable first: T'[b] = (1 - x_1) T[b] + x_1 T[b + half].
    std::vector<FieldElement> t(a.begin(), a.end());
    std::size_t half = t.size() / 2;
    for (const auto& xk : x) {
        for (std::size_t b = 0; b < half; ++b) t[b] = t[b] + xk * (t[b + half] - t[b]);
        half /= 2;
    }
    return t[0];
}

std::vector<FieldElement> lift_table(std::span<const std::int64_t> a, const PrimeField& field, unsigned v) {
    const std::size_t n = std::size_t{1} << v;
    if (a.size() > n) throw std::invalid_argument("frequency vector larger than 2^v");
    std::vector<FieldElement> out(n, field.zero());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = field.from_int(a[i]);
    return out;
}

}  // namespace sipkit
