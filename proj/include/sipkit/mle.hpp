#pragma once

#include "sipkit/field.hpp"
#include "sipkit/stream.hpp"

#include <span>
#include <vector>

namespace sipkit {

/// Number of variables v with 2^v >= u (v >= 1).
unsigned num_vars_for(std::uint64_t u);

/// Bits of index i as a boolean vector of length v, most significant first:
/// variable x_1 is the top bit.
std::vector<bool> index_bits(std::uint64_t i, unsigned v);

/// prod_k chi_{i_k}(x_k) with chi_0(x) = 1 - x and chi_1(x) = x.
FieldElement chi_eval(const std::vector<bool>& i, std::span<const FieldElement> x);
/// Same, reading the bits straight from the index (no allocation).
FieldElement chi_eval(std::uint64_t index, std::span<const FieldElement> x);

/// Streaming evaluation of the multilinear extension at a point fixed before
/// the stream. State is exactly v + 1 field elements.
class MleEvalState {
public:
    MleEvalState(std::vector<FieldElement> point);

    const std::vector<FieldElement>& point() const { return r_; }
    unsigned num_vars() const { return static_cast<unsigned>(r_.size()); }
    /// Current value of sum_i a_i chi_i(r).
    const FieldElement& value() const { return acc_; }

    void update(const StreamUpdate& upd);
    /// Adds another state's accumulator; points must agree.
    void merge(const MleEvalState& other);

    std::size_t state_elements() const { return r_.size() + 1; }

private:
    std::vector<FieldElement> r_;
    FieldElement acc_;
};

/// Offline evaluation sum_i a_i chi_i(x); |a| must be 2^|x|.
FieldElement mle_full_eval(std::span<const FieldElement> a, std::span<const FieldElement> x);

/// Frequency vector (integers) lifted into the field and zero-padded to 2^v.
std::vector<FieldElement> lift_table(std::span<const std::int64_t> a, const PrimeField& field, unsigned v);

}  // namespace sipkit
