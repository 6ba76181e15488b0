#include "sipkit/grid_lde.hpp"

#include <stdexcept>

namespace sipkit {

FieldElement lagrange_basis_at(std::uint64_t x, std::uint64_t h, const FieldElement& r) {
    if (x >= h) throw std::out_of_range("Lagrange node outside [h]");
    const PrimeField field = r.field();
    if (h >= field.modulus()) throw std::invalid_argument("grid height must be below the field size");
    FieldElement num = field.one();
    FieldElement den = field.one();
    for (std::uint64_t j = 0; j < h; ++j) {
        if (j == x) continue;
        const FieldElement fj = field.from_uint(j);
        num *= r - fj;
        den *= field.from_uint(x) - fj;
    }
    return num * den.inverse();
}

GridLdeState::GridLdeState(std::uint64_t h, std::uint64_t v, FieldElement r)
    : h_(h), r_(r), row_(v, r.field().zero()) {
    if (h == 0 || v == 0) throw std::invalid_argument("grid dimensions must be positive");
}

void GridLdeState::update(std::uint64_t x, std::uint64_t y, const FieldElement& delta) {
    if (x >= h_ || y >= row_.size()) throw std::out_of_range("grid entry out of range");
    row_[y] += delta * lagrange_basis_at(x, h_, r_);
}

void GridLdeState::update(const StreamUpdate& upd) {
    update(upd.index % h_, upd.index / h_, r_.field().from_int(upd.delta));
}

}  // namespace sipkit
