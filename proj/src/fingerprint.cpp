#include "sipkit/fingerprint.hpp"

#include <stdexcept>

namespace sipkit {

Fingerprint::Fingerprint(FieldElement r, std::uint64_t u) : r_(r), acc_(r.field().zero()), u_(u) {}

void Fingerprint::update(const StreamUpdate& upd) { update(upd.index, r_.field().from_int(upd.delta)); }

void Fingerprint::update(std::uint64_t index, const FieldElement& value) {
    if (index >= u_) throw std::out_of_range("fingerprint index outside vector length");
    acc_ += value * r_.pow(index);
}

void Fingerprint::merge(const Fingerprint& other) {
    if (!(other.r_ == r_) || other.u_ != u_) throw std::invalid_argument("cannot merge unrelated fingerprints");
    acc_ += other.acc_;
}

bool fp_equal(const Fingerprint& a, const Fingerprint& b) {
    if (a.r().modulus() != b.r().modulus()) throw FieldMismatch();
    if (!(a.r() == b.r())) throw std::invalid_argument("fingerprints taken at different points");
    if (a.length() != b.length()) throw std::invalid_argument("fingerprints of different lengths");
    return a.value() == b.value();
}

}  // namespace sipkit
