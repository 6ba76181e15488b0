#pragma once

#include "sipkit/field.hpp"
#include "sipkit/stream.hpp"

namespace sipkit {

/// Reed-Solomon fingerprint sum_i a_i r^i of a length-u vector given as a stream.
/// Linear in the stream, so states over the same r merge by addition.
class Fingerprint {
public:
    Fingerprint(FieldElement r, std::uint64_t u);

    const FieldElement& r() const { return r_; }
    const FieldElement& value() const { return acc_; }
    std::uint64_t length() const { return u_; }

    void update(const StreamUpdate& upd);
    /// Adds value * r^index; the value is already a field element.
    void update(std::uint64_t index, const FieldElement& value);
    void merge(const Fingerprint& other);

    std::size_t state_elements() const { return 2; }

private:
    FieldElement r_;
    FieldElement acc_;
    std::uint64_t u_;
};

/// True iff both accumulators agree. Throws std::invalid_argument when the two
/// fingerprints were taken at different points, over different fields, or lengths.
bool fp_equal(const Fingerprint& a, const Fingerprint& b);

}  // namespace sipkit
