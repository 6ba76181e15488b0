#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace sipkit {

/// 2^61 - 1, the default modulus for every protocol.
inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);

class FieldMismatch : public std::invalid_argument {
public:
    FieldMismatch() : std::invalid_argument("field elements from different fields") {}
};

class FieldElement;

/// A prime field GF(p), p < 2^63. Cheap to copy; two fields are the same iff their moduli agree.
class PrimeField {
public:
    explicit PrimeField(std::uint64_t modulus = kMersenne61);

    std::uint64_t modulus() const { return p_; }

    FieldElement zero() const;
    FieldElement one() const;
    /// Canonical representative of v mod p.
    FieldElement from_uint(std::uint64_t v) const;
    /// Signed integers map by reduction mod p (negative values wrap to p - |v|).
    FieldElement from_int(std::int64_t v) const;

    bool operator==(const PrimeField&) const = default;

private:
    friend class FieldElement;
    struct Trusted {};
    PrimeField(std::uint64_t modulus, Trusted) : p_(modulus) {}

    std::uint64_t p_;
};

class FieldElement {
public:
    FieldElement() = default;

    std::uint64_t value() const { return v_; }
    std::uint64_t modulus() const { return p_; }
    /// The modulus was validated when the element's field was built.
    PrimeField field() const;

    bool is_zero() const { return v_ == 0; }

    /// Value read as a signed integer in (-p/2, p/2].
    std::int64_t to_signed() const;

    FieldElement& operator+=(const FieldElement& o);
    FieldElement& operator-=(const FieldElement& o);
    FieldElement& operator*=(const FieldElement& o);

    friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
    friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
    friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
    FieldElement operator-() const;

    bool operator==(const FieldElement& o) const { return v_ == o.v_ && p_ == o.p_; }

    FieldElement pow(std::uint64_t e) const;
    /// Throws std::domain_error("non-invertible") on zero.
    FieldElement inverse() const;

private:
    friend class PrimeField;
    FieldElement(std::uint64_t v, std::uint64_t p) : v_(v), p_(p) {}

    void check_same(const FieldElement& o) const {
        if (p_ != o.p_) throw FieldMismatch();
    }

    std::uint64_t v_ = 0;
    std::uint64_t p_ = 0;
};

inline PrimeField FieldElement::field() const {
    if (p_ == 0) return PrimeField(p_);  // default-constructed: let the check throw
    return PrimeField(p_, PrimeField::Trusted{});
}

std::ostream& operator<<(std::ostream& os, const FieldElement& x);

/// Seedable PRNG used for all verifier randomness.
using Rng = std::mt19937_64;

/// Uniform element of GF(p) by masked rejection sampling on 64-bit draws.
FieldElement sample(Rng& rng, const PrimeField& field);

std::vector<FieldElement> sample_vector(Rng& rng, const PrimeField& field, std::size_t n);

/// Replaces every element by its inverse with one field inversion. Throws std::domain_error on zero.
void batch_invert(std::span<FieldElement> xs);

// Wire format: 8-byte little-endian canonical value.
void append_element(std::vector<std::uint8_t>& out, const FieldElement& x);
std::vector<std::uint8_t> encode_elements(std::span<const FieldElement> xs);
/// Throws std::invalid_argument if the length is not a multiple of 8 or a value is not canonical.
std::vector<FieldElement> decode_elements(std::span<const std::uint8_t> bytes, const PrimeField& field);

}  // namespace sipkit
