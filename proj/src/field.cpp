#include "sipkit/field.hpp"

#include <bit>
#include <ostream>

namespace sipkit {

namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    u128 z = static_cast<u128>(a) * b;
    if (p == kMersenne61) {
        std::uint64_t lo = static_cast<std::uint64_t>(z) & kMersenne61;
        std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
        std::uint64_t s = lo + hi;
        return s >= kMersenne61 ? s - kMersenne61 : s;
    }
    return static_cast<std::uint64_t>(z % p);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1) r = mul_mod(r, b, p);
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These twelve bases are sufficient for n < 3.3e24.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(std::uint64_t modulus) : p_(modulus) {
    if (modulus < 3) throw std::invalid_argument("field modulus must be at least 3");
    if (modulus >= (std::uint64_t{1} << 63)) throw std::invalid_argument("field modulus must be below 2^63");
    if (!is_prime(modulus)) throw std::invalid_argument("field modulus is not prime");
}

FieldElement PrimeField::zero() const { return FieldElement(0, p_); }
FieldElement PrimeField::one() const { return FieldElement(1, p_); }
FieldElement PrimeField::from_uint(std::uint64_t v) const { return FieldElement(v % p_, p_); }

FieldElement PrimeField::from_int(std::int64_t v) const {
    if (v >= 0) return from_uint(static_cast<std::uint64_t>(v));
    // -(v) may overflow for INT64_MIN; go through unsigned magnitude.
    std::uint64_t mag = static_cast<std::uint64_t>(-(v + 1)) + 1;
    std::uint64_t r = mag % p_;
    return FieldElement(r == 0 ? 0 : p_ - r, p_);
}

std::int64_t FieldElement::to_signed() const {
    if (v_ > p_ / 2) return -static_cast<std::int64_t>(p_ - v_);
    return static_cast<std::int64_t>(v_);
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
    check_same(o);
    std::uint64_t s = v_ + o.v_;
    v_ = s >= p_ ? s - p_ : s;
    return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& o) {
    check_same(o);
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + (p_ - o.v_);
    return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& o) {
    check_same(o);
    v_ = mul_mod(v_, o.v_, p_);
    return *this;
}

FieldElement FieldElement::operator-() const { return FieldElement(v_ == 0 ? 0 : p_ - v_, p_); }

FieldElement FieldElement::pow(std::uint64_t e) const { return FieldElement(pow_mod(v_, e, p_), p_); }

FieldElement FieldElement::inverse() const {
    if (v_ == 0) throw std::domain_error("non-invertible");
    return pow(p_ - 2);
}

std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.value(); }

FieldElement sample(Rng& rng, const PrimeField& field) {
    const std::uint64_t p = field.modulus();
    const std::uint64_t mask = std::bit_ceil(p) - 1;
    for (;;) {
        std::uint64_t x = rng() & mask;
        if (x < p) return field.from_uint(x);
    }
}

void batch_invert(std::span<FieldElement> xs) {
    if (xs.empty()) return;
    std::vector<FieldElement> prefix(xs.size());
    FieldElement acc = xs[0].field().one();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        prefix[i] = acc;
        acc *= xs[i];
    }
    FieldElement inv = acc.inverse();
    for (std::size_t i = xs.size(); i-- > 0;) {
        const FieldElement x = xs[i];
        xs[i] = inv * prefix[i];
        inv *= x;
    }
}

std::vector<FieldElement> sample_vector(Rng& rng, const PrimeField& field, std::size_t n) {
    std::vector<FieldElement> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng, field));
    return out;
}

void append_element(std::vector<std::uint8_t>& out, const FieldElement& x) {
    std::uint64_t v = x.value();
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::vector<std::uint8_t> encode_elements(std::span<const FieldElement> xs) {
    std::vector<std::uint8_t> out;
    out.reserve(xs.size() * 8);
    for (const auto& x : xs) append_element(out, x);
    return out;
}

std::vector<FieldElement> decode_elements(std::span<const std::uint8_t> bytes, const PrimeField& field) {
    if (bytes.size() % 8 != 0) throw std::invalid_argument("element payload length is not a multiple of 8");
    std::vector<FieldElement> out;
    out.reserve(bytes.size() / 8);
    for (std::size_t off = 0; off < bytes.size(); off += 8) {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[off + i]) << (8 * i);
        if (v >= field.modulus()) throw std::invalid_argument("non-canonical field element");
        out.push_back(field.from_uint(v));
    }
    return out;
}

}  // namespace sipkit
