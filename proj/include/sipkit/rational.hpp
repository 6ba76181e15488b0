#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace sipkit {

/// Exact rational with 128-bit numerator and denominator. Always normalized
/// (gcd 1, denominator positive). Arithmetic throws std::overflow_error rather
/// than wrapping, so every comparison it answers is exact.
class Rational {
public:
    using Int = __int128;

    Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit from integers
    Rational(Int n, Int d);

    Int num() const { return num_; }
    Int den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    /// Nearest integer, halves rounded up (floor(x + 1/2)).
    std::int64_t round_half_up() const;
    std::int64_t floor() const;
    double to_double() const;

    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    /// "p/q" (or "p" when integral).
    std::string str() const;
    /// Accepts "p", "p/q" and finite decimals such as "0.2" or "-1.25".
    static Rational parse(const std::string& s);

private:
    Int num_ = 0;
    Int den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// Checked 128-bit helpers shared with the geometry code.
Rational::Int checked_mul(Rational::Int a, Rational::Int b);
Rational::Int checked_add(Rational::Int a, Rational::Int b);

}  // namespace sipkit
