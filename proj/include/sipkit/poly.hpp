#pragma once

#include "sipkit/field.hpp"

#include <span>
#include <utility>
#include <vector>

namespace sipkit {

/// Univariate polynomial over GF(p), coefficients lowest degree first,
/// trailing zeros trimmed (the zero polynomial has no coefficients).
class UnivariatePoly {
public:
    explicit UnivariatePoly(PrimeField field) : field_(field) {}
    UnivariatePoly(PrimeField field, std::vector<FieldElement> coeffs);

    const PrimeField& field() const { return field_; }
    const std::vector<FieldElement>& coefficients() const { return coeffs_; }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    FieldElement coefficient(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : field_.zero(); }

    /// Horner evaluation.
    FieldElement operator()(const FieldElement& x) const;

    /// Exactly n coefficients, zero-padded; throws if the degree needs more.
    std::vector<FieldElement> padded(std::size_t n) const;

    UnivariatePoly& operator+=(const UnivariatePoly& o);
    friend UnivariatePoly operator+(UnivariatePoly a, const UnivariatePoly& b) { return a += b; }
    friend UnivariatePoly operator*(const UnivariatePoly& a, const UnivariatePoly& b);
    friend UnivariatePoly operator*(const FieldElement& c, const UnivariatePoly& a);

    bool operator==(const UnivariatePoly& o) const { return field_ == o.field_ && coeffs_ == o.coeffs_; }

private:
    void trim();

    PrimeField field_;
    std::vector<FieldElement> coeffs_;
};

/// Unique polynomial of degree < points.size() through the given (node, value)
/// pairs. Throws std::invalid_argument on a repeated node or an empty input.
UnivariatePoly lagrange_interpolate(std::span<const std::pair<FieldElement, FieldElement>> points);

/// Interpolates values at the nodes 0, 1, ..., values.size()-1.
UnivariatePoly interpolate_consecutive(std::span<const FieldElement> values);

/// Repeated interpolation on the nodes 0..n-1: the basis polynomials are built once (n^2 elements).
class ConsecutiveInterpolator {
public:
    ConsecutiveInterpolator(PrimeField field, std::size_t n);
    std::size_t size() const { return n_; }
    UnivariatePoly operator()(std::span<const FieldElement> values) const;

private:
    PrimeField field_;
    std::size_t n_;
    std::vector<FieldElement> basis_;  // row i: coefficients of L_i
};

}  // namespace sipkit
