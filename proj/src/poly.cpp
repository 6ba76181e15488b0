#include "sipkit/poly.hpp"

#include <stdexcept>

namespace sipkit {

UnivariatePoly::UnivariatePoly(PrimeField field, std::vector<FieldElement> coeffs)
    : field_(field), coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_)
        if (c.modulus() != field_.modulus()) throw FieldMismatch();
    trim();
}

void UnivariatePoly::trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

FieldElement UnivariatePoly::operator()(const FieldElement& x) const {
    FieldElement acc = field_.zero();
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<FieldElement> UnivariatePoly::padded(std::size_t n) const {
    if (coeffs_.size() > n) throw std::invalid_argument("polynomial degree exceeds padding");
    std::vector<FieldElement> out = coeffs_;
    out.resize(n, field_.zero());
    return out;
}

UnivariatePoly& UnivariatePoly::operator+=(const UnivariatePoly& o) {
    if (!(field_ == o.field_)) throw FieldMismatch();
    if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size(), field_.zero());
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    trim();
    return *this;
}

UnivariatePoly operator*(const UnivariatePoly& a, const UnivariatePoly& b) {
    if (!(a.field_ == b.field_)) throw FieldMismatch();
    if (a.coeffs_.empty() || b.coeffs_.empty()) return UnivariatePoly(a.field_);
    std::vector<FieldElement> out(a.coeffs_.size() + b.coeffs_.size() - 1, a.field_.zero());
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return UnivariatePoly(a.field_, std::move(out));
}

UnivariatePoly operator*(const FieldElement& c, const UnivariatePoly& a) {
    std::vector<FieldElement> out = a.coeffs_;
    for (auto& x : out) x *= c;
    return UnivariatePoly(a.field_, std::move(out));
}

UnivariatePoly lagrange_interpolate(std::span<const std::pair<FieldElement, FieldElement>> points) {
    if (points.empty()) throw std::invalid_argument("interpolation needs at least one point");
    const PrimeField field = points.front().first.field();
    const std::size_t n = points.size();

    // Master polynomial M(X) = prod (X - x_k), then each basis numerator is M / (X - x_i).
    std::vector<FieldElement> master{field.one()};
    for (const auto& [x, _] : points) {
        std::vector<FieldElement> next(master.size() + 1, field.zero());
        for (std::size_t i = 0; i < master.size(); ++i) {
            next[i + 1] += master[i];
            next[i] -= master[i] * x;
        }
        master = std::move(next);
    }

    std::vector<FieldElement> result(n, field.zero());
    std::vector<FieldElement> quotient(n, field.zero());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [xi, yi] = points[i];
        FieldElement denom = field.one();
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) continue;
            FieldElement diff = xi - points[k].first;
            if (diff.is_zero()) throw std::invalid_argument("duplicate interpolation node");
            denom *= diff;
        }
        // Synthetic division of master by (X - xi).
        FieldElement carry = field.zero();
        for (std::size_t deg = n; deg-- > 0;) {
            carry = master[deg + 1] + carry * xi;
            quotient[deg] = carry;
        }
        const FieldElement scale = yi * denom.inverse();
        for (std::size_t deg = 0; deg < n; ++deg) result[deg] += scale * quotient[deg];
    }
    return UnivariatePoly(field, std::move(result));
}

UnivariatePoly interpolate_consecutive(std::span<const FieldElement> values) {
    if (values.empty()) throw std::invalid_argument("interpolation needs at least one point");
    const PrimeField field = values.front().field();
    std::vector<std::pair<FieldElement, FieldElement>> pts;
    pts.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) pts.emplace_back(field.from_uint(i), values[i]);
    return lagrange_interpolate(pts);
}

ConsecutiveInterpolator::ConsecutiveInterpolator(PrimeField field, std::size_t n)
    : field_(field), n_(n), basis_(n * n, field.zero()) {
    if (n == 0) throw std::invalid_argument("interpolation needs at least one point");
    if (n >= field.modulus()) throw std::invalid_argument("too many nodes for the field");
    std::vector<FieldElement> master{field.one()};
    for (std::size_t k = 0; k < n; ++k) {
        const FieldElement x = field.from_uint(k);
        std::vector<FieldElement> next(master.size() + 1, field.zero());
        for (std::size_t i = 0; i < master.size(); ++i) {
            next[i + 1] += master[i];
            next[i] -= master[i] * x;
        }
        master = std::move(next);
    }
    // w_i = prod_{k != i} (i - k) = (-1)^(n-1-i) i! (n-1-i)!
    std::vector<FieldElement> fact(n, field.one());
    for (std::size_t i = 1; i < n; ++i) fact[i] = fact[i - 1] * field.from_uint(i);
    std::vector<FieldElement> w(n, field.one());
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = fact[i] * fact[n - 1 - i];
        if ((n - 1 - i) % 2) w[i] = -w[i];
    }
    batch_invert(w);
    for (std::size_t i = 0; i < n; ++i) {
        const FieldElement xi = field.from_uint(i);
        FieldElement carry = field.zero();
        for (std::size_t deg = n; deg-- > 0;) {
            carry = master[deg + 1] + carry * xi;
            basis_[i * n + deg] = carry * w[i];
        }
    }
}

UnivariatePoly ConsecutiveInterpolator::operator()(std::span<const FieldElement> values) const {
    if (values.size() != n_) throw std::invalid_argument("value count differs from the node count");
    std::vector<FieldElement> out(n_, field_.zero());
    for (std::size_t i = 0; i < n_; ++i) {
        if (values[i].is_zero()) continue;
        const FieldElement* row = &basis_[i * n_];
        for (std::size_t deg = 0; deg < n_; ++deg) out[deg] += values[i] * row[deg];
    }
    return UnivariatePoly(field_, std::move(out));
}

}  // namespace sipkit
