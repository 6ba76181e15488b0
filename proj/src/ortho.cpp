#include "sipkit/ortho.hpp"

#include <cmath>
#include <stdexcept>

namespace sipkit {

std::int64_t almost_orthogonal_count(int d, const Rational& eps) {
    const double e = eps.to_double();
    const double t = std::floor(std::exp(e * e * d / 4.0));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(t));
}

bool pairwise_within(const SignMatrix& signs, const Rational& eps) {
    const auto t = signs.rows();
    const auto d = signs.cols();
    // |dot| <= eps * d  <=>  |dot| * den <= num * d
    const Rational::Int bound = checked_mul(eps.num(), d);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = i + 1; j < t; ++j) {
            std::int64_t s = 0;
            for (Eigen::Index k = 0; k < d; ++k) s += signs(i, k) * signs(j, k);
            if (checked_mul(s < 0 ? -s : s, eps.den()) > bound) return false;
        }
    }
    return true;
}

AlmostOrthogonalSet generate_almost_orthogonal(int d, const Rational& eps, Rng& rng, int max_batches) {
    if (d < 1) throw std::invalid_argument("dimension must be at least 1");
    if (eps <= Rational(0) || eps > Rational(1)) throw std::invalid_argument("eps must lie in (0, 1]");
    const auto t = almost_orthogonal_count(d, eps);
    AlmostOrthogonalSet out{SignMatrix(t, d), eps, 0};
    while (out.batches < max_batches) {
        ++out.batches;
        for (Eigen::Index i = 0; i < t; ++i) {
            std::uint64_t bits = 0;
            for (int k = 0; k < d; ++k) {
                if (k % 64 == 0) bits = rng();
                out.signs(i, k) = (bits & 1) ? 1 : -1;
                bits >>= 1;
            }
        }
        if (pairwise_within(out.signs, eps)) return out;
    }
    throw std::runtime_error("almost-orthogonal generator exceeded its batch limit");
}

}  // namespace sipkit
