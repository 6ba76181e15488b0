#pragma once

#include "sipkit/field.hpp"
#include "sipkit/rational.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace sipkit {

/// Sign vectors: row i is sqrt(d) * u_i, entries in {-1, +1}.
using SignMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct AlmostOrthogonalSet {
    SignMatrix signs;   // t x d
    Rational eps;
    int batches = 0;    // batches drawn, including the accepted one
};

/// t = floor(exp(eps^2 d / 4)), at least 1.
std::int64_t almost_orthogonal_count(int d, const Rational& eps);

/// True iff every pair of distinct rows satisfies |<x_i, x_j>| <= eps * d,
/// i.e. |<u_i, u_j>| <= eps for the unit vectors u = x / sqrt(d). Integer arithmetic only.
bool pairwise_within(const SignMatrix& signs, const Rational& eps);

/// Draws whole batches of t random sign vectors until the pairwise bound holds.
/// Throws std::runtime_error after max_batches failures.
AlmostOrthogonalSet generate_almost_orthogonal(int d, const Rational& eps, Rng& rng, int max_batches = 10000);

}  // namespace sipkit
