#pragma once

#include "sipkit/field.hpp"
#include "sipkit/stream.hpp"

#include <span>
#include <vector>

namespace sipkit {

/// L_x(r) for the degree-(h-1) Lagrange basis on nodes 0..h-1, in O(h) time and O(1) space.
FieldElement lagrange_basis_at(std::uint64_t x, std::uint64_t h, const FieldElement& r);

/// Streaming evaluation of the bivariate low-degree extension of a length-n
/// vector laid out on [h] x [v] (entry c sits at x = c mod h, y = c / h):
/// row[y] accumulates a~(r, y). State: v + 2 field elements (row, r, scratch).
class GridLdeState {
public:
    GridLdeState(std::uint64_t h, std::uint64_t v, FieldElement r);

    std::uint64_t h() const { return h_; }
    std::uint64_t v() const { return row_.size(); }
    const FieldElement& r() const { return r_; }
    const std::vector<FieldElement>& row() const { return row_; }

    /// Adds delta * L_x(r) to row[y].
    void update(std::uint64_t x, std::uint64_t y, const FieldElement& delta);
    /// Update by linear index c over [n]: (x, y) = (c mod h, c / h).
    void update(const StreamUpdate& upd);

    std::size_t state_elements() const { return row_.size() + 2; }

    bool operator==(const GridLdeState&) const = default;

private:
    std::uint64_t h_;
    FieldElement r_;
    std::vector<FieldElement> row_;
};

}  // namespace sipkit
