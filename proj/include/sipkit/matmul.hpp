#pragma once

#include "sipkit/field.hpp"
#include "sipkit/grid_lde.hpp"
#include "sipkit/transport.hpp"

#include <Eigen/Core>

#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sipkit {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// C = A * B with A k x n (rows a_i) and B n x k' (columns b_j). Each length-n
/// vector lives on the grid [h] x [v], entry c at (c mod h, c / h).
struct MatMulInstance {
    std::uint64_t k = 0;
    std::uint64_t n = 0;
    std::uint64_t kp = 0;
    std::uint64_t h = 0;
    std::uint64_t v = 0;
    PrimeField field;

    /// Throws std::invalid_argument unless h * v >= n and |F| is large enough.
    MatMulInstance(std::uint64_t k, std::uint64_t n, std::uint64_t kp, std::uint64_t h, std::uint64_t v,
                   PrimeField field = PrimeField());

    /// max(6 n^3, 100 h k k'), saturating at 2^64 - 1.
    static std::uint64_t min_modulus(std::uint64_t k, std::uint64_t n, std::uint64_t kp, std::uint64_t h);
    /// h = ceil(sqrt(n)), v = ceil(n / h).
    static std::pair<std::uint64_t, std::uint64_t> default_split(std::uint64_t n);

    /// Per-entry polynomial degree: a product of two degree-(h-1) interpolants.
    int degree_bound() const { return static_cast<int>(2 * (h - 1)); }
    std::size_t coeffs_per_entry() const { return static_cast<std::size_t>(degree_bound()) + 1; }
    std::size_t annotation_elements() const { return k * kp * coeffs_per_entry(); }
    /// Position of entry (i, j) in the annotation; also the exponent of alpha.
    std::uint64_t entry_slot(std::uint64_t i, std::uint64_t j) const { return j * k + i; }
};

struct MatMulEntry {
    enum class Side { A, B };
    Side side = Side::A;
    std::uint64_t index = 0;  // row i of A, or column j of B
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    std::int64_t value = 0;

    bool operator==(const MatMulEntry&) const = default;
};

struct MatMulOutcome {
    bool accepted = false;
    std::string reason;  // "degree", "fingerprint", "malformed", or a caller's reason
    IntMatrix product;   // filled on accept when requested
};

/// Verifier state: r, alpha and the two length-v vectors
/// s[y] = sum_i a~_i(r, y) alpha^i and s'[y] = sum_j b~_j(r, y) alpha^{k j}.
class MatMulVerifier {
public:
    MatMulVerifier(const MatMulInstance& inst, Rng& rng);
    MatMulVerifier(const MatMulInstance& inst, FieldElement r, FieldElement alpha);

    const MatMulInstance& instance() const { return inst_; }
    const FieldElement& r() const { return r_; }
    const FieldElement& alpha() const { return alpha_; }
    const std::vector<FieldElement>& s() const { return s_; }
    const std::vector<FieldElement>& s_prime() const { return sp_; }

    /// Throws std::out_of_range on indices outside the instance.
    void observe(const MatMulEntry& e);
    std::size_t state_elements() const { return 2 * inst_.v + 2; }

    /// Entry callback: (i, j, C_ij) for every verified product entry.
    using EntrySink = std::function<void(std::uint64_t, std::uint64_t, const FieldElement&)>;

    /// Checks a received annotation: degree bound, then the identity
    /// sum_{i,j} s_ij(r) alpha^{jk+i} = sum_y s[y] s'[y].
    MatMulOutcome check(std::span<const FieldElement> annotation, bool want_product = true,
                        const EntrySink& sink = {}) const;

    /// Receives the annotation frame, checks it and sends the verdict. `post` may
    /// veto an accepted annotation with a reason.
    MatMulOutcome verify(Endpoint& ep, bool want_product = true, const EntrySink& sink = {},
                         const std::function<std::string()>& post = {}, std::size_t held_state = 0) const;

private:
    MatMulInstance inst_;
    FieldElement r_;
    FieldElement alpha_;
    std::vector<FieldElement> s_;
    std::vector<FieldElement> sp_;
};

class MatMulProver {
public:
    explicit MatMulProver(const MatMulInstance& inst);

    const MatMulInstance& instance() const { return inst_; }
    void observe(const MatMulEntry& e);
    const IntMatrix& a() const { return a_; }
    const IntMatrix& b() const { return b_; }

    /// Coefficients of s_ij = sum_y a~_i(X, y) b~_j(X, y), slot-major, each padded
    /// to degree_bound() + 1 coefficients.
    std::vector<FieldElement> annotation() const;

    struct Tamper {
        std::size_t position;
        std::int64_t delta;
    };
    /// Sends the (optionally tampered) annotation; returns the verdict text.
    std::string prove(Endpoint& ep, std::optional<Tamper> tamper = std::nullopt) const;

private:
    MatMulInstance inst_;
    IntMatrix a_;  // k x n
    IntMatrix b_;  // n x kp
};

/// Matrix stream: header `matmul k= n= kp= h= v=`, then `A i x y val` / `B j x y val` lines.
class MatMulReader {
public:
    explicit MatMulReader(std::istream& in);

    /// k, n, kp, h, v from the header.
    std::uint64_t k() const { return k_; }
    std::uint64_t n() const { return n_; }
    std::uint64_t kp() const { return kp_; }
    std::uint64_t h() const { return h_; }
    std::uint64_t v() const { return v_; }

    std::optional<MatMulEntry> next();

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::uint64_t k_ = 0, n_ = 0, kp_ = 0, h_ = 0, v_ = 0;
};

void write_matmul_stream(std::ostream& out, const IntMatrix& a, const IntMatrix& b, std::uint64_t h, std::uint64_t v);

/// Annotation file: header `annotation k= kp= h= modulus=`, then `i j c_0 ... c_D` per entry.
void write_annotation(std::ostream& out, const MatMulInstance& inst, std::span<const FieldElement> annotation);
std::vector<FieldElement> read_annotation(std::istream& in, const MatMulInstance& inst);

/// Schoolbook product in exact integers.
IntMatrix schoolbook_product(const IntMatrix& a, const IntMatrix& b);

}  // namespace sipkit
