#pragma once

#include "sipkit/matmul.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sipkit {

/// Symmetric A (n x n) with k claimed integer eigenpairs (lambda_j, column j of V).
struct EigenProblem {
    IntMatrix a;
    std::vector<std::int64_t> lambdas;
    IntMatrix vecs;  // n x k
};

/// One stream line: `A r c val`, `L j lambda` or `V r j val`.
struct EigenEvent {
    enum class Kind { A, Lambda, V };
    Kind kind = Kind::A;
    std::uint64_t row = 0;  // unused for Lambda
    std::uint64_t col = 0;
    std::int64_t value = 0;

    bool operator==(const EigenEvent&) const = default;
};

/// Run 1 checks A * V against V * D; run 2 computes V^T V.
struct EigenInstance {
    std::uint64_t n;
    std::uint64_t k;
    MatMulInstance av;
    MatMulInstance vtv;

    EigenInstance(std::uint64_t n, std::uint64_t k, std::uint64_t h, std::uint64_t v, PrimeField field = PrimeField());
};

struct EigenOutcome {
    bool accepted = false;
    std::string reason;
};

class EigenVerifier {
public:
    EigenVerifier(const EigenInstance& inst, Rng& rng);

    /// V entries must arrive column by column, each column after its eigenvalue.
    void observe(const EigenEvent& e);
    /// 2 matmul states, plus rho, the V*D fingerprint and the current eigenvalue.
    std::size_t state_elements() const { return av_.state_elements() + vtv_.state_elements() + 3; }

    /// Sessions 1 (A * V) and 2 (V^T V) on the endpoint's channel.
    EigenOutcome verify(Endpoint& ep) const;

private:
    EigenInstance inst_;
    MatMulVerifier av_;
    MatMulVerifier vtv_;
    FieldElement rho_;
    FieldElement fp_vd_;
    std::optional<std::uint64_t> col_;
    FieldElement lambda_;
};

class EigenProver {
public:
    explicit EigenProver(const EigenInstance& inst);

    void observe(const EigenEvent& e);
    /// Verdict text of the last session run.
    std::string prove(Endpoint& ep) const;

private:
    EigenInstance inst_;
    MatMulProver av_;
    MatMulProver vtv_;
};

/// Header `eigen n= k= h= v=`; rejects non-integer values with ParseError.
class EigenReader {
public:
    explicit EigenReader(std::istream& in);

    std::uint64_t n() const { return n_; }
    std::uint64_t k() const { return k_; }
    std::uint64_t h() const { return h_; }
    std::uint64_t v() const { return v_; }

    std::optional<EigenEvent> next();

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::uint64_t n_ = 0, k_ = 0, h_ = 0, v_ = 0;
};

/// A row-major, then for each column j: `L j`, then V column j top to bottom.
void write_eigen_stream(std::ostream& out, const EigenProblem& p, std::uint64_t h, std::uint64_t v);
std::vector<EigenEvent> eigen_events(const EigenProblem& p);

/// A = Q D Q^T for an integer Q with pairwise orthogonal columns (n <= 4);
/// the pairs are (d_j |q_j|^2, q_j) for the first k columns.
EigenProblem random_eigen_problem(int n, Rng& rng, int k = -1, std::int64_t coord_bound = 3, std::int64_t diag_bound = 5);

}  // namespace sipkit
