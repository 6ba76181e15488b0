#include "sipkit/eigen_verify.hpp"

#include "text_util.hpp"

#include <stdexcept>

namespace sipkit {

namespace {

MatMulEntry at(MatMulEntry::Side side, std::uint64_t index, std::uint64_t pos, std::uint64_t h, std::int64_t value) {
    return {side, index, pos % h, pos / h, value};
}

IntMatrix orthogonal_columns(int n, Rng& rng, std::int64_t bound) {
    std::uniform_int_distribution<std::int64_t> coord(-bound, bound);
    IntMatrix q(n, n);
    for (;;) {
        const std::int64_t a = coord(rng), b = coord(rng), c = coord(rng), d = coord(rng);
        if (a == 0 && b == 0 && (n <= 2 || (c == 0 && d == 0))) continue;
        switch (n) {
            case 1:
                if (a == 0) continue;
                q << a;
                break;
            case 2:
                q << a, -b, b, a;
                break;
            case 3:
                // rotation matrix of the quaternion (a, b, c, d), scaled by its squared norm
                q << a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c),  //
                    2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b),    //
                    2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d;
                break;
            case 4:
                q << a, -b, -c, -d,  //
                    b, a, -d, c,     //
                    c, d, a, -b,     //
                    d, -c, b, a;
                break;
            default:
                throw std::invalid_argument("eigen generator supports 1 <= n <= 4");
        }
        return q;
    }
}

}  // namespace

EigenInstance::EigenInstance(std::uint64_t n_, std::uint64_t k_, std::uint64_t h, std::uint64_t v, PrimeField field)
    : n(n_), k(k_), av(n_, n_, k_, h, v, field), vtv(k_, n_, k_, h, v, field) {}

EigenVerifier::EigenVerifier(const EigenInstance& inst, Rng& rng)
    : inst_(inst),
      av_(inst.av, rng),
      vtv_(inst.vtv, rng),
      rho_(sample(rng, inst.av.field)),
      fp_vd_(inst.av.field.zero()),
      lambda_(inst.av.field.zero()) {}

void EigenVerifier::observe(const EigenEvent& e) {
    const PrimeField& f = inst_.av.field;
    const std::uint64_t h = inst_.av.h;
    switch (e.kind) {
        case EigenEvent::Kind::A:
            if (e.row >= inst_.n || e.col >= inst_.n) throw std::out_of_range("entry of A out of range");
            av_.observe(at(MatMulEntry::Side::A, e.row, e.col, h, e.value));
            break;
        case EigenEvent::Kind::Lambda:
            if (e.col != (col_ ? *col_ + 1 : 0) || e.col >= inst_.k)
                throw std::invalid_argument("eigenvalues must arrive in column order");
            col_ = e.col;
            lambda_ = f.from_int(e.value);
            break;
        case EigenEvent::Kind::V:
            if (e.row >= inst_.n || e.col >= inst_.k) throw std::out_of_range("entry of V out of range");
            if (!col_ || *col_ != e.col) throw std::invalid_argument("V entry outside its column block");
            av_.observe(at(MatMulEntry::Side::B, e.col, e.row, h, e.value));
            vtv_.observe(at(MatMulEntry::Side::A, e.col, e.row, h, e.value));
            vtv_.observe(at(MatMulEntry::Side::B, e.col, e.row, h, e.value));
            fp_vd_ += f.from_int(e.value) * lambda_ * rho_.pow(e.row + inst_.n * e.col);
            break;
    }
}

EigenOutcome EigenVerifier::verify(Endpoint& ep) const {
    const PrimeField& f = inst_.av.field;
    ep.begin_session(1);
    FieldElement fp_c = f.zero();
    auto fold = [&](std::uint64_t i, std::uint64_t j, const FieldElement& c) { fp_c += c * rho_.pow(i + inst_.n * j); };
    auto equation = [&]() -> std::string { return fp_c == fp_vd_ ? "" : "eigen equation"; };
    auto run1 = av_.verify(ep, false, fold, equation, vtv_.state_elements() + 4);
    if (!run1.accepted) return {false, run1.reason};

    ep.begin_session(2);
    std::string bad;
    auto gram = [&](std::uint64_t i, std::uint64_t j, const FieldElement& c) {
        if (i != j && !c.is_zero()) bad = "not orthogonal";
        if (i == j && c.is_zero() && bad.empty()) bad = "zero vector";
    };
    auto run2 = vtv_.verify(ep, false, gram, [&] { return bad; });
    return {run2.accepted, run2.reason};
}

EigenProver::EigenProver(const EigenInstance& inst) : inst_(inst), av_(inst.av), vtv_(inst.vtv) {}

void EigenProver::observe(const EigenEvent& e) {
    const std::uint64_t h = inst_.av.h;
    switch (e.kind) {
        case EigenEvent::Kind::A:
            av_.observe(at(MatMulEntry::Side::A, e.row, e.col, h, e.value));
            break;
        case EigenEvent::Kind::Lambda:
            break;
        case EigenEvent::Kind::V:
            av_.observe(at(MatMulEntry::Side::B, e.col, e.row, h, e.value));
            vtv_.observe(at(MatMulEntry::Side::A, e.col, e.row, h, e.value));
            vtv_.observe(at(MatMulEntry::Side::B, e.col, e.row, h, e.value));
            break;
    }
}

std::string EigenProver::prove(Endpoint& ep) const {
    ep.begin_session(1);
    std::string verdict = av_.prove(ep);
    if (verdict != "accept") return verdict;
    ep.begin_session(2);
    return vtv_.prove(ep);
}

EigenReader::EigenReader(std::istream& in) : in_(in) {
    std::string first;
    if (!detail::next_content_line(in_, first, line_)) throw ParseError(line_, "missing eigen header");
    auto toks = detail::split_ws(first);
    if (toks.size() != 5 || toks[0] != "eigen") throw ParseError(line_, "expected 'eigen n= k= h= v='");
    n_ = detail::keyed_uint(toks[1], "n", line_);
    k_ = detail::keyed_uint(toks[2], "k", line_);
    h_ = detail::keyed_uint(toks[3], "h", line_);
    v_ = detail::keyed_uint(toks[4], "v", line_);
    if (!n_ || !k_ || !h_ || !v_) throw ParseError(line_, "dimensions must be positive");
    if (h_ * v_ < n_) throw ParseError(line_, "h * v must cover n");
}

std::optional<EigenEvent> EigenReader::next() {
    std::string t;
    if (!detail::next_content_line(in_, t, line_)) return std::nullopt;
    auto toks = detail::split_ws(t);
    EigenEvent e;
    if (toks[0] == "L") {
        if (toks.size() != 3) throw ParseError(line_, "expected 'L j lambda'");
        e.kind = EigenEvent::Kind::Lambda;
        auto j = detail::to_uint(toks[1]);
        if (!j || *j >= k_) throw ParseError(line_, "eigenvalue index out of range");
        e.col = *j;
    } else if (toks[0] == "A" || toks[0] == "V") {
        if (toks.size() != 4) throw ParseError(line_, "expected '" + toks[0] + " r c value'");
        e.kind = toks[0] == "A" ? EigenEvent::Kind::A : EigenEvent::Kind::V;
        auto r = detail::to_uint(toks[1]);
        auto c = detail::to_uint(toks[2]);
        const std::uint64_t cols = e.kind == EigenEvent::Kind::A ? n_ : k_;
        if (!r || !c || *r >= n_ || *c >= cols) throw ParseError(line_, "entry index out of range");
        e.row = *r;
        e.col = *c;
    } else {
        throw ParseError(line_, "unknown line tag '" + toks[0] + "'");
    }
    auto val = detail::to_int(toks.back());
    if (!val) throw ParseError(line_, "non-integer value '" + toks.back() + "'");
    e.value = *val;
    return e;
}

std::vector<EigenEvent> eigen_events(const EigenProblem& p) {
    std::vector<EigenEvent> out;
    for (Eigen::Index r = 0; r < p.a.rows(); ++r)
        for (Eigen::Index c = 0; c < p.a.cols(); ++c)
            if (p.a(r, c) != 0)
                out.push_back({EigenEvent::Kind::A, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c), p.a(r, c)});
    for (Eigen::Index j = 0; j < p.vecs.cols(); ++j) {
        out.push_back({EigenEvent::Kind::Lambda, 0, static_cast<std::uint64_t>(j), p.lambdas.at(static_cast<std::size_t>(j))});
        for (Eigen::Index r = 0; r < p.vecs.rows(); ++r)
            if (p.vecs(r, j) != 0)
                out.push_back({EigenEvent::Kind::V, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(j), p.vecs(r, j)});
    }
    return out;
}

void write_eigen_stream(std::ostream& out, const EigenProblem& p, std::uint64_t h, std::uint64_t v) {
    out << "eigen n=" << p.a.rows() << " k=" << p.vecs.cols() << " h=" << h << " v=" << v << "\n";
    for (const auto& e : eigen_events(p)) {
        switch (e.kind) {
            case EigenEvent::Kind::A:
                out << "A " << e.row << " " << e.col << " " << e.value << "\n";
                break;
            case EigenEvent::Kind::Lambda:
                out << "L " << e.col << " " << e.value << "\n";
                break;
            case EigenEvent::Kind::V:
                out << "V " << e.row << " " << e.col << " " << e.value << "\n";
                break;
        }
    }
}

EigenProblem random_eigen_problem(int n, Rng& rng, int k, std::int64_t coord_bound, std::int64_t diag_bound) {
    if (k < 0) k = n;
    if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
    const IntMatrix q = orthogonal_columns(n, rng, coord_bound);
    std::uniform_int_distribution<std::int64_t> dd(-diag_bound, diag_bound);
    IntMatrix d = IntMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) d(j, j) = dd(rng);
    EigenProblem p;
    p.a = q * d * q.transpose();
    p.vecs = q.leftCols(k);
    for (int j = 0; j < k; ++j) p.lambdas.push_back(d(j, j) * q.col(j).squaredNorm());
    return p;
}

}  // namespace sipkit
