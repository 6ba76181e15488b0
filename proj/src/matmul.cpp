#include "sipkit/matmul.hpp"

#include "sipkit/poly.hpp"
#include "sipkit/sumcheck.hpp"
#include "text_util.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sipkit {

namespace {

std::uint64_t saturate(unsigned __int128 x) {
    constexpr auto top = std::numeric_limits<std::uint64_t>::max();
    return x > top ? top : static_cast<std::uint64_t>(x);
}

}  // namespace

MatMulInstance::MatMulInstance(std::uint64_t k_, std::uint64_t n_, std::uint64_t kp_, std::uint64_t h_,
                               std::uint64_t v_, PrimeField field_)
    : k(k_), n(n_), kp(kp_), h(h_), v(v_), field(field_) {
    if (k == 0 || n == 0 || kp == 0 || h == 0 || v == 0) throw std::invalid_argument("matrix dimensions must be positive");
    if (static_cast<unsigned __int128>(h) * v < n) throw std::invalid_argument("grid h x v does not cover n");
    const auto need = min_modulus(k, n, kp, h);
    if (field.modulus() < need)
        throw std::invalid_argument("field too small: need modulus >= " + std::to_string(need));
}

std::uint64_t MatMulInstance::min_modulus(std::uint64_t k, std::uint64_t n, std::uint64_t kp, std::uint64_t h) {
    using u128 = unsigned __int128;
    if (n >= (std::uint64_t{1} << 22)) return std::numeric_limits<std::uint64_t>::max();
    const u128 a = u128(6) * n * n * n;
    const u128 b = u128(100) * h * k * kp;
    return saturate(a > b ? a : b);
}

std::pair<std::uint64_t, std::uint64_t> MatMulInstance::default_split(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    auto h = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (h * h < n) ++h;
    while (h > 1 && (h - 1) * (h - 1) >= n) --h;
    return {h, (n + h - 1) / h};
}

MatMulVerifier::MatMulVerifier(const MatMulInstance& inst, Rng& rng)
    : MatMulVerifier(inst, sample(rng, inst.field), sample(rng, inst.field)) {}

MatMulVerifier::MatMulVerifier(const MatMulInstance& inst, FieldElement r, FieldElement alpha)
    : inst_(inst), r_(r), alpha_(alpha), s_(inst.v, inst.field.zero()), sp_(inst.v, inst.field.zero()) {}

void MatMulVerifier::observe(const MatMulEntry& e) {
    if (e.x >= inst_.h || e.y >= inst_.v || e.x + inst_.h * e.y >= inst_.n)
        throw std::out_of_range("matrix entry position out of range");
    const FieldElement val = inst_.field.from_int(e.value) * lagrange_basis_at(e.x, inst_.h, r_);
    if (e.side == MatMulEntry::Side::A) {
        if (e.index >= inst_.k) throw std::out_of_range("row of A out of range");
        s_[e.y] += val * alpha_.pow(e.index);
    } else {
        if (e.index >= inst_.kp) throw std::out_of_range("column of B out of range");
        sp_[e.y] += val * alpha_.pow(inst_.k * e.index);
    }
}

MatMulOutcome MatMulVerifier::check(std::span<const FieldElement> annotation, bool want_product,
                                    const EntrySink& sink) const {
    MatMulOutcome out;
    const std::size_t expected = inst_.annotation_elements();
    if (annotation.size() > expected) {
        out.reason = "degree";
        return out;
    }
    if (annotation.size() < expected) {
        out.reason = "malformed";
        return out;
    }
    const std::size_t per = inst_.coeffs_per_entry();
    const PrimeField& f = inst_.field;

    // slot order is j*k + i, so alpha powers advance by one per entry
    FieldElement lhs = f.zero();
    FieldElement apow = f.one();
    for (std::size_t slot = 0; slot < inst_.k * inst_.kp; ++slot) {
        UnivariatePoly p(f, {annotation.begin() + slot * per, annotation.begin() + (slot + 1) * per});
        lhs += p(r_) * apow;
        apow *= alpha_;
    }
    FieldElement rhs = f.zero();
    for (std::size_t y = 0; y < inst_.v; ++y) rhs += s_[y] * sp_[y];
    if (lhs != rhs) {
        out.reason = "fingerprint";
        return out;
    }

    out.accepted = true;
    if (want_product) out.product = IntMatrix::Zero(static_cast<Eigen::Index>(inst_.k), static_cast<Eigen::Index>(inst_.kp));
    for (std::uint64_t j = 0; j < inst_.kp; ++j) {
        for (std::uint64_t i = 0; i < inst_.k; ++i) {
            const std::size_t slot = inst_.entry_slot(i, j);
            UnivariatePoly p(f, {annotation.begin() + slot * per, annotation.begin() + (slot + 1) * per});
            FieldElement c = f.zero();
            for (std::uint64_t x = 0; x < inst_.h; ++x) c += p(f.from_uint(x));
            if (want_product) out.product(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.to_signed();
            if (sink) sink(i, j, c);
        }
    }
    return out;
}

MatMulOutcome MatMulVerifier::verify(Endpoint& ep, bool want_product, const EntrySink& sink,
                                     const std::function<std::string()>& post, std::size_t held_state) const {
    ep.sample_state(state_elements() + held_state);
    MatMulOutcome out;
    Frame fr = ep.expect(PayloadKind::Annotation);
    std::vector<FieldElement> ann;
    try {
        ann = decode_elements(fr.payload, ep.field());
    } catch (const std::invalid_argument&) {
        out.reason = "malformed";
    }
    if (out.reason.empty()) {
        // two accumulators for the identity check
        ep.sample_state(state_elements() + held_state + 2);
        out = check(ann, want_product, sink);
    }
    if (out.accepted && post) {
        std::string why = post();
        if (!why.empty()) {
            out.accepted = false;
            out.reason = why;
            out.product.resize(0, 0);
        }
    }
    ep.send(PayloadKind::Verdict, verdict_payload(out.accepted, out.reason));
    return out;
}

MatMulProver::MatMulProver(const MatMulInstance& inst)
    : inst_(inst),
      a_(IntMatrix::Zero(static_cast<Eigen::Index>(inst.k), static_cast<Eigen::Index>(inst.n))),
      b_(IntMatrix::Zero(static_cast<Eigen::Index>(inst.n), static_cast<Eigen::Index>(inst.kp))) {}

void MatMulProver::observe(const MatMulEntry& e) {
    const std::uint64_t c = e.x + inst_.h * e.y;
    if (e.x >= inst_.h || c >= inst_.n) throw std::out_of_range("matrix entry position out of range");
    const auto col = static_cast<Eigen::Index>(c);
    if (e.side == MatMulEntry::Side::A) {
        if (e.index >= inst_.k) throw std::out_of_range("row of A out of range");
        a_(static_cast<Eigen::Index>(e.index), col) += e.value;
    } else {
        if (e.index >= inst_.kp) throw std::out_of_range("column of B out of range");
        b_(col, static_cast<Eigen::Index>(e.index)) += e.value;
    }
}

std::vector<FieldElement> MatMulProver::annotation() const {
    const PrimeField& f = inst_.field;
    const std::uint64_t h = inst_.h, v = inst_.v, n = inst_.n;
    const std::size_t per = inst_.coeffs_per_entry();

    // ltab[t][x] = L_x(t) at the evaluation nodes t = 0..2h-2
    // For t >= h: L_x(t) = M(t) / ((t - x) * w_x) with M(t) = prod_j (t - j), w_x = prod_{j != x} (x - j).
    std::vector<std::vector<FieldElement>> ltab(per, std::vector<FieldElement>(h, f.zero()));
    std::vector<FieldElement> inv_w(h, f.one());
    for (std::uint64_t x = 0; x < h; ++x) {
        FieldElement w = f.one();
        for (std::uint64_t j = 0; j < h; ++j)
            if (j != x) w *= f.from_int(static_cast<std::int64_t>(x) - static_cast<std::int64_t>(j));
        inv_w[x] = w;
    }
    batch_invert(inv_w);
    std::vector<FieldElement> inv_diff(h, f.one());
    for (std::size_t t = 0; t < per; ++t) {
        if (t < h) {
            ltab[t][t] = f.one();
            continue;
        }
        FieldElement m = f.one();
        for (std::uint64_t x = 0; x < h; ++x) {
            inv_diff[x] = f.from_uint(t - x);
            m *= inv_diff[x];
        }
        batch_invert(inv_diff);
        for (std::uint64_t x = 0; x < h; ++x) ltab[t][x] = m * inv_diff[x] * inv_w[x];
    }

    // ext[t * v + y] = extension of one vector at (t, y)
    auto extend = [&](auto&& entry) {
        std::vector<FieldElement> ext(per * v, f.zero());
        for (std::uint64_t y = 0; y < v; ++y) {
            for (std::uint64_t x = 0; x < h && x + h * y < n; ++x) {
                const std::int64_t val = entry(x + h * y);
                if (val == 0) continue;
                const FieldElement fv = f.from_int(val);
                for (std::size_t t = 0; t < per; ++t) ext[t * v + y] += fv * ltab[t][x];
            }
        }
        return ext;
    };
    std::vector<std::vector<FieldElement>> ea, eb;
    for (std::uint64_t i = 0; i < inst_.k; ++i)
        ea.push_back(extend([&](std::uint64_t c) { return a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)); }));
    for (std::uint64_t j = 0; j < inst_.kp; ++j)
        eb.push_back(extend([&](std::uint64_t c) { return b_(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)); }));

    std::vector<FieldElement> out;
    out.reserve(inst_.annotation_elements());
    std::vector<FieldElement> vals(per, f.zero());
    const ConsecutiveInterpolator interp(f, per);
    for (std::uint64_t j = 0; j < inst_.kp; ++j) {
        for (std::uint64_t i = 0; i < inst_.k; ++i) {
            for (std::size_t t = 0; t < per; ++t) {
                FieldElement acc = f.zero();
                for (std::uint64_t y = 0; y < v; ++y) acc += ea[i][t * v + y] * eb[j][t * v + y];
                vals[t] = acc;
            }
            auto coeffs = interp(vals).padded(per);
            out.insert(out.end(), coeffs.begin(), coeffs.end());
        }
    }
    return out;
}

std::string MatMulProver::prove(Endpoint& ep, std::optional<Tamper> tamper) const {
    auto ann = annotation();
    if (tamper) {
        if (tamper->position >= ann.size()) throw std::invalid_argument("tamper position outside the annotation");
        ann[tamper->position] += inst_.field.from_int(tamper->delta);
    }
    ep.send_elements(PayloadKind::Annotation, ann);
    Frame f = ep.expect(PayloadKind::Verdict);
    return std::string(f.payload.begin(), f.payload.end());
}

MatMulReader::MatMulReader(std::istream& in) : in_(in) {
    std::string first;
    if (!detail::next_content_line(in_, first, line_)) throw ParseError(line_, "missing matmul header");
    auto toks = detail::split_ws(first);
    if (toks.size() != 6 || toks[0] != "matmul") throw ParseError(line_, "expected 'matmul k= n= kp= h= v='");
    k_ = detail::keyed_uint(toks[1], "k", line_);
    n_ = detail::keyed_uint(toks[2], "n", line_);
    kp_ = detail::keyed_uint(toks[3], "kp", line_);
    h_ = detail::keyed_uint(toks[4], "h", line_);
    v_ = detail::keyed_uint(toks[5], "v", line_);
    if (!k_ || !n_ || !kp_ || !h_ || !v_) throw ParseError(line_, "dimensions must be positive");
    if (h_ * v_ < n_) throw ParseError(line_, "h * v must cover n");
}

std::optional<MatMulEntry> MatMulReader::next() {
    std::string t;
    if (!detail::next_content_line(in_, t, line_)) return std::nullopt;
    auto toks = detail::split_ws(t);
    if (toks.size() != 5 || (toks[0] != "A" && toks[0] != "B")) throw ParseError(line_, "expected 'A|B idx x y value'");
    MatMulEntry e;
    e.side = toks[0] == "A" ? MatMulEntry::Side::A : MatMulEntry::Side::B;
    auto idx = detail::to_uint(toks[1]);
    auto x = detail::to_uint(toks[2]);
    auto y = detail::to_uint(toks[3]);
    auto val = detail::to_int(toks[4]);
    if (!idx || !x || !y) throw ParseError(line_, "bad index");
    if (!val) throw ParseError(line_, "bad value '" + toks[4] + "'");
    const std::uint64_t bound = e.side == MatMulEntry::Side::A ? k_ : kp_;
    if (*idx >= bound || *x >= h_ || *y >= v_ || *x + h_ * *y >= n_) throw ParseError(line_, "entry out of range");
    e.index = *idx;
    e.x = *x;
    e.y = *y;
    e.value = *val;
    return e;
}

void write_matmul_stream(std::ostream& out, const IntMatrix& a, const IntMatrix& b, std::uint64_t h, std::uint64_t v) {
    if (a.cols() != b.rows()) throw std::invalid_argument("inner dimensions differ");
    out << "matmul k=" << a.rows() << " n=" << a.cols() << " kp=" << b.cols() << " h=" << h << " v=" << v << "\n";
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            if (a(i, c) != 0)
                out << "A " << i << " " << static_cast<std::uint64_t>(c) % h << " " << static_cast<std::uint64_t>(c) / h
                    << " " << a(i, c) << "\n";
    for (Eigen::Index j = 0; j < b.cols(); ++j)
        for (Eigen::Index c = 0; c < b.rows(); ++c)
            if (b(c, j) != 0)
                out << "B " << j << " " << static_cast<std::uint64_t>(c) % h << " " << static_cast<std::uint64_t>(c) / h
                    << " " << b(c, j) << "\n";
}

void write_annotation(std::ostream& out, const MatMulInstance& inst, std::span<const FieldElement> annotation) {
    if (annotation.size() != inst.annotation_elements()) throw std::invalid_argument("annotation has the wrong size");
    const std::size_t per = inst.coeffs_per_entry();
    out << "annotation k=" << inst.k << " kp=" << inst.kp << " h=" << inst.h << " modulus=" << inst.field.modulus()
        << "\n";
    for (std::uint64_t j = 0; j < inst.kp; ++j) {
        for (std::uint64_t i = 0; i < inst.k; ++i) {
            out << i << " " << j;
            const std::size_t slot = inst.entry_slot(i, j);
            for (std::size_t t = 0; t < per; ++t) out << " " << annotation[slot * per + t].value();
            out << "\n";
        }
    }
}

std::vector<FieldElement> read_annotation(std::istream& in, const MatMulInstance& inst) {
    std::size_t line = 0;
    std::string t;
    if (!detail::next_content_line(in, t, line)) throw ParseError(line, "missing annotation header");
    auto toks = detail::split_ws(t);
    if (toks.size() != 5 || toks[0] != "annotation") throw ParseError(line, "expected 'annotation k= kp= h= modulus='");
    if (detail::keyed_uint(toks[1], "k", line) != inst.k || detail::keyed_uint(toks[2], "kp", line) != inst.kp ||
        detail::keyed_uint(toks[3], "h", line) != inst.h ||
        detail::keyed_uint(toks[4], "modulus", line) != inst.field.modulus())
        throw ParseError(line, "annotation header does not match the instance");

    const std::size_t per = inst.coeffs_per_entry();
    std::vector<FieldElement> out(inst.annotation_elements(), inst.field.zero());
    std::vector<bool> seen(inst.k * inst.kp, false);
    while (detail::next_content_line(in, t, line)) {
        toks = detail::split_ws(t);
        if (toks.size() != per + 2) throw ParseError(line, "expected i j and " + std::to_string(per) + " coefficients");
        auto i = detail::to_uint(toks[0]);
        auto j = detail::to_uint(toks[1]);
        if (!i || !j || *i >= inst.k || *j >= inst.kp) throw ParseError(line, "entry index out of range");
        const std::size_t slot = inst.entry_slot(*i, *j);
        if (seen[slot]) throw ParseError(line, "duplicate entry");
        seen[slot] = true;
        for (std::size_t c = 0; c < per; ++c) {
            auto val = detail::to_uint(toks[c + 2]);
            if (!val || *val >= inst.field.modulus()) throw ParseError(line, "bad coefficient '" + toks[c + 2] + "'");
            out[slot * per + c] = inst.field.from_uint(*val);
        }
    }
    for (bool s : seen)
        if (!s) throw ParseError(line, "annotation is missing entries");
    return out;
}

IntMatrix schoolbook_product(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("inner dimensions differ");
    IntMatrix c = IntMatrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index t = 0; t < a.cols(); ++t) c(i, j) += a(i, t) * b(t, j);
    return c;
}

}  // namespace sipkit
