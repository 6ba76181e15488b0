#include "sipkit/session.hpp"

#include "text_util.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sipkit {

namespace {

ProtocolResult from_sumcheck(const SumcheckOutcome& o, const char* key) {
    ProtocolResult r{o.accepted, o.reason, {}};
    if (o.accepted && o.claimed_sum) r.value = std::string(key) + "=" + std::to_string(o.claimed_sum->to_signed()) + "\n";
    return r;
}

ProtocolResult from_geo(const GeoOutcome& o, const char* key) {
    ProtocolResult r{o.accepted, o.reason, {}};
    if (o.accepted) r.value = std::string(key) + "=" + o.value.str() + "\n";
    return r;
}

std::vector<std::int64_t> freqs_of(std::span<const StreamUpdate> stream, std::uint64_t u) {
    std::vector<std::int64_t> a(u, 0);
    for (const auto& s : stream) a.at(s.index) += s.delta;
    return a;
}

std::vector<GridPoint> distinct(std::span<const GridPoint> pts) {
    std::vector<GridPoint> out(pts.begin(), pts.end());
    std::sort(out.begin(), out.end(), lex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

// ---- typed runners ----

ProtocolResult verify_frequency(Endpoint& ep, const FrequencyStatistic& fs, std::span<const StreamUpdate> stream, Rng& rng) {
    FrequencyStatisticVerifier v(fs, rng);
    for (const auto& s : stream) v.observe(s);
    ep.set_stream_passes(1);
    return from_sumcheck(v.verify(ep), "value");
}

std::string prove_frequency(Endpoint& ep, const FrequencyStatistic& fs, std::span<const StreamUpdate> stream,
                            std::int64_t lie) {
    auto honest = fs.prover(freqs_of(stream, fs.u));
    if (lie == 0) return prove_sumcheck(ep, honest);
    GreedyCheatingProver cheat(std::move(honest), fs.h.field().from_int(lie));
    return prove_sumcheck(ep, cheat);
}

ProtocolResult verify_point_query(Endpoint& ep, std::uint64_t u, std::span<const StreamUpdate> stream, std::uint64_t q,
                                  Rng& rng) {
    PointQueryVerifier v(ep.field(), u, rng);
    for (const auto& s : stream) v.observe(s);
    ep.set_stream_passes(1);
    const auto r = v.query(ep, q);
    ProtocolResult out{r.accepted, r.reason, {}};
    if (r.accepted) out.value = "value=" + std::to_string(r.as_int()) + "\n";
    return out;
}

std::string prove_point_query(Endpoint& ep, std::uint64_t u, std::span<const StreamUpdate> stream, std::uint64_t q,
                              std::int64_t lie) {
    PointQueryProver p(ep.field(), u);
    for (const auto& s : stream) p.observe(s);
    return p.answer(ep, q, lie);
}

ProtocolResult verify_matmul(Endpoint& ep, const MatMulInstance& inst, std::span<const MatMulEntry> entries, Rng& rng) {
    MatMulVerifier v(inst, rng);
    for (const auto& e : entries) v.observe(e);
    ep.set_stream_passes(1);
    const auto r = v.verify(ep);
    ProtocolResult out{r.accepted, r.reason, {}};
    if (r.accepted) {
        std::ostringstream os;
        for (Eigen::Index i = 0; i < r.product.rows(); ++i) {
            os << "row" << i << "=";
            for (Eigen::Index j = 0; j < r.product.cols(); ++j) os << (j ? " " : "") << r.product(i, j);
            os << "\n";
        }
        out.value = os.str();
    }
    return out;
}

std::string prove_matmul(Endpoint& ep, const MatMulInstance& inst, std::span<const MatMulEntry> entries,
                         std::optional<MatMulProver::Tamper> tamper) {
    MatMulProver p(inst);
    for (const auto& e : entries) p.observe(e);
    return p.prove(ep, tamper);
}

ProtocolResult verify_eigen(Endpoint& ep, const EigenInstance& inst, std::span<const EigenEvent> events, Rng& rng) {
    EigenVerifier v(inst, rng);
    for (const auto& e : events) v.observe(e);
    ep.set_stream_passes(1);
    const auto r = v.verify(ep);
    return {r.accepted, r.reason, r.accepted ? "pairs=" + std::to_string(inst.k) + "\n" : ""};
}

std::string prove_eigen(Endpoint& ep, const EigenInstance& inst, std::span<const EigenEvent> events) {
    EigenProver p(inst);
    for (const auto& e : events) p.observe(e);
    return p.prove(ep);
}

ProtocolResult verify_meb(Endpoint& ep, const GridUniverse& grid, const BallSpace& space, std::span<const GridPoint> pts,
                          Rng& rng) {
    GeoVerifierState st(ep.field(), space.size(), grid.size(), rng);
    for (const auto& p : pts) st.observe(space, p, grid.encode(p));
    ep.set_stream_passes(1);
    auto check = [&](const std::string& t) { return check_meb_claim(MebClaim::parse(t), grid, space); };
    return from_geo(st.verify(ep, check), "radius2");
}

std::string prove_meb(Endpoint& ep, const GridUniverse& grid, const BallSpace& space, std::span<const GridPoint> pts,
                      const CheatConfig& cheat) {
    GeoProverState st(ep.field(), space.size(), grid.size());
    for (const auto& p : pts) st.observe(space, p, grid.encode(p));
    MebClaim claim = meb_prove(pts);
    if (cheat.understate) claim.radius2 -= Rational(1);
    auto check = [&](const std::string& t) { return check_meb_claim(MebClaim::parse(t), grid, space); };
    return st.prove(ep, claim.to_text(), check, cheat.lie);
}

ProtocolResult verify_width(Endpoint& ep, const GridUniverse& grid, const SlabSpace& space, std::span<const GridPoint> pts,
                            Rng& rng) {
    GeoVerifierState st(ep.field(), space.size(), grid.size(), rng);
    for (const auto& p : pts) st.observe(space, p, grid.encode(p));
    ep.set_stream_passes(1);
    auto check = [&](const std::string& t) { return check_width_claim(WidthClaim::parse(t), grid, space); };
    return from_geo(st.verify(ep, check), "width2");
}

std::string prove_width(Endpoint& ep, const GridUniverse& grid, const SlabSpace& space, std::span<const GridPoint> pts,
                        const CheatConfig& cheat) {
    GeoProverState st(ep.field(), space.size(), grid.size());
    for (const auto& p : pts) st.observe(space, p, grid.encode(p));
    WidthClaim claim = width_prove(pts, space);
    if (cheat.understate && claim.slab.hi > claim.slab.lo) --claim.slab.hi;
    auto check = [&](const std::string& t) { return check_width_claim(WidthClaim::parse(t), grid, space); };
    return st.prove(ep, claim.to_text(), check, cheat.lie);
}

ProtocolResult verify_kcenter(Endpoint& ep, const MetricSpace& metric, const MetricBallUnionSpace& space, int k,
                              std::span<const int> pts, Rng& rng) {
    GeoVerifierState st(ep.field(), space.size(), static_cast<std::uint64_t>(metric.size()), rng);
    for (int p : pts) st.observe(space, p, static_cast<std::uint64_t>(p));
    ep.set_stream_passes(1);
    auto check = [&](const std::string& t) { return check_kcenter_claim(KCenterClaim::parse(t), k, metric, space); };
    return from_geo(st.verify(ep, check), "radius");
}

std::string prove_kcenter(Endpoint& ep, const MetricSpace& metric, const MetricBallUnionSpace& space, int k,
                          std::span<const int> pts, const CheatConfig& cheat) {
    GeoProverState st(ep.field(), space.size(), static_cast<std::uint64_t>(metric.size()));
    for (int p : pts) st.observe(space, p, static_cast<std::uint64_t>(p));
    KCenterClaim claim = kcenter_prove(metric, pts, k);
    auto check = [&](const std::string& t) { return check_kcenter_claim(KCenterClaim::parse(t), k, metric, space); };
    std::int64_t lie = cheat.lie;
    if (cheat.understate) {
        const auto below = distance_below(metric, kcenter_opt(metric, pts, k));
        if (below) {
            claim.radius = *below;
            auto cc = check(claim.to_text());
            if (const auto* plan = std::get_if<GeoPlan>(&cc))
                lie += static_cast<std::int64_t>(st.count()) - st.range_count(plan->range);
        }
    }
    return st.prove(ep, claim.to_text(), check, lie);
}

ProtocolResult verify_kslab(Endpoint& ep, const GridUniverse& grid, const KSlabSpace& space, int k,
                            std::span<const GridPoint> pts, Rng& rng) {
    GeoVerifierState st(ep.field(), space.size(), grid.size(), rng);
    for (const auto& p : pts) st.observe(space, p, grid.encode(p));
    ep.set_stream_passes(1);
    auto check = [&](const std::string& t) { return check_kslab_claim(KSlabClaim::parse(t), k, space); };
    return from_geo(st.verify(ep, check), "cost");
}

std::string prove_kslab(Endpoint& ep, const GridUniverse& grid, const KSlabSpace& space, int k,
                        std::span<const GridPoint> pts, const CheatConfig& cheat) {
    GeoProverState st(ep.field(), space.size(), grid.size());
    for (const auto& p : pts) st.observe(space, p, grid.encode(p));
    KSlabClaim claim = kslab_prove(pts, space);
    std::int64_t lie = cheat.lie;
    if (cheat.understate) {
        // first k-slab leaving out exactly one input point
        const auto ds = distinct(pts);
        std::optional<std::uint64_t> pick;
        space.for_each([&](std::uint64_t i, const KSlabRange& r) {
            std::size_t missed = 0;
            for (const auto& p : ds) missed += !r.contains(p);
            if (missed != 1) return true;
            pick = i;
            return false;
        });
        if (pick) {
            claim.slabs = space.at(*pick).slabs;
            lie += static_cast<std::int64_t>(st.count()) - st.range_count(*pick);
        }
    }
    auto check = [&](const std::string& t) { return check_kslab_claim(KSlabClaim::parse(t), k, space); };
    return st.prove(ep, claim.to_text(), check, lie);
}

// ---- config-driven runs ----

const std::vector<std::string>& protocol_names() {
    static const std::vector<std::string> names = {"f2",  "fk",    "pointquery", "matmul", "eigen",
                                                   "meb", "width", "kcenter",    "kslab"};
    return names;
}

std::string ProtocolConfig::params_text() const {
    std::string s;
    for (const auto& [k, v] : params) s += k + "=" + v + "\n";
    return s;
}

std::map<std::string, std::string> ProtocolConfig::parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad parameter line '" + line + "'");
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

std::int64_t ProtocolConfig::int_param(const std::string& key, std::int64_t fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    auto v = detail::to_int(it->second);
    if (!v) throw std::invalid_argument("parameter " + key + " must be an integer");
    return *v;
}

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input '" + path + "'");
    return in;
}

struct UpdateInput {
    StreamHeader header;
    std::vector<StreamUpdate> updates;
};

UpdateInput read_updates(const std::string& path) {
    auto in = open_input(path);
    UpdateInput out;
    out.updates = parse_stream(in, &out.header);
    return out;
}

struct GridInput {
    GridUniverse grid{1, 1};
    std::vector<GridPoint> points;
};

GridInput read_grid(const std::string& path) {
    auto in = open_input(path);
    GridInput out;
    out.points = read_points(in, &out.grid);
    return out;
}

struct MetricInput {
    MetricSpace metric;
    std::vector<int> points;
};

MetricInput read_metric_stream(const std::string& path) {
    auto in = open_input(path);
    StreamHeader h;
    auto ups = parse_stream(in, &h);
    if (h.kind != StreamKind::Metric) throw std::invalid_argument("expected a metric stream");
    namespace fs = std::filesystem;
    fs::path mp(h.metric_path);
    if (mp.is_relative() && !fs::exists(mp)) mp = fs::path(path).parent_path() / mp;
    MetricInput out{load_metric(mp.string()), {}};
    for (const auto& u : ups) {
        if (u.index >= static_cast<std::uint64_t>(out.metric.size())) throw std::invalid_argument("metric element out of range");
        out.points.push_back(static_cast<int>(u.index));
    }
    return out;
}

FrequencyStatistic statistic_for(const ProtocolConfig& cfg, const PrimeField& f, std::uint64_t u) {
    const std::int64_t k = cfg.protocol == "f2" ? 2 : cfg.int_param("k", 2);
    if (k < 1 || k > 64) throw std::invalid_argument("moment order k must lie in [1, 64]");
    std::vector<FieldElement> c(static_cast<std::size_t>(k) + 1, f.zero());
    c.back() = f.one();
    return FrequencyStatistic(UnivariatePoly(f, c), u);
}

MatMulInstance matmul_instance(const MatMulReader& rd, const PrimeField& f) {
    return MatMulInstance(rd.k(), rd.n(), rd.kp(), rd.h(), rd.v(), f);
}

template <class Fn>
auto with_protocol(const ProtocolConfig& cfg, Endpoint& ep, Fn&& fn) {
    if (std::find(protocol_names().begin(), protocol_names().end(), cfg.protocol) == protocol_names().end())
        throw std::invalid_argument("unknown protocol '" + cfg.protocol + "'");
    if (ep.field().modulus() != cfg.modulus) throw std::invalid_argument("endpoint field differs from the configuration");
    return fn();
}

}  // namespace

ProtocolResult run_verifier(const ProtocolConfig& cfg, Endpoint& ep) {
    return with_protocol(cfg, ep, [&]() -> ProtocolResult {
        Rng rng(cfg.seed);
        const PrimeField f(cfg.modulus);
        const auto& p = cfg.protocol;
        if (p == "f2" || p == "fk") {
            auto in = read_updates(cfg.input);
            return verify_frequency(ep, statistic_for(cfg, f, in.header.universe), in.updates, rng);
        }
        if (p == "pointquery") {
            auto in = read_updates(cfg.input);
            return verify_point_query(ep, in.header.universe, in.updates,
                                      static_cast<std::uint64_t>(cfg.int_param("q", 0)), rng);
        }
        if (p == "matmul") {
            auto in = open_input(cfg.input);
            MatMulReader rd(in);
            const auto inst = matmul_instance(rd, f);
            std::vector<MatMulEntry> es;
            while (auto e = rd.next()) es.push_back(*e);
            return verify_matmul(ep, inst, es, rng);
        }
        if (p == "eigen") {
            auto in = open_input(cfg.input);
            EigenReader rd(in);
            EigenInstance inst(rd.n(), rd.k(), rd.h(), rd.v(), f);
            std::vector<EigenEvent> es;
            while (auto e = rd.next()) es.push_back(*e);
            return verify_eigen(ep, inst, es, rng);
        }
        if (p == "kcenter") {
            auto in = read_metric_stream(cfg.input);
            const int k = static_cast<int>(cfg.int_param("k", 2));
            const auto space = make_metric_ball_union_space(in.metric, k);
            return verify_kcenter(ep, in.metric, space, k, in.points, rng);
        }
        auto in = read_grid(cfg.input);
        if (p == "meb") return verify_meb(ep, in.grid, make_ball_space(in.grid), in.points, rng);
        if (p == "width") return verify_width(ep, in.grid, make_slab_space(in.grid), in.points, rng);
        const int k = static_cast<int>(cfg.int_param("k", 2));
        return verify_kslab(ep, in.grid, make_kslab_space(make_slab_space(in.grid), k), k, in.points, rng);
    });
}

std::string run_prover(const ProtocolConfig& cfg, Endpoint& ep) {
    return with_protocol(cfg, ep, [&]() -> std::string {
        const PrimeField f(cfg.modulus);
        const auto& p = cfg.protocol;
        if (p == "f2" || p == "fk") {
            auto in = read_updates(cfg.input);
            return prove_frequency(ep, statistic_for(cfg, f, in.header.universe), in.updates, cfg.cheat.lie);
        }
        if (p == "pointquery") {
            auto in = read_updates(cfg.input);
            return prove_point_query(ep, in.header.universe, in.updates, static_cast<std::uint64_t>(cfg.int_param("q", 0)),
                                     cfg.cheat.lie);
        }
        if (p == "matmul") {
            auto in = open_input(cfg.input);
            MatMulReader rd(in);
            const auto inst = matmul_instance(rd, f);
            std::vector<MatMulEntry> es;
            while (auto e = rd.next()) es.push_back(*e);
            return prove_matmul(ep, inst, es, cfg.cheat.tamper);
        }
        if (p == "eigen") {
            auto in = open_input(cfg.input);
            EigenReader rd(in);
            EigenInstance inst(rd.n(), rd.k(), rd.h(), rd.v(), f);
            std::vector<EigenEvent> es;
            while (auto e = rd.next()) es.push_back(*e);
            return prove_eigen(ep, inst, es);
        }
        if (p == "kcenter") {
            auto in = read_metric_stream(cfg.input);
            const int k = static_cast<int>(cfg.int_param("k", 2));
            const auto space = make_metric_ball_union_space(in.metric, k);
            return prove_kcenter(ep, in.metric, space, k, in.points, cfg.cheat);
        }
        auto in = read_grid(cfg.input);
        if (p == "meb") return prove_meb(ep, in.grid, make_ball_space(in.grid), in.points, cfg.cheat);
        if (p == "width") return prove_width(ep, in.grid, make_slab_space(in.grid), in.points, cfg.cheat);
        const int k = static_cast<int>(cfg.int_param("k", 2));
        return prove_kslab(ep, in.grid, make_kslab_space(make_slab_space(in.grid), k), k, in.points, cfg.cheat);
    });
}

}  // namespace sipkit
