// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "sipkit/ortho.hpp"
#include "sipkit/runner.hpp"
#include "sipkit/session.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

using namespace sipkit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

int failures = 0;

void report(int id, const std::string& name, const Check& c, const std::string& summary) {
    std::printf("criterion %2d %-28s %s  %s\n", id, name.c_str(), c.ok ? "PASS" : "FAIL",
                c.ok ? summary.c_str() : c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

FieldElement cube_sum(std::span<const FieldElement> t) {
    FieldElement acc = t[0].field().zero();
    for (const auto& x : t) acc += x;
    return acc;
}

SumcheckProver identity_prover(const PrimeField& f, std::vector<FieldElement> table) {
    return SumcheckProver(f, {std::move(table)}, 1, [](std::span<const FieldElement> x) { return x[0]; });
}

std::vector<StreamUpdate> random_stream(std::uint64_t u, int n, Rng& rng) {
    std::vector<StreamUpdate> ups;
    for (int i = 0; i < n; ++i) ups.push_back({rng() % u, 1});
    return ups;
}

std::vector<GridPoint> random_points(Rng& rng, std::int64_t m, int d, int n) {
    std::uniform_int_distribution<std::int64_t> c(0, m - 1);
    std::vector<GridPoint> pts;
    for (int i = 0; i < n; ++i) {
        GridPoint p(d);
        for (int a = 0; a < d; ++a) p(a) = c(rng);
        pts.push_back(p);
    }
    return pts;
}

IntMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    std::uniform_int_distribution<std::int64_t> d(-9, 9);
    IntMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = d(rng);
    return m;
}

template <class Reader, class Event>
std::vector<Event> read_all(Reader& rd) {
    std::vector<Event> out;
    while (auto e = rd.next()) out.push_back(*e);
    return out;
}

std::vector<MatMulEntry> matmul_entries(const IntMatrix& a, const IntMatrix& b, std::uint64_t h, std::uint64_t v) {
    std::ostringstream os;
    write_matmul_stream(os, a, b, h, v);
    std::istringstream is(os.str());
    MatMulReader rd(is);
    return read_all<MatMulReader, MatMulEntry>(rd);
}

std::vector<EigenEvent> eigen_stream(const EigenProblem& p, std::uint64_t& h, std::uint64_t& v) {
    std::tie(h, v) = MatMulInstance::default_split(static_cast<std::uint64_t>(p.a.rows()));
    return eigen_events(p);
}

EigenProblem two_by_two() {
    EigenProblem p;
    p.a = IntMatrix(2, 2);
    p.a << 2, 1, 1, 2;
    p.vecs = IntMatrix(2, 2);
    p.vecs << 1, 1, 1, -1;
    p.lambdas = {3, 1};
    return p;
}

ProtocolResult run_eigen(const EigenProblem& p, Rng& rng) {
    std::uint64_t h = 0, v = 0;
    const auto es = eigen_stream(p, h, v);
    const EigenInstance inst(static_cast<std::uint64_t>(p.a.rows()), static_cast<std::uint64_t>(p.vecs.cols()), h, v);
    return run_local(
               inst.av.field, [&](Endpoint& ep) { return verify_eigen(ep, inst, es, rng); },
               [&](Endpoint& ep) { prove_eigen(ep, inst, es); })
        .result;
}

std::string value_of(const ProtocolResult& r, const std::string& key) {
    std::istringstream is(r.value);
    for (std::string line; std::getline(is, line);)
        if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
    return "";
}

FrequencyStatistic second_moment(const PrimeField& f, std::uint64_t u) {
    return FrequencyStatistic(UnivariatePoly(f, {f.zero(), f.zero(), f.one()}), u);
}

// ---- criteria ----

void criterion1() {
    Check c;
    const PrimeField f;
    Rng rng(101);
    const auto t0 = Clock::now();
    int accepted = 0;
    for (int t = 0; t < 200; ++t) {
        const unsigned v = 2 + static_cast<unsigned>(t % 7);
        auto table = sample_vector(rng, f, std::size_t{1} << v);
        const auto r = sample_vector(rng, f, v);
        const auto at_r = mle_full_eval(table, r);
        auto run = run_local(
            f,
            [&](Endpoint& ep) {
                SumcheckVerifier vs(std::vector<int>(v, 1), r, cube_sum(table));
                return verify_sumcheck(ep, vs, [&] { return at_r; });
            },
            [&](Endpoint& ep) {
                auto p = identity_prover(f, table);
                prove_sumcheck(ep, p);
            });
        accepted += run.result.accepted;
    }
    const double secs = seconds_since(t0);
    c.require(accepted == 200, std::to_string(accepted) + "/200 accepted");
    c.require(secs < 10.0, "took " + std::to_string(secs) + " s");
    char buf[96];
    std::snprintf(buf, sizeof buf, "200/200 accepted, v=2..8, %.2f s", secs);
    report(1, "sumcheck completeness", c, buf);
}

void criterion2() {
    Check c;
    const PrimeField f(101);
    Rng rng(102);
    const unsigned v = 4;
    int rejected = 0;
    for (int t = 0; t < 500; ++t) {
        auto table = sample_vector(rng, f, 16);
        const auto r = sample_vector(rng, f, v);
        const auto at_r = mle_full_eval(table, r);
        auto run = run_local(
            f,
            [&](Endpoint& ep) {
                SumcheckVerifier vs(std::vector<int>(v, 1), r, cube_sum(table) + f.one());
                return verify_sumcheck(ep, vs, [&] { return at_r; });
            },
            [&](Endpoint& ep) {
                GreedyCheatingProver p(identity_prover(f, table), f.one());
                prove_sumcheck(ep, p);
            });
        rejected += !run.result.accepted;
    }
    c.require(rejected >= 450, std::to_string(rejected) + "/500 rejected, need 450");
    report(2, "sumcheck soundness", c, std::to_string(rejected) + "/500 rejected over GF(101)");
}

void criterion3() {
    Check c;
    const PrimeField f;
    Rng rng(103);
    const std::uint64_t u = 256;
    int exact = 0;
    std::uint64_t worst_peak = 0;
    for (int t = 0; t < 50; ++t) {
        const auto ups = random_stream(u, 1000, rng);
        const auto fs = second_moment(f, u);
        auto run = run_local(
            f, [&](Endpoint& ep) { return verify_frequency(ep, fs, ups, rng); },
            [&](Endpoint& ep) { prove_frequency(ep, fs, ups); });
        std::int64_t truth = 0;
        for (auto a : frequencies(ups, u)) truth += a * a;
        exact += run.result.accepted && value_of(run.result, "value") == std::to_string(truth);
        c.require(run.cost.rounds == 8, "rounds " + std::to_string(run.cost.rounds));
        c.require(run.cost.elements_prover_to_verifier == 8 * 3, "coefficients " + std::to_string(run.cost.elements_prover_to_verifier));
        c.require(run.cost.elements_verifier_to_prover == 8, "challenges " + std::to_string(run.cost.elements_verifier_to_prover));
        worst_peak = std::max(worst_peak, run.cost.peak_verifier_elements);
    }
    c.require(exact == 50, std::to_string(exact) + "/50 exact");
    c.require(worst_peak <= 15, "peak state " + std::to_string(worst_peak));
    report(3, "F2 frequency moment", c,
           "50/50 exact, 8 rounds x 3 coefficients + 8 challenges, peak state " + std::to_string(worst_peak));
}

void criterion4() {
    Check c;
    Rng rng(104);
    const std::uint64_t k = 4, n = 256;
    const IntMatrix a = random_matrix(rng, k, n);
    const IntMatrix b = random_matrix(rng, n, k);
    const IntMatrix want = schoolbook_product(a, b);
    std::ostringstream summary;
    for (auto [h, v] : {std::pair<std::uint64_t, std::uint64_t>{16, 16}, {256, 1}, {1, 256}}) {
        const MatMulInstance inst(k, n, k, h, v);
        const auto es = matmul_entries(a, b, h, v);
        MatMulProver prover(inst);
        for (const auto& e : es) prover.observe(e);
        const auto honest = prover.annotation();
        int ok = 0;
        CostReport cost;
        for (int t = 0; t < 10; ++t) {
            MatMulVerifier ver(inst, rng);
            for (const auto& e : es) ver.observe(e);
            auto run = run_local(
                inst.field, [&](Endpoint& ep) { return ver.verify(ep); }, [&](Endpoint& ep) { prover.prove(ep); });
            ok += run.result.accepted && run.result.product == want;
            cost = run.cost;
        }
        c.require(ok == 10, "h=" + std::to_string(h) + ": " + std::to_string(ok) + "/10 honest");
        std::uniform_int_distribution<std::size_t> pos(0, honest.size() - 1);
        int rejected = 0;
        for (int t = 0; t < 100; ++t) {
            MatMulVerifier ver(inst, rng);
            for (const auto& e : es) ver.observe(e);
            const auto p = pos(rng);
            auto run = run_local(
                inst.field, [&](Endpoint& ep) { return ver.verify(ep); },
                [&](Endpoint& ep) { prover.prove(ep, MatMulProver::Tamper{p, 1}); });
            rejected += !run.result.accepted;
        }
        c.require(rejected >= 98, "h=" + std::to_string(h) + ": " + std::to_string(rejected) + "/100 tampered rejected");
        const auto comm = static_cast<std::int64_t>(cost.elements_prover_to_verifier);
        const auto comm_formula = static_cast<std::int64_t>(k * k * (2 * (h - 1) + 1));
        const auto state = static_cast<std::int64_t>(cost.peak_verifier_elements);
        const auto state_formula = static_cast<std::int64_t>(2 * v + 4);
        c.require(std::abs(comm - comm_formula) <= 1,
                  "h=" + std::to_string(h) + ": communication " + std::to_string(comm) + " vs " + std::to_string(comm_formula));
        c.require(std::abs(state - state_formula) <= 1,
                  "h=" + std::to_string(h) + ": state " + std::to_string(state) + " vs " + std::to_string(state_formula));
        summary << "(h=" << h << ",v=" << v << ": comm " << comm << ", state " << state << ", tamper " << rejected << "/100) ";
    }
    report(4, "matrix multiplication", c, summary.str());
}

void criterion5() {
    Check c;
    Rng rng(105);
    c.require(run_eigen(two_by_two(), rng).accepted, "2x2 example rejected");
    auto perturbed = two_by_two();
    perturbed.lambdas[0] = 4;
    auto skew = two_by_two();
    skew.vecs << 1, 1, 1, 1;
    skew.lambdas = {3, 3};
    int bad_lambda = 0, bad_orth = 0;
    for (int t = 0; t < 100; ++t) {
        bad_lambda += !run_eigen(perturbed, rng).accepted;
        bad_orth += !run_eigen(skew, rng).accepted;
    }
    c.require(bad_lambda == 100, std::to_string(bad_lambda) + "/100 perturbed rejected");
    c.require(bad_orth == 100, std::to_string(bad_orth) + "/100 non-orthogonal rejected");
    int random_ok = 0;
    for (int t = 0; t < 20; ++t) {
        auto p = random_eigen_problem(1 + t % 4, rng);
        random_ok += run_eigen(p, rng).accepted;
        p.lambdas[0] += 1;
        c.require(!run_eigen(p, rng).accepted, "perturbed random problem accepted");
    }
    c.require(random_ok == 20, std::to_string(random_ok) + "/20 random accepted");
    report(5, "eigenpairs", c, "example accepted, 100/100 + 100/100 rejected, 20/20 random d<=4 accepted");
}

void criterion6() {
    Check c;
    Rng rng(106);
    const GridUniverse grid(16, 2);
    const auto space = make_ball_space(grid);
    const auto t0 = Clock::now();
    int honest = 0, matched = 0, caught = 0;
    for (int t = 0; t < 50; ++t) {
        const auto pts = random_points(rng, 16, 2, 2 + t % 19);
        auto run = run_local(
            PrimeField(), [&](Endpoint& ep) { return verify_meb(ep, grid, space, pts, rng); },
            [&](Endpoint& ep) { prove_meb(ep, grid, space, pts); });
        honest += run.result.accepted;
        matched += value_of(run.result, "radius2") == meb_by_subsets(pts).radius2.str();
        CheatConfig cheat;
        cheat.understate = true;
        auto bad = run_local(
            PrimeField(), [&](Endpoint& ep) { return verify_meb(ep, grid, space, pts, rng); },
            [&](Endpoint& ep) { prove_meb(ep, grid, space, pts, cheat); });
        caught += !bad.result.accepted;
    }
    const double secs = seconds_since(t0);
    c.require(honest == 50, std::to_string(honest) + "/50 honest accepted");
    c.require(matched == 50, std::to_string(matched) + "/50 radii match the oracle");
    c.require(caught == 50, std::to_string(caught) + "/50 understated rejected");
    c.require(secs < 60.0, "took " + std::to_string(secs) + " s");
    char buf[128];
    std::snprintf(buf, sizeof buf, "50/50 accepted and exact, 50/50 understated rejected, %.1f s", secs);
    report(6, "minimum enclosing ball", c, buf);
}

void criterion7() {
    Check c;
    Rng rng(107);
    const GridUniverse grid(8, 2);
    const auto space = make_slab_space(grid);
    int agree = 0, general = 0, accepted = 0;
    for (int t = 0; t < 25; ++t) {
        const auto pts = random_points(rng, 8, 2, 4 + t % 9);
        const auto claim = width_prove(pts, space);
        std::optional<Rational> best;
        space.for_each([&](std::uint64_t, const SlabRange& s) {
            for (const auto& p : pts)
                if (!s.contains(p)) return true;
            if (!best || s.cost() < *best) best = s.cost();
            return true;
        });
        agree += best && claim.slab.cost() == *best && *best == width_oracle_pairs(pts);
        if (claim.slab.lo < claim.slab.hi) {
            ++general;
            c.require(claim.on_h1.size() + claim.on_h2.size() == 3, "witness sizes do not sum to d+1");
        }
        auto run = run_local(
            PrimeField(), [&](Endpoint& ep) { return verify_width(ep, grid, space, pts, rng); },
            [&](Endpoint& ep) { prove_width(ep, grid, space, pts); });
        accepted += run.result.accepted;
    }
    c.require(agree == 25, std::to_string(agree) + "/25 agree with enumeration");
    c.require(accepted == 25, std::to_string(accepted) + "/25 accepted");
    report(7, "width", c,
           "25/25 agree with slab enumeration, " + std::to_string(general) + " positive-width witnesses of size 3, 25/25 accepted");
}

void criterion8() {
    Check c;
    Rng rng(108);
    int honest = 0, in_bounds = 0, infeasible = 0, caught = 0;
    for (int t = 0; t < 25; ++t) {
        const int m = 8 + t % 25;
        const int k = 1 + t % 3;
        const auto metric = random_graph_metric(m, rng);
        std::uniform_int_distribution<int> any(0, m - 1);
        std::vector<int> pts;
        for (int i = 0; i < m + 8; ++i) pts.push_back(any(rng));
        const auto space = make_metric_ball_union_space(metric, k);
        const auto opt = kcenter_opt(metric, pts, k);
        auto run = run_local(
            PrimeField(), [&](Endpoint& ep) { return verify_kcenter(ep, metric, space, k, pts, rng); },
            [&](Endpoint& ep) { prove_kcenter(ep, metric, space, k, pts); });
        honest += run.result.accepted;
        const auto r = std::stoll(value_of(run.result, "radius").empty() ? "-1" : value_of(run.result, "radius"));
        in_bounds += opt <= r && r <= 2 * opt;
        if (opt == 0) continue;
        ++infeasible;
        CheatConfig cheat;
        cheat.understate = true;
        auto bad = run_local(
            PrimeField(), [&](Endpoint& ep) { return verify_kcenter(ep, metric, space, k, pts, rng); },
            [&](Endpoint& ep) { prove_kcenter(ep, metric, space, k, pts, cheat); });
        caught += !bad.result.accepted;
    }
    c.require(honest == 25, std::to_string(honest) + "/25 honest accepted");
    c.require(in_bounds == 25, std::to_string(in_bounds) + "/25 within [OPT, 2 OPT]");
    c.require(infeasible > 0 && caught * 10 >= infeasible * 9,
              std::to_string(caught) + "/" + std::to_string(infeasible) + " infeasible claims rejected");
    report(8, "metric k-center", c,
           "25/25 accepted within [OPT, 2 OPT], " + std::to_string(caught) + "/" + std::to_string(infeasible) +
               " infeasible claims rejected");
}

void criterion9() {
    Check c;
    const PrimeField f;
    Rng rng(109);
    const std::uint64_t u = 64;
    const auto ups = random_stream(u, 300, rng);
    const auto a = frequencies(ups, u);
    int exact = 0;
    for (std::uint64_t q = 0; q < u; ++q) {
        auto run = run_local(
            f, [&](Endpoint& ep) { return verify_point_query(ep, u, ups, q, rng); },
            [&](Endpoint& ep) { prove_point_query(ep, u, ups, q); });
        exact += run.result.accepted && value_of(run.result, "value") == std::to_string(a[q]);
    }
    c.require(exact == 64, std::to_string(exact) + "/64 exact");
    report(9, "point query exhaustive", c, "64/64 queries exact");
}

void criterion10() {
    Check c;
    const auto eps = Rational::parse("0.2");
    int batches = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const auto set = generate_almost_orthogonal(400, eps, rng);
        batches += set.batches;
        c.require(set.signs.rows() == 54, "seed " + std::to_string(seed) + ": " + std::to_string(set.signs.rows()) + " vectors");
        const Eigen::MatrixXi x = set.signs.cast<int>();
        const Eigen::MatrixXi gram = x * x.transpose();
        for (Eigen::Index i = 0; i < gram.rows(); ++i)
            for (Eigen::Index j = 0; j < i; ++j)
                c.require(5 * std::abs(gram(i, j)) <= 400, "seed " + std::to_string(seed) + ": pair bound violated");
    }
    const double mean = batches / 20.0;
    c.require(mean <= 3.0, "mean batches " + std::to_string(mean));
    char buf[96];
    std::snprintf(buf, sizeof buf, "54 vectors for 20/20 seeds, mean batches %.2f", mean);
    report(10, "almost-orthogonal vectors", c, buf);
}

/// Runs the pair over loopback TCP; returns the verifier transcript.
std::vector<Frame> run_tcp(const PrimeField& f, const std::function<void(Endpoint&)>& verify,
                           const std::function<void(Endpoint&)>& prove) {
    TcpListener listener(0, "127.0.0.1");
    std::exception_ptr err;
    std::thread t([&] {
        try {
            auto ch = listener.accept();
            Endpoint ep(*ch, Role::Prover, 0, f);
            prove(ep);
            ch->close();
        } catch (...) {
            err = std::current_exception();
        }
    });
    auto ch = tcp_connect("127.0.0.1", listener.port());
    Endpoint ep(*ch, Role::Verifier, 0, f);
    verify(ep);
    ch->close();
    t.join();
    if (err) std::rethrow_exception(err);
    return ep.frames();
}

void criterion11() {
    Check c;
    const PrimeField f;
    const std::uint64_t seed = 111;
    Rng gen(seed);
    struct Case {
        std::string name;
        std::function<void(Endpoint&, Rng&)> verify;
        std::function<void(Endpoint&)> prove;
    };
    std::vector<Case> cases;

    const auto ups = random_stream(256, 1000, gen);
    const auto fs = second_moment(f, 256);
    cases.push_back({"f2", [&](Endpoint& ep, Rng& r) { verify_frequency(ep, fs, ups, r); },
                     [&](Endpoint& ep) { prove_frequency(ep, fs, ups); }});

    const IntMatrix a = random_matrix(gen, 4, 256), b = random_matrix(gen, 256, 4);
    const MatMulInstance mm(4, 256, 4, 16, 16);
    const auto mes = matmul_entries(a, b, 16, 16);
    cases.push_back({"matmul", [&](Endpoint& ep, Rng& r) { verify_matmul(ep, mm, mes, r); },
                     [&](Endpoint& ep) { prove_matmul(ep, mm, mes); }});

    const EigenInstance ei(2, 2, 2, 1);
    std::uint64_t eh = 0, ev = 0;
    const auto ees = eigen_stream(two_by_two(), eh, ev);
    cases.push_back({"eigen", [&](Endpoint& ep, Rng& r) { verify_eigen(ep, ei, ees, r); },
                     [&](Endpoint& ep) { prove_eigen(ep, ei, ees); }});

    const GridUniverse g16(16, 2), g8(8, 2);
    const auto balls = make_ball_space(g16);
    const auto slabs = make_slab_space(g8);
    const auto mpts = random_points(gen, 16, 2, 12);
    const auto wpts = random_points(gen, 8, 2, 8);
    cases.push_back({"meb", [&](Endpoint& ep, Rng& r) { verify_meb(ep, g16, balls, mpts, r); },
                     [&](Endpoint& ep) { prove_meb(ep, g16, balls, mpts); }});
    cases.push_back({"width", [&](Endpoint& ep, Rng& r) { verify_width(ep, g8, slabs, wpts, r); },
                     [&](Endpoint& ep) { prove_width(ep, g8, slabs, wpts); }});

    const auto metric = random_graph_metric(20, gen);
    const auto unions = make_metric_ball_union_space(metric, 3);
    std::vector<int> kpts;
    for (int i = 0; i < 30; ++i) kpts.push_back(static_cast<int>(gen() % 20));
    cases.push_back({"kcenter", [&](Endpoint& ep, Rng& r) { verify_kcenter(ep, metric, unions, 3, kpts, r); },
                     [&](Endpoint& ep) { prove_kcenter(ep, metric, unions, 3, kpts); }});

    const auto pups = random_stream(64, 300, gen);
    cases.push_back({"pointquery", [&](Endpoint& ep, Rng& r) { verify_point_query(ep, 64, pups, 17, r); },
                     [&](Endpoint& ep) { prove_point_query(ep, 64, pups, 17); }});

    int identical = 0;
    for (const auto& cs : cases) {
        const TranscriptHeader hdr{cs.name, "", f.modulus(), seed};
        Rng r1(seed), r2(seed);
        auto local = run_local(
            f,
            [&](Endpoint& ep) {
                cs.verify(ep, r1);
                return 0;
            },
            cs.prove);
        const auto tcp = run_tcp(
            f, [&](Endpoint& ep) { cs.verify(ep, r2); }, cs.prove);
        const bool same = Transcript{hdr, local.transcript}.serialize() == Transcript{hdr, tcp}.serialize();
        identical += same;
        c.require(same, cs.name + " transcripts differ");
    }
    report(11, "transport equivalence", c,
           std::to_string(identical) + "/" + std::to_string(cases.size()) + " protocols byte-identical over TCP");
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4,  criterion5, criterion6,
                                                    criterion7, criterion8, criterion9, criterion10, criterion11};
    for (std::size_t i = 0; i < all.size(); ++i) {
        try {
            all[i]();
        } catch (const std::exception& e) {
            Check c;
            c.require(false, std::string("exception: ") + e.what());
            report(static_cast<int>(i + 1), "(aborted)", c, "");
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, all.size());
    return failures == 0 ? 0 : 1;
}
