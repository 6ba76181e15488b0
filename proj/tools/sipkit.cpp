#include "sipkit/ortho.hpp"
#include "sipkit/runner.hpp"
#include "sipkit/session.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace sipkit;

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SIPKIT_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            auto v = std::stoull(env, &used);
            if (used == std::strlen(env)) return v;
        } catch (const std::exception&) {
        }
        throw UsageError("SIPKIT_SEED is not an unsigned integer");
    }
    throw UsageError("a seed is required: pass --seed or set SIPKIT_SEED");
}

/// Writes to `path`, or stdout for "-" / empty.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    fn(out);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& s, const std::string& default_host) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) throw UsageError("endpoint must be host:port or :port, got '" + s + "'");
    const std::string host = colon == 0 ? default_host : s.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(s.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("bad port in '" + s + "'");
    }
    if (port < 0 || port > 65535) throw UsageError("port out of range in '" + s + "'");
    return {host, static_cast<std::uint16_t>(port)};
}

// ---- gen ----

struct GenOptions {
    std::optional<std::uint64_t> seed;
    std::string out = "-";
    std::uint64_t u = 256, n = 1000;
    double delete_fraction = 0;
    std::int64_t m = 16;
    int d = 2;
    std::int64_t max_weight = 3;
    std::string stream_out;
    std::string eps = "0.2";
    std::uint64_t k = 4, kp = 4, h = 0, v = 0;
    std::int64_t bound = 9;
};

void gen_stream(const GenOptions& o, Rng& rng) {
    if (o.u == 0) throw UsageError("--u must be positive");
    if (o.delete_fraction < 0 || o.delete_fraction >= 1) throw UsageError("--delete-fraction must be in [0, 1)");
    std::uniform_int_distribution<std::uint64_t> idx(0, o.u - 1);
    std::bernoulli_distribution del(o.delete_fraction);
    std::vector<std::uint64_t> present;
    with_output(o.out, [&](std::ostream& out) {
        out << "u=" << o.u << "\n";
        for (std::uint64_t t = 0; t < o.n; ++t) {
            if (!present.empty() && del(rng)) {
                std::uniform_int_distribution<std::size_t> pick(0, present.size() - 1);
                const auto j = pick(rng);
                out << present[j] << " -1\n";
                present[j] = present.back();
                present.pop_back();
            } else {
                const auto i = idx(rng);
                present.push_back(i);
                out << i << " +1\n";
            }
        }
    });
}

void gen_points(const GenOptions& o, Rng& rng) {
    GridUniverse grid(o.m, o.d);
    std::uniform_int_distribution<std::int64_t> c(0, o.m - 1);
    with_output(o.out, [&](std::ostream& out) {
        out << "grid m=" << grid.m() << " d=" << grid.d() << "\n";
        for (std::uint64_t t = 0; t < o.n; ++t) {
            for (int a = 0; a < o.d; ++a) out << (a ? " " : "") << c(rng);
            out << "\n";
        }
    });
}

void gen_metric(const GenOptions& o, Rng& rng) {
    if (o.m < 1 || o.m > 4096) throw UsageError("--m must be in [1, 4096]");
    if (o.out.empty() || o.out == "-") throw UsageError("gen metric needs --out for the distance matrix");
    const auto metric = random_graph_metric(static_cast<int>(o.m), rng, o.max_weight);
    with_output(o.out, [&](std::ostream& out) { write_metric(out, metric); });
    if (o.stream_out.empty()) return;
    namespace fs = std::filesystem;
    const auto base = fs::path(o.stream_out).parent_path();
    const auto rel = fs::relative(fs::absolute(o.out), fs::absolute(base.empty() ? fs::path(".") : base));
    std::uniform_int_distribution<std::int64_t> any(0, o.m - 1);
    with_output(o.stream_out, [&](std::ostream& out) {
        out << "metric file=" << rel.generic_string() << "\n";
        for (std::uint64_t t = 0; t < o.n; ++t) out << any(rng) << "\n";
    });
}

void gen_ortho(const GenOptions& o, Rng& rng) {
    const auto eps = Rational::parse(o.eps);
    if (o.d < 1) throw UsageError("--d must be positive");
    const auto set = generate_almost_orthogonal(o.d, eps, rng);
    const bool ok = pairwise_within(set.signs, eps);
    if (!o.stream_out.empty()) {
        with_output(o.stream_out, [&](std::ostream& out) {
            out << "ortho d=" << o.d << " t=" << set.signs.rows() << " eps=" << eps.str() << "\n";
            for (Eigen::Index i = 0; i < set.signs.rows(); ++i) {
                for (Eigen::Index j = 0; j < set.signs.cols(); ++j) out << (set.signs(i, j) > 0 ? '+' : '-');
                out << "\n";
            }
        });
    }
    with_output(o.out, [&](std::ostream& out) {
        out << "d=" << o.d << "\neps=" << eps.str() << "\nvectors=" << set.signs.rows() << "\nbatches=" << set.batches
            << "\npairwise_ok=" << (ok ? 1 : 0) << "\n";
    });
    if (!ok) throw std::runtime_error("generated set fails the pairwise check");
}

IntMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::int64_t bound, Rng& rng) {
    std::uniform_int_distribution<std::int64_t> val(-bound, bound);
    IntMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = val(rng);
    return m;
}

std::pair<std::uint64_t, std::uint64_t> split_for(std::uint64_t n, std::uint64_t h, std::uint64_t v) {
    if (h == 0 && v == 0) return MatMulInstance::default_split(n);
    if (h == 0) h = (n + v - 1) / v;
    if (v == 0) v = (n + h - 1) / h;
    if (h * v < n) throw UsageError("h*v must be at least n");
    return {h, v};
}

void gen_matmul(const GenOptions& o, Rng& rng) {
    if (o.k == 0 || o.kp == 0 || o.n == 0) throw UsageError("--k, --kp and --n must be positive");
    const auto [h, v] = split_for(o.n, o.h, o.v);
    const auto a = random_matrix(static_cast<Eigen::Index>(o.k), static_cast<Eigen::Index>(o.n), o.bound, rng);
    const auto b = random_matrix(static_cast<Eigen::Index>(o.n), static_cast<Eigen::Index>(o.kp), o.bound, rng);
    with_output(o.out, [&](std::ostream& out) { write_matmul_stream(out, a, b, h, v); });
}

void gen_eigen(const GenOptions& o, Rng& rng) {
    if (o.d < 1 || o.d > 4) throw UsageError("--d must be in [1, 4]");
    const auto p = random_eigen_problem(o.d, rng);
    const auto [h, v] = split_for(static_cast<std::uint64_t>(o.d), o.h, o.v);
    with_output(o.out, [&](std::ostream& out) { write_eigen_stream(out, p, h, v); });
}

// ---- run / replay / report ----

struct RunOptions {
    std::string protocol;
    std::string input;
    std::optional<std::uint64_t> seed;
    std::uint64_t modulus = kMersenne61;
    std::string role = "both";
    std::string listen;
    std::string connect;
    std::string transcript;
    std::string report;
    std::vector<std::string> params;
    std::int64_t lie = 0;
    std::string tamper;
    bool understate = false;
    std::uint64_t trials = 1;
    unsigned jobs = 1;
};

ProtocolConfig make_config(const RunOptions& o) {
    ProtocolConfig cfg;
    cfg.protocol = o.protocol;
    cfg.input = o.input;
    cfg.modulus = o.modulus;
    cfg.seed = resolve_seed(o.seed);
    if (!is_prime(cfg.modulus)) throw UsageError("--modulus must be prime");
    for (const auto& kv : o.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
        cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    cfg.cheat.lie = o.lie;
    cfg.cheat.understate = o.understate;
    if (!o.tamper.empty()) {
        const auto colon = o.tamper.find(':');
        try {
            MatMulProver::Tamper t;
            t.position = std::stoull(o.tamper.substr(0, colon));
            t.delta = colon == std::string::npos ? 1 : std::stoll(o.tamper.substr(colon + 1));
            cfg.cheat.tamper = t;
        } catch (const std::exception&) {
            throw UsageError("--tamper expects position[:delta]");
        }
    }
    return cfg;
}

TranscriptHeader header_for(const ProtocolConfig& cfg) {
    return {cfg.protocol, cfg.params_text(), cfg.modulus, cfg.seed};
}

std::string result_kv(const std::string& protocol, const std::string& role, bool accepted, const std::string& reason,
                      const std::string& value, const CostReport& cost) {
    std::ostringstream os;
    os << "protocol=" << protocol << "\nrole=" << role << "\nverdict=" << (accepted ? "accept" : "reject") << "\n";
    if (!accepted) os << "reason=" << reason << "\n";
    os << value << cost.to_kv();
    return os.str();
}

void emit(const RunOptions& o, const std::string& kv, const std::string& human) {
    std::cout << kv;
    std::cerr << human << "\n";
    if (!o.report.empty()) with_output(o.report, [&](std::ostream& out) { out << kv; });
}

std::string human_line(const std::string& protocol, bool accepted, const std::string& reason, const CostReport& c) {
    std::ostringstream os;
    os << protocol << ": " << (accepted ? "ACCEPT" : "REJECT (" + reason + ")") << ", " << c.rounds << " prover messages, "
       << c.bits_prover_to_verifier + c.bits_verifier_to_prover << " bits exchanged, verifier state peak "
       << c.peak_verifier_elements << " field elements";
    return os.str();
}

int run_trials(const RunOptions& o, const ProtocolConfig& base) {
    if (o.role != "both") throw UsageError("--trials needs --role both");
    const unsigned jobs = std::max(1u, o.jobs);
    std::atomic<std::uint64_t> next{0}, accepted{0};
    std::mutex err_mu;
    std::string first_error;
    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= o.trials) return;
            auto cfg = base;
            cfg.seed = base.seed + i;
            try {
                PrimeField f(cfg.modulus);
                auto r = run_local(
                    f, [&](Endpoint& ep) { return run_verifier(cfg, ep); }, [&](Endpoint& ep) { run_prover(cfg, ep); });
                if (r.result.accepted) accepted.fetch_add(1);
            } catch (const std::exception& e) {
                std::lock_guard lock(err_mu);
                if (first_error.empty()) first_error = "trial seed " + std::to_string(cfg.seed) + ": " + e.what();
                next.store(o.trials);
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);
    const auto acc = accepted.load();
    std::ostringstream os;
    os << "protocol=" << base.protocol << "\ntrials=" << o.trials << "\nfirst_seed=" << base.seed << "\naccepted=" << acc
       << "\nrejected=" << o.trials - acc << "\nreject_rate=" << static_cast<double>(o.trials - acc) / static_cast<double>(o.trials)
       << "\n";
    emit(o, os.str(), base.protocol + ": " + std::to_string(acc) + "/" + std::to_string(o.trials) + " trials accepted");
    return kExitAccept;
}

int cmd_run(const RunOptions& o) {
    auto cfg = make_config(o);
    if (o.trials > 1) return run_trials(o, cfg);
    const PrimeField f(cfg.modulus);

    if (o.role == "both") {
        if (!o.listen.empty() || !o.connect.empty()) throw UsageError("--listen/--connect need --role prove or verify");
        auto r = run_local(
            f, [&](Endpoint& ep) { return run_verifier(cfg, ep); }, [&](Endpoint& ep) { run_prover(cfg, ep); });
        if (!o.transcript.empty()) Transcript{header_for(cfg), r.transcript}.save(o.transcript);
        emit(o, result_kv(cfg.protocol, "both", r.result.accepted, r.result.reason, r.result.value, r.cost),
             human_line(cfg.protocol, r.result.accepted, r.result.reason, r.cost));
        return r.result.accepted ? kExitAccept : kExitReject;
    }
    if (o.role == "verify") {
        if (o.connect.empty()) throw UsageError("--role verify needs --connect host:port");
        const auto [host, port] = parse_endpoint(o.connect, "127.0.0.1");
        auto ch = tcp_connect(host, port);
        Endpoint ep(*ch, Role::Verifier, 0, f);
        const auto r = run_verifier(cfg, ep);
        ch->close();
        if (!o.transcript.empty()) Transcript{header_for(cfg), ep.frames()}.save(o.transcript);
        emit(o, result_kv(cfg.protocol, "verify", r.accepted, r.reason, r.value, ep.cost()),
             human_line(cfg.protocol, r.accepted, r.reason, ep.cost()));
        return r.accepted ? kExitAccept : kExitReject;
    }
    if (o.role == "prove") {
        if (o.listen.empty()) throw UsageError("--role prove needs --listen [host]:port");
        const auto [host, port] = parse_endpoint(o.listen, "0.0.0.0");
        TcpListener listener(port, host);
        std::cerr << "listening on " << host << ":" << listener.port() << std::endl;
        auto ch = listener.accept();
        Endpoint ep(*ch, Role::Prover, 0, f);
        const auto verdict = run_prover(cfg, ep);
        ch->close();
        if (!o.transcript.empty()) Transcript{header_for(cfg), ep.frames()}.save(o.transcript);
        const bool ok = verdict == "accept";
        std::cout << "protocol=" << cfg.protocol << "\nrole=prove\nverdict=" << (ok ? "accept" : "reject") << "\n";
        if (!ok) std::cout << "reason=" << (verdict.rfind("reject:", 0) == 0 ? verdict.substr(7) : verdict) << "\n";
        std::cerr << cfg.protocol << ": verifier said " << verdict << "\n";
        return ok ? kExitAccept : kExitReject;
    }
    throw UsageError("--role must be prove, verify or both");
}

int cmd_replay(const std::string& path, const std::string& input) {
    const auto t = Transcript::load(path);
    ProtocolConfig cfg;
    cfg.protocol = t.header.protocol;
    cfg.input = input;
    cfg.params = ProtocolConfig::parse_params(t.header.params);
    cfg.modulus = t.header.modulus;
    cfg.seed = t.header.seed;
    ReplayChannel ch(t);
    Endpoint ep(ch, Role::Verifier, 0, PrimeField(cfg.modulus));
    ProtocolResult r;
    try {
        r = run_verifier(cfg, ep);
    } catch (const TransportError&) {
        r = {false, "truncated transcript", ""};
    } catch (const ProtocolError& e) {
        r = {false, std::string("protocol: ") + e.what(), ""};
    }
    const bool ok = r.accepted && !ch.diverged();
    if (r.accepted && ch.diverged()) r.reason = "verifier messages diverge from the transcript";
    std::cout << result_kv(cfg.protocol, "replay", ok, r.reason, r.value, ep.cost()) << "diverged=" << (ch.diverged() ? 1 : 0)
              << "\n";
    std::cerr << human_line(cfg.protocol, ok, r.reason, ep.cost()) << "\n";
    return ok ? kExitAccept : kExitReject;
}

int cmd_report(const std::string& path) {
    const auto t = Transcript::load(path);
    std::cout << "protocol=" << t.header.protocol << "\nmodulus=" << t.header.modulus << "\nseed=" << t.header.seed
              << "\nframes=" << t.frames.size() << "\n";
    std::istringstream ps(t.header.params);
    for (std::string line; std::getline(ps, line);)
        if (!line.empty()) std::cout << "param." << line << "\n";
    std::string verdict;
    for (const auto& f : t.frames)
        if (f.kind == PayloadKind::Verdict) verdict = std::string(f.payload.begin(), f.payload.end());
    if (!verdict.empty()) std::cout << "final_verdict=" << verdict << "\n";
    const auto c = cost_from_frames(t.frames);
    std::cout << "rounds=" << c.rounds << "\nbits_p2v=" << c.bits_prover_to_verifier << "\nbits_v2p=" << c.bits_verifier_to_prover
              << "\nelements_p2v=" << c.elements_prover_to_verifier << "\nelements_v2p=" << c.elements_verifier_to_prover << "\n";
    return kExitAccept;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming interactive proofs: generate inputs, run provers and verifiers, inspect transcripts"};
    app.require_subcommand(1);

    GenOptions g;
    auto* gen = app.add_subcommand("gen", "generate an input file");
    gen->require_subcommand(1);
    auto add_common = [&](CLI::App* c) {
        c->add_option("--seed", g.seed, "PRNG seed (falls back to SIPKIT_SEED)");
        c->add_option("--out,-o", g.out, "output path, - for stdout");
    };
    auto* g_stream = gen->add_subcommand("stream", "turnstile update stream over [u]");
    add_common(g_stream);
    g_stream->add_option("--u", g.u, "universe size");
    g_stream->add_option("--n", g.n, "number of updates");
    g_stream->add_option("--delete-fraction", g.delete_fraction, "chance an update deletes a present item");
    auto* g_points = gen->add_subcommand("points", "uniform points on the grid [m]^d");
    add_common(g_points);
    g_points->add_option("--m", g.m, "grid side");
    g_points->add_option("--d", g.d, "dimension");
    g_points->add_option("--n", g.n, "number of points");
    auto* g_metric = gen->add_subcommand("metric", "random graph metric, optionally with an element stream");
    add_common(g_metric);
    g_metric->add_option("--m", g.m, "number of elements");
    g_metric->add_option("--max-weight", g.max_weight, "largest edge weight");
    g_metric->add_option("--stream", g.stream_out, "also write a stream of --n elements here");
    g_metric->add_option("--n", g.n, "stream length");
    auto* g_ortho = gen->add_subcommand("ortho", "almost-orthogonal sign vectors");
    add_common(g_ortho);
    g_ortho->add_option("--d", g.d, "dimension")->required();
    g_ortho->add_option("--eps", g.eps, "inner product bound (decimal or fraction)");
    g_ortho->add_option("--vectors", g.stream_out, "write the vectors here");
    auto* g_matmul = gen->add_subcommand("matmul", "random integer matrices A (k x n), B (n x kp)");
    add_common(g_matmul);
    g_matmul->set_help_flag("--help", "print this help message and exit");
    g_matmul->add_option("--k", g.k);
    g_matmul->add_option("--n", g.n);
    g_matmul->add_option("--kp", g.kp);
    g_matmul->add_option("--h", g.h, "interpolation block length (0 = default)");
    g_matmul->add_option("--v", g.v, "number of blocks (0 = default)");
    g_matmul->add_option("--bound", g.bound, "entries drawn from [-bound, bound]");
    auto* g_eigen = gen->add_subcommand("eigen", "symmetric matrix with integer eigenpairs");
    add_common(g_eigen);
    g_eigen->set_help_flag("--help", "print this help message and exit");
    g_eigen->add_option("--d", g.d, "matrix size, 1..4");
    g_eigen->add_option("--h", g.h);
    g_eigen->add_option("--v", g.v);

    RunOptions r;
    auto* run = app.add_subcommand("run", "run a protocol in-process or split over TCP");
    run->add_option("--protocol,-p", r.protocol, "protocol")->required()->check(CLI::IsMember(protocol_names()));
    run->add_option("--input,-i", r.input, "input stream file")->required();
    run->add_option("--seed", r.seed, "verifier seed (falls back to SIPKIT_SEED)");
    run->add_option("--modulus", r.modulus, "prime field modulus");
    run->add_option("--role", r.role, "prove, verify or both")->check(CLI::IsMember({"prove", "verify", "both"}));
    run->add_option("--listen", r.listen, "prover address [host]:port");
    run->add_option("--connect", r.connect, "verifier target [host]:port");
    run->add_option("--transcript", r.transcript, "save this side's transcript");
    run->add_option("--report", r.report, "also write the key=value report here");
    run->add_option("--param,-P", r.params, "protocol parameter key=value (k, q)");
    run->add_option("--lie", r.lie, "prover shifts its claimed value by this much");
    run->add_option("--tamper", r.tamper, "matmul prover perturbs annotation position[:delta]");
    run->add_flag("--understate", r.understate, "geometric prover claims a smaller cost");
    run->add_option("--trials", r.trials, "independent in-process trials with seeds seed, seed+1, ...");
    run->add_option("--jobs,-j", r.jobs, "worker threads for --trials");

    std::string t_path, t_input;
    auto* replay = app.add_subcommand("replay", "re-run the verifier against a saved transcript");
    replay->add_option("--transcript", t_path)->required();
    replay->add_option("--input,-i", t_input, "the verifier's input stream")->required();
    auto* report = app.add_subcommand("report", "print header and communication cost of a transcript");
    report->add_option("--transcript", t_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (gen->parsed()) {
            Rng rng(resolve_seed(g.seed));
            if (g_stream->parsed()) gen_stream(g, rng);
            if (g_points->parsed()) gen_points(g, rng);
            if (g_metric->parsed()) gen_metric(g, rng);
            if (g_ortho->parsed()) gen_ortho(g, rng);
            if (g_matmul->parsed()) gen_matmul(g, rng);
            if (g_eigen->parsed()) gen_eigen(g, rng);
            return kExitAccept;
        }
        if (run->parsed()) return cmd_run(r);
        if (replay->parsed()) return cmd_replay(t_path, t_input);
        if (report->parsed()) return cmd_report(t_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kExitError;
}
