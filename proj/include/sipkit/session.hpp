#pragma once

#include "sipkit/eigen_verify.hpp"
#include "sipkit/geometry.hpp"
#include "sipkit/matmul.hpp"
#include "sipkit/pq_rc.hpp"
#include "sipkit/sumcheck.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sipkit {

struct ProtocolResult {
    bool accepted = false;
    std::string reason;
    std::string value;  // key=value lines describing what was verified
};

/// Deviations a dishonest prover can be asked to make.
struct CheatConfig {
    std::int64_t lie = 0;                           // shift of the claimed sum or count
    std::optional<MatMulProver::Tamper> tamper;     // matmul annotation
    bool understate = false;                        // geometric claims: claim a smaller cost
};

// ---- typed runners (inputs already parsed) ----

ProtocolResult verify_frequency(Endpoint& ep, const FrequencyStatistic& fs, std::span<const StreamUpdate> stream, Rng& rng);
std::string prove_frequency(Endpoint& ep, const FrequencyStatistic& fs, std::span<const StreamUpdate> stream,
                            std::int64_t lie = 0);

ProtocolResult verify_point_query(Endpoint& ep, std::uint64_t u, std::span<const StreamUpdate> stream, std::uint64_t q,
                                  Rng& rng);
std::string prove_point_query(Endpoint& ep, std::uint64_t u, std::span<const StreamUpdate> stream, std::uint64_t q,
                              std::int64_t lie = 0);

ProtocolResult verify_matmul(Endpoint& ep, const MatMulInstance& inst, std::span<const MatMulEntry> entries, Rng& rng);
std::string prove_matmul(Endpoint& ep, const MatMulInstance& inst, std::span<const MatMulEntry> entries,
                         std::optional<MatMulProver::Tamper> tamper = std::nullopt);

ProtocolResult verify_eigen(Endpoint& ep, const EigenInstance& inst, std::span<const EigenEvent> events, Rng& rng);
std::string prove_eigen(Endpoint& ep, const EigenInstance& inst, std::span<const EigenEvent> events);

ProtocolResult verify_meb(Endpoint& ep, const GridUniverse& grid, const BallSpace& space, std::span<const GridPoint> pts,
                          Rng& rng);
std::string prove_meb(Endpoint& ep, const GridUniverse& grid, const BallSpace& space, std::span<const GridPoint> pts,
                      const CheatConfig& cheat = {});

ProtocolResult verify_width(Endpoint& ep, const GridUniverse& grid, const SlabSpace& space, std::span<const GridPoint> pts,
                            Rng& rng);
std::string prove_width(Endpoint& ep, const GridUniverse& grid, const SlabSpace& space, std::span<const GridPoint> pts,
                        const CheatConfig& cheat = {});

ProtocolResult verify_kcenter(Endpoint& ep, const MetricSpace& metric, const MetricBallUnionSpace& space, int k,
                              std::span<const int> pts, Rng& rng);
/// With `understate`, claims the largest distance below the optimum and lies about the count.
std::string prove_kcenter(Endpoint& ep, const MetricSpace& metric, const MetricBallUnionSpace& space, int k,
                          std::span<const int> pts, const CheatConfig& cheat = {});

ProtocolResult verify_kslab(Endpoint& ep, const GridUniverse& grid, const KSlabSpace& space, int k,
                            std::span<const GridPoint> pts, Rng& rng);
/// With `understate`, claims the first k-slab missing exactly one point and lies about the count.
std::string prove_kslab(Endpoint& ep, const GridUniverse& grid, const KSlabSpace& space, int k,
                        std::span<const GridPoint> pts, const CheatConfig& cheat = {});

// ---- config-driven runs (what the command line uses) ----

/// f2, fk, pointquery, matmul, eigen, meb, width, kcenter, kslab.
const std::vector<std::string>& protocol_names();

struct ProtocolConfig {
    std::string protocol;
    std::string input;  // input file path
    std::map<std::string, std::string> params;
    std::uint64_t modulus = kMersenne61;
    std::uint64_t seed = 1;
    CheatConfig cheat;

    /// Flat key=value lines, sorted by key (stored in transcript headers).
    std::string params_text() const;
    static std::map<std::string, std::string> parse_params(const std::string& text);
    std::int64_t int_param(const std::string& key, std::int64_t fallback) const;
};

/// Reads the input, observes it with randomness from the seed, then verifies.
/// Throws ParseError / std::invalid_argument on bad inputs.
ProtocolResult run_verifier(const ProtocolConfig& cfg, Endpoint& ep);
/// Reads the input and plays the prover. Returns the verdict text.
std::string run_prover(const ProtocolConfig& cfg, Endpoint& ep);

}  // namespace sipkit
