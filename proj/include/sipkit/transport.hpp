#pragma once

#include "sipkit/field.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sipkit {

enum class Direction : std::uint8_t { ProverToVerifier = 0, VerifierToProver = 1 };

enum class PayloadKind : std::uint8_t {
    Polynomial = 1,  // coefficient vector, lowest degree first
    Challenge = 2,   // verifier randomness revealed to the prover
    Claim = 3,       // structured text block
    Annotation = 4,  // concatenated coefficient vectors
    Verdict = 0x7f,  // control: verifier's final decision, not protocol communication
};

const char* kind_name(PayloadKind kind);

struct Frame {
    std::uint32_t session = 0;
    std::uint32_t round = 0;
    Direction direction = Direction::ProverToVerifier;
    PayloadKind kind = PayloadKind::Polynomial;
    std::vector<std::uint8_t> payload;

    bool operator==(const Frame&) const = default;
};

/// Connection loss or a closed channel.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed bytes that violate the session rules (round order, direction, kind).
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed frame or transcript bytes; carries the byte offset of the problem.
class DecodeError : public std::runtime_error {
public:
    DecodeError(std::size_t offset, const std::string& what)
        : std::runtime_error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Wire encoding: u32 LE length of the rest | u8 kind | u32 LE session | u32 LE round | u8 direction | payload.
std::vector<std::uint8_t> encode_frame(const Frame& f);
/// Decodes one frame starting at `offset` and advances it.
Frame decode_frame(std::span<const std::uint8_t> bytes, std::size_t& offset);

inline constexpr std::size_t kFrameHeaderBytes = 5;  // length + kind
inline constexpr std::size_t kFrameMetaBytes = 9;    // session + round + direction

/// Bidirectional, in-order, exactly-once frame delivery.
class Channel {
public:
    virtual ~Channel() = default;
    virtual void send(const Frame& f) = 0;
    /// Blocks until a frame arrives; throws TransportError once the peer is gone.
    virtual Frame recv() = 0;
    virtual void close() = 0;
};

/// Two connected in-process endpoints backed by blocking queues.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_queue_channel_pair();

/// Listening socket on 127.0.0.1 / 0.0.0.0. Port 0 picks a free port.
class TcpListener {
public:
    explicit TcpListener(std::uint16_t port, const std::string& bind_host = "0.0.0.0");
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }
    std::unique_ptr<Channel> accept();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Connects with retries for up to `timeout_ms` (the listener may still be starting).
std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port, int timeout_ms = 5000);

struct TranscriptHeader {
    std::string protocol;
    std::string params;  // key=value lines
    std::uint64_t modulus = 0;
    std::uint64_t seed = 0;

    bool operator==(const TranscriptHeader&) const = default;
};

/// Binary transcript: magic "SIP1", u16 version, header, then encoded frames.
struct Transcript {
    TranscriptHeader header;
    std::vector<Frame> frames;

    std::vector<std::uint8_t> serialize() const;
    /// Throws DecodeError (with byte offset) on malformed input, including empty input.
    static Transcript parse(std::span<const std::uint8_t> bytes);

    void save(const std::string& path) const;
    static Transcript load(const std::string& path);
};

/// Replays recorded prover frames to a verifier. Sends are checked against the
/// recorded verifier frames; divergence is reported via diverged().
class ReplayChannel : public Channel {
public:
    explicit ReplayChannel(const Transcript& t);
    void send(const Frame& f) override;
    Frame recv() override;
    void close() override {}
    bool diverged() const { return diverged_; }

private:
    std::vector<Frame> from_prover_;
    std::vector<Frame> from_verifier_;
    std::size_t next_in_ = 0;
    std::size_t next_out_ = 0;
    bool diverged_ = false;
};

struct CostReport {
    std::uint64_t rounds = 0;  // prover -> verifier protocol messages
    std::uint64_t bits_prover_to_verifier = 0;
    std::uint64_t bits_verifier_to_prover = 0;
    std::uint64_t elements_prover_to_verifier = 0;
    std::uint64_t elements_verifier_to_prover = 0;
    std::uint64_t peak_verifier_elements = 0;
    std::uint64_t stream_passes = 0;

    /// Flat key=value lines.
    std::string to_kv() const;
    bool operator==(const CostReport&) const = default;
};

/// Recomputes the communication part of a CostReport from recorded frames.
CostReport cost_from_frames(std::span<const Frame> frames);

enum class Role { Prover, Verifier };

/// One side of a protocol session: stamps outgoing frames, checks incoming ones,
/// keeps the local transcript and the cost meter.
class Endpoint {
public:
    Endpoint(Channel& channel, Role role, std::uint32_t session, PrimeField field);

    Role role() const { return role_; }
    const PrimeField& field() const { return field_; }
    std::uint32_t session() const { return session_; }
    /// Switches to another session on the same channel; round indices restart at zero.
    void begin_session(std::uint32_t session) {
        session_ = session;
        next_send_round_ = next_recv_round_ = 0;
    }

    void send(PayloadKind kind, std::vector<std::uint8_t> payload);
    void send_elements(PayloadKind kind, std::span<const FieldElement> xs);
    /// Next frame from the peer. Throws ProtocolError on a bad session, direction or round.
    Frame recv();
    /// Like recv() but requires the given kind; a Verdict frame instead raises SessionEnded.
    Frame expect(PayloadKind kind);
    /// Decoded element payload; malformed encodings raise std::invalid_argument.
    std::vector<FieldElement> expect_elements(PayloadKind kind);

    /// Verifier state sampling (field elements held in live protocol state).
    void sample_state(std::size_t elements);
    void set_stream_passes(std::uint64_t passes) { cost_.stream_passes = passes; }

    const CostReport& cost() const { return cost_; }
    const std::vector<Frame>& frames() const { return frames_; }
    Channel& channel() { return channel_; }

private:
    void account(const Frame& f);

    Channel& channel_;
    Role role_;
    std::uint32_t session_;
    PrimeField field_;
    std::uint32_t next_send_round_ = 0;
    std::uint32_t next_recv_round_ = 0;
    CostReport cost_;
    std::vector<Frame> frames_;
};

/// Raised on the prover side when the verifier ends the session early.
class SessionEnded : public std::runtime_error {
public:
    explicit SessionEnded(std::string verdict) : std::runtime_error("session ended: " + verdict), verdict_(std::move(verdict)) {}
    const std::string& verdict() const { return verdict_; }

private:
    std::string verdict_;
};

}  // namespace sipkit
