#include "sipkit/transport.hpp"

#include <condition_variable>
#include <deque>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>

namespace sipkit {

namespace {

constexpr char kMagic[4] = {'S', 'I', 'P', '1'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
    std::span<const std::uint8_t> bytes;
    std::size_t& off;

    void need(std::size_t n, const char* what) const {
        if (bytes.size() - off < n) throw DecodeError(off, std::string("truncated ") + what);
    }
    std::uint64_t uint(int width, const char* what) {
        need(static_cast<std::size_t>(width), what);
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[off + i]) << (8 * i);
        off += static_cast<std::size_t>(width);
        return v;
    }
    std::string str(std::size_t n, const char* what) {
        need(n, what);
        std::string s(bytes.begin() + static_cast<std::ptrdiff_t>(off), bytes.begin() + static_cast<std::ptrdiff_t>(off + n));
        off += n;
        return s;
    }
};

bool known_kind(std::uint8_t k) {
    switch (static_cast<PayloadKind>(k)) {
        case PayloadKind::Polynomial:
        case PayloadKind::Challenge:
        case PayloadKind::Claim:
        case PayloadKind::Annotation:
        case PayloadKind::Verdict:
            return true;
    }
    return false;
}

bool element_kind(PayloadKind k) {
    return k == PayloadKind::Polynomial || k == PayloadKind::Challenge || k == PayloadKind::Annotation;
}

class QueueChannel : public Channel {
public:
    struct Queue {
        std::mutex mu;
        std::condition_variable cv;
        std::deque<Frame> frames;
        bool closed = false;
    };

    QueueChannel(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out) : in_(std::move(in)), out_(std::move(out)) {}
    ~QueueChannel() override { close(); }

    void send(const Frame& f) override {
        std::lock_guard lock(out_->mu);
        if (out_->closed) throw TransportError("channel closed");
        out_->frames.push_back(f);
        out_->cv.notify_one();
    }

    Frame recv() override {
        std::unique_lock lock(in_->mu);
        in_->cv.wait(lock, [&] { return !in_->frames.empty() || in_->closed; });
        if (in_->frames.empty()) throw TransportError("peer closed the channel");
        Frame f = std::move(in_->frames.front());
        in_->frames.pop_front();
        return f;
    }

    void close() override {
        for (auto* q : {in_.get(), out_.get()}) {
            std::lock_guard lock(q->mu);
            q->closed = true;
            q->cv.notify_all();
        }
    }

private:
    std::shared_ptr<Queue> in_;
    std::shared_ptr<Queue> out_;
};

}  // namespace

const char* kind_name(PayloadKind kind) {
    switch (kind) {
        case PayloadKind::Polynomial: return "poly";
        case PayloadKind::Challenge: return "challenge";
        case PayloadKind::Claim: return "claim";
        case PayloadKind::Annotation: return "annotation";
        case PayloadKind::Verdict: return "verdict";
    }
    return "unknown";
}

std::vector<std::uint8_t> encode_frame(const Frame& f) {
    std::vector<std::uint8_t> out;
    out.reserve(kFrameHeaderBytes + kFrameMetaBytes + f.payload.size());
    put_u32(out, static_cast<std::uint32_t>(kFrameMetaBytes + f.payload.size()));
    out.push_back(static_cast<std::uint8_t>(f.kind));
    put_u32(out, f.session);
    put_u32(out, f.round);
    out.push_back(static_cast<std::uint8_t>(f.direction));
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes, std::size_t& offset) {
    Reader rd{bytes, offset};
    const std::size_t start = offset;
    const auto len = rd.uint(4, "frame length");
    const auto kind = static_cast<std::uint8_t>(rd.uint(1, "frame kind"));
    if (!known_kind(kind)) throw DecodeError(start + 4, "unknown frame kind " + std::to_string(kind));
    if (len < kFrameMetaBytes) throw DecodeError(start, "frame length too small");
    rd.need(len, "frame body");
    Frame f;
    f.kind = static_cast<PayloadKind>(kind);
    f.session = static_cast<std::uint32_t>(rd.uint(4, "session"));
    f.round = static_cast<std::uint32_t>(rd.uint(4, "round"));
    const auto dir = rd.uint(1, "direction");
    if (dir > 1) throw DecodeError(offset - 1, "bad direction byte");
    f.direction = static_cast<Direction>(dir);
    const auto n = len - kFrameMetaBytes;
    f.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                     bytes.begin() + static_cast<std::ptrdiff_t>(offset + n));
    offset += n;
    return f;
}

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_queue_channel_pair() {
    auto a = std::make_shared<QueueChannel::Queue>();
    auto b = std::make_shared<QueueChannel::Queue>();
    return {std::make_unique<QueueChannel>(a, b), std::make_unique<QueueChannel>(b, a)};
}

std::vector<std::uint8_t> Transcript::serialize() const {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_u16(out, kVersion);
    put_u16(out, static_cast<std::uint16_t>(header.protocol.size()));
    out.insert(out.end(), header.protocol.begin(), header.protocol.end());
    put_u32(out, static_cast<std::uint32_t>(header.params.size()));
    out.insert(out.end(), header.params.begin(), header.params.end());
    put_u64(out, header.modulus);
    put_u64(out, header.seed);
    put_u32(out, static_cast<std::uint32_t>(frames.size()));
    for (const auto& f : frames) {
        auto enc = encode_frame(f);
        out.insert(out.end(), enc.begin(), enc.end());
    }
    return out;
}

Transcript Transcript::parse(std::span<const std::uint8_t> bytes) {
    std::size_t off = 0;
    Reader rd{bytes, off};
    if (bytes.empty()) throw DecodeError(0, "empty transcript");
    if (rd.str(4, "magic") != std::string(kMagic, 4)) throw DecodeError(0, "bad magic (expected SIP1)");
    const auto version = rd.uint(2, "version");
    if (version != kVersion) throw DecodeError(4, "unsupported transcript version " + std::to_string(version));
    Transcript t;
    t.header.protocol = rd.str(rd.uint(2, "protocol length"), "protocol name");
    t.header.params = rd.str(rd.uint(4, "params length"), "params");
    t.header.modulus = rd.uint(8, "modulus");
    t.header.seed = rd.uint(8, "seed");
    const auto count = rd.uint(4, "frame count");
    for (std::uint64_t i = 0; i < count; ++i) t.frames.push_back(decode_frame(bytes, off));
    if (off != bytes.size()) throw DecodeError(off, "trailing bytes after last frame");
    return t;
}

void Transcript::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write transcript " + path);
    auto bytes = serialize();
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Transcript Transcript::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read transcript " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(bytes);
}

ReplayChannel::ReplayChannel(const Transcript& t) {
    for (const auto& f : t.frames) {
        if (f.direction == Direction::ProverToVerifier)
            from_prover_.push_back(f);
        else
            from_verifier_.push_back(f);
    }
}

void ReplayChannel::send(const Frame& f) {
    if (next_out_ >= from_verifier_.size() || !(from_verifier_[next_out_] == f)) diverged_ = true;
    ++next_out_;
}

Frame ReplayChannel::recv() {
    if (next_in_ >= from_prover_.size()) throw TransportError("transcript exhausted");
    return from_prover_[next_in_++];
}

std::string CostReport::to_kv() const {
    std::ostringstream os;
    os << "rounds=" << rounds << "\n"
       << "bits_p2v=" << bits_prover_to_verifier << "\n"
       << "bits_v2p=" << bits_verifier_to_prover << "\n"
       << "elements_p2v=" << elements_prover_to_verifier << "\n"
       << "elements_v2p=" << elements_verifier_to_prover << "\n"
       << "peak_verifier_elements=" << peak_verifier_elements << "\n"
       << "stream_passes=" << stream_passes << "\n";
    return os.str();
}

CostReport cost_from_frames(std::span<const Frame> frames) {
    CostReport c;
    for (const auto& f : frames) {
        if (f.kind == PayloadKind::Verdict) continue;
        const std::uint64_t bits = 8 * f.payload.size();
        const std::uint64_t elems = element_kind(f.kind) ? f.payload.size() / 8 : 0;
        if (f.direction == Direction::ProverToVerifier) {
            ++c.rounds;
            c.bits_prover_to_verifier += bits;
            c.elements_prover_to_verifier += elems;
        } else {
            c.bits_verifier_to_prover += bits;
            c.elements_verifier_to_prover += elems;
        }
    }
    return c;
}

Endpoint::Endpoint(Channel& channel, Role role, std::uint32_t session, PrimeField field)
    : channel_(channel), role_(role), session_(session), field_(field) {}

void Endpoint::account(const Frame& f) {
    frames_.push_back(f);
    if (f.kind == PayloadKind::Verdict) return;
    const std::uint64_t bits = 8 * f.payload.size();
    const std::uint64_t elems = element_kind(f.kind) ? f.payload.size() / 8 : 0;
    if (f.direction == Direction::ProverToVerifier) {
        ++cost_.rounds;
        cost_.bits_prover_to_verifier += bits;
        cost_.elements_prover_to_verifier += elems;
    } else {
        cost_.bits_verifier_to_prover += bits;
        cost_.elements_verifier_to_prover += elems;
    }
}

void Endpoint::send(PayloadKind kind, std::vector<std::uint8_t> payload) {
    Frame f;
    f.session = session_;
    f.round = next_send_round_++;
    f.direction = role_ == Role::Prover ? Direction::ProverToVerifier : Direction::VerifierToProver;
    f.kind = kind;
    f.payload = std::move(payload);
    account(f);
    channel_.send(f);
}

void Endpoint::send_elements(PayloadKind kind, std::span<const FieldElement> xs) { send(kind, encode_elements(xs)); }

Frame Endpoint::recv() {
    Frame f = channel_.recv();
    const Direction expected_dir = role_ == Role::Prover ? Direction::VerifierToProver : Direction::ProverToVerifier;
    if (f.session != session_) throw ProtocolError("frame for session " + std::to_string(f.session));
    if (f.direction != expected_dir) throw ProtocolError("frame travelling in the wrong direction");
    if (f.round != next_recv_round_)
        throw ProtocolError("out-of-order round index " + std::to_string(f.round) + ", expected " +
                            std::to_string(next_recv_round_));
    ++next_recv_round_;
    account(f);
    return f;
}

Frame Endpoint::expect(PayloadKind kind) {
    Frame f = recv();
    if (f.kind == PayloadKind::Verdict && kind != PayloadKind::Verdict)
        throw SessionEnded(std::string(f.payload.begin(), f.payload.end()));
    if (f.kind != kind)
        throw ProtocolError(std::string("expected ") + kind_name(kind) + " frame, got " + kind_name(f.kind));
    return f;
}

std::vector<FieldElement> Endpoint::expect_elements(PayloadKind kind) {
    Frame f = expect(kind);
    return decode_elements(f.payload, field_);
}

void Endpoint::sample_state(std::size_t elements) {
    cost_.peak_verifier_elements = std::max<std::uint64_t>(cost_.peak_verifier_elements, elements);
}

}  // namespace sipkit
