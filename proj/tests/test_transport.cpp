#include "sipkit/runner.hpp"
#include "sipkit/sumcheck.hpp"
#include "sipkit/transport.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace sipkit;

namespace {

Frame poly_frame(const PrimeField& f, std::uint32_t round) {
    std::vector<FieldElement> c = {f.from_uint(3), f.from_uint(4), f.from_uint(5)};
    Frame fr;
    fr.session = 7;
    fr.round = round;
    fr.direction = Direction::ProverToVerifier;
    fr.kind = PayloadKind::Polynomial;
    fr.payload = encode_elements(c);
    return fr;
}

}  // namespace

TEST(Transport, FrameRoundTrip) {
    PrimeField f(101);
    auto fr = poly_frame(f, 2);
    auto bytes = encode_frame(fr);
    ASSERT_EQ(bytes.size(), kFrameHeaderBytes + kFrameMetaBytes + 24);
    EXPECT_EQ(bytes[0], kFrameMetaBytes + 24);  // little-endian length of the rest
    EXPECT_EQ(bytes[4], 1);                     // kind
    std::size_t off = 0;
    auto back = decode_frame(bytes, off);
    EXPECT_EQ(off, bytes.size());
    EXPECT_EQ(back, fr);
    EXPECT_EQ(decode_elements(back.payload, f).size(), 3u);
}

TEST(Transport, DecodeErrorsCarryOffsets) {
    PrimeField f(101);
    auto bytes = encode_frame(poly_frame(f, 0));
    bytes.resize(bytes.size() - 1);
    std::size_t off = 0;
    EXPECT_THROW(decode_frame(bytes, off), DecodeError);
    auto bad = encode_frame(poly_frame(f, 0));
    bad[4] = 0x55;
    off = 0;
    try {
        decode_frame(bad, off);
        FAIL();
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.offset(), 4u);
    }
}

TEST(Transport, QueueChannelAndRoundOrder) {
    PrimeField f(101);
    auto [a, b] = make_queue_channel_pair();
    Endpoint prover(*a, Role::Prover, 7, f);
    Endpoint verifier(*b, Role::Verifier, 7, f);
    std::vector<FieldElement> c = {f.from_uint(3), f.from_uint(4), f.from_uint(5)};
    prover.send_elements(PayloadKind::Polynomial, c);
    EXPECT_EQ(verifier.expect_elements(PayloadKind::Polynomial), c);

    // a frame that skips a round index
    a->send(poly_frame(f, 5));
    EXPECT_THROW(verifier.recv(), ProtocolError);
}

TEST(Transport, WrongSessionOrDirection) {
    PrimeField f(101);
    auto [a, b] = make_queue_channel_pair();
    Endpoint verifier(*b, Role::Verifier, 1, f);
    a->send(poly_frame(f, 0));  // session 7
    EXPECT_THROW(verifier.recv(), ProtocolError);
    Endpoint v2(*b, Role::Verifier, 7, f);
    auto fr = poly_frame(f, 0);
    fr.direction = Direction::VerifierToProver;
    a->send(fr);
    EXPECT_THROW(v2.recv(), ProtocolError);
}

TEST(Transport, ClosedChannelIsTransportError) {
    auto [a, b] = make_queue_channel_pair();
    a->close();
    EXPECT_THROW(b->recv(), TransportError);
}

TEST(Transport, TranscriptRoundTripAndErrors) {
    PrimeField f(101);
    Transcript t;
    t.header = {"fk", "h=x^2\nu=4\n", 101, 99};
    t.frames = {poly_frame(f, 0), poly_frame(f, 1)};
    auto bytes = t.serialize();
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SIP1");
    auto back = Transcript::parse(bytes);
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.frames, t.frames);

    EXPECT_THROW(Transcript::parse({}), DecodeError);
    auto bad = bytes;
    bad[0] = 'X';
    EXPECT_THROW(Transcript::parse(bad), DecodeError);
    auto trunc = bytes;
    trunc.resize(trunc.size() - 3);
    try {
        Transcript::parse(trunc);
        FAIL();
    } catch (const DecodeError& e) {
        EXPECT_GT(e.offset(), 4u);
    }
}

TEST(Transport, CostFromFramesMatchesEndpointMeter) {
    PrimeField f(101);
    auto [a, b] = make_queue_channel_pair();
    Endpoint p(*a, Role::Prover, 0, f);
    Endpoint v(*b, Role::Verifier, 0, f);
    std::vector<FieldElement> c = {f.one(), f.one()};
    p.send_elements(PayloadKind::Polynomial, c);
    v.expect(PayloadKind::Polynomial);
    v.send_elements(PayloadKind::Challenge, std::span(c).first(1));
    v.send(PayloadKind::Verdict, verdict_payload(true, ""));
    auto cost = cost_from_frames(v.frames());
    EXPECT_EQ(cost.rounds, 1u);
    EXPECT_EQ(cost.elements_prover_to_verifier, 2u);
    EXPECT_EQ(cost.elements_verifier_to_prover, 1u);
    EXPECT_EQ(cost.bits_prover_to_verifier, 128u);
    EXPECT_EQ(cost.bits_verifier_to_prover, 64u);
    EXPECT_EQ(cost, v.cost());
    EXPECT_NE(cost.to_kv().find("rounds=1\n"), std::string::npos);
}

TEST(Transport, TcpEchoTenThousandFrames) {
    PrimeField f;
    TcpListener listener(0, "127.0.0.1");
    const int n = 10000;
    std::thread echo([&] {
        auto ch = listener.accept();
        for (int i = 0; i < n; ++i) ch->send(ch->recv());
    });
    auto ch = tcp_connect("127.0.0.1", listener.port());
    std::thread sender([&] {
        for (int i = 0; i < n; ++i) {
            Frame fr;
            fr.round = static_cast<std::uint32_t>(i);
            fr.kind = PayloadKind::Annotation;
            std::vector<FieldElement> xs = {f.from_uint(static_cast<std::uint64_t>(i) * 977)};
            fr.payload = encode_elements(xs);
            ch->send(fr);
        }
    });
    int ok = 0;
    for (int i = 0; i < n; ++i) {
        Frame fr = ch->recv();
        ok += fr.round == static_cast<std::uint32_t>(i) &&
              decode_elements(fr.payload, f)[0] == f.from_uint(static_cast<std::uint64_t>(i) * 977);
    }
    sender.join();
    echo.join();
    EXPECT_EQ(ok, n);
}

TEST(Transport, TcpPeerLossIsTransportError) {
    TcpListener listener(0, "127.0.0.1");
    std::thread t([&] { listener.accept()->close(); });
    auto ch = tcp_connect("127.0.0.1", listener.port());
    t.join();
    EXPECT_THROW(ch->recv(), TransportError);
}

TEST(Transport, ReplayFeedsProverFrames) {
    PrimeField f(101);
    Transcript t;
    t.frames = {poly_frame(f, 0)};
    ReplayChannel rc(t);
    EXPECT_EQ(rc.recv(), t.frames[0]);
    EXPECT_THROW(rc.recv(), TransportError);
    rc.send(poly_frame(f, 0));
    EXPECT_TRUE(rc.diverged());
}
