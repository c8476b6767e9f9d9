#include <cstdio>
#include <future>
#include <set>

#include <json.hpp>

#include "pgkex/attacks.hpp"
#include "pgkex/oracle.hpp"
#include "pgkex/wire.hpp"
#include "testing.hpp"

namespace pgkex::wire {
namespace {

using namespace std::chrono_literals;
using testing::kind_of;

const GroupParams P324 = GroupParams::make(3, 2, 4);
const GroupParams P334 = GroupParams::make(3, 3, 4);

Bytes frame_of(std::string_view payload) {
  Bytes out;
  const auto n = static_cast<std::uint32_t>(payload.size());
  out = {static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16), static_cast<std::uint8_t>(n >> 8),
         static_cast<std::uint8_t>(n)};
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

TEST(Codec, HelloPayload) {
  const Message hello = Hello::of(P324);
  EXPECT_EQ(payload(hello), R"({"v":1,"type":"hello","params":[3,2,4]})");
  EXPECT_EQ(encode(hello), frame_of(R"({"v":1,"type":"hello","params":[3,2,4]})"));
}

TEST(Codec, RoundTrip) {
  Rng rng(101);
  const std::vector<Message> msgs{Hello::of(P334), ElementMsg::of("public", sample_element(P334, rng)),
                                  ElementMsg::of("bob", sample_element(P324, rng)),
                                  Confirm{key_digest(generator(P324, 0))}};
  for (const Message& m : msgs) {
    const Bytes b = encode(m);
    EXPECT_EQ(decode(b), m);
    EXPECT_EQ(encode(decode(b)), b);
  }
}

TEST(Codec, FramingErrors) {
  const Bytes garbage{0xde, 0xad, 0xbe, 0xef, 0x00};
  EXPECT_EQ(kind_of([&] { decode(garbage); }), ErrorKind::Truncated);
  EXPECT_EQ(kind_of([] { decode(Bytes{0, 0}); }), ErrorKind::Truncated);
  Bytes hello = encode(Hello::of(P324));
  hello.pop_back();
  EXPECT_EQ(kind_of([&] { decode(hello); }), ErrorKind::Truncated);

  Bytes big = frame_of(std::string(kMaxPayload + 1, ' '));
  EXPECT_EQ(kind_of([&] { decode(big); }), ErrorKind::FrameTooLarge);
  EXPECT_EQ(kind_of([] { encode(Confirm{std::string(kMaxPayload, 'a')}); }), ErrorKind::FrameTooLarge);

  EXPECT_EQ(kind_of([] { decode(frame_of("{oops")); }), ErrorKind::BadJson);
  EXPECT_EQ(kind_of([] { decode(frame_of(R"({"v":1,"type":"nope"})")); }), ErrorKind::BadJson);
  EXPECT_EQ(kind_of([] { decode(frame_of(R"({"v":1,"type":"hello"})")); }), ErrorKind::BadJson);
  EXPECT_EQ(kind_of([] { decode(frame_of(R"({"v":2,"type":"hello","params":[3,2,4]})")); }), ErrorKind::BadVersion);
  EXPECT_EQ(kind_of([] { decode(frame_of(R"({"type":"hello","params":[3,2,4]})")); }), ErrorKind::BadVersion);
}

TEST(Codec, ElementRangeCheck) {
  const ElementMsg bad{"alice", {3, 0, 0, 0, 0}};
  EXPECT_EQ(kind_of([&] { bad.to_element(P324); }), ErrorKind::RangeViolation);
  const ElementMsg short_msg{"alice", {1, 0}};
  EXPECT_EQ(kind_of([&] { short_msg.to_element(P324); }), ErrorKind::RangeViolation);
}

TEST(Digest, Fnv1a) {
  // Reference vectors for FNV-1a 64.
  EXPECT_EQ(fnv1a64(""), 14695981039346656037ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  const std::string d = key_digest(generator(P324, 0));
  EXPECT_EQ(d.size(), 16U);
  EXPECT_EQ(d, [] {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64("3,2,4:1,0,0,0,0")));
    return std::string(buf);
  }());
}

struct Pair {
  Session server;
  Session client;
};

Pair loopback(const GroupParams& ps, const GroupParams& pc, std::uint64_t s1, std::uint64_t s2,
              AutFamily fam = AutFamily::A) {
  auto [a, b] = stream_pair();
  auto server = std::async(std::launch::async, [&, sa = std::move(a)]() mutable {
    return run_kex1_server(sa, ps, s1, fam);
  });
  Session client = run_kex1_client(b, pc, s2, fam);
  return {server.get(), std::move(client)};
}

TEST(Session, LoopbackAgreement) {
  const Pair p = loopback(P324, P324, 1, 2);
  EXPECT_EQ(p.server.digest, p.client.digest);
  EXPECT_EQ(p.server.key, p.client.key);
  EXPECT_EQ(p.server.frames.size(), 7U);
  for (AutFamily fam : {AutFamily::A, AutFamily::B, AutFamily::AB}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Pair q = loopback(P334, P334, s, s + 100, fam);
      ASSERT_EQ(q.server.key, q.client.key);
    }
  }
}

TEST(Session, Deterministic) {
  const Pair x = loopback(P334, P334, 5, 6);
  const Pair y = loopback(P334, P334, 5, 6);
  EXPECT_EQ(x.server.frames, y.server.frames);
  EXPECT_EQ(x.client.frames, y.client.frames);
  EXPECT_EQ(x.client.digest, y.client.digest);
  const Pair z = loopback(P334, P334, 5, 7);
  EXPECT_NE(x.client.frames, z.client.frames);
}

TEST(Session, FramesMatchBothSides) {
  const Pair p = loopback(P324, P324, 1, 2);
  ASSERT_EQ(p.server.frames.size(), p.client.frames.size());
  // Both logs hold the same seven frames: hello, hello, public, alice, bob, confirm, confirm.
  std::multiset<Bytes> s(p.server.frames.begin(), p.server.frames.end());
  std::multiset<Bytes> c(p.client.frames.begin(), p.client.frames.end());
  EXPECT_EQ(s, c);
  const Message first = decode(p.client.frames[0]);
  EXPECT_EQ(std::get<Hello>(first), Hello::of(P324));
}

TEST(Session, ParamMismatch) {
  auto [a, b] = stream_pair();
  auto server = std::async(std::launch::async, [&, sa = std::move(a)]() mutable {
    return kind_of([&] { run_kex1_server(sa, P324, 1, AutFamily::A); });
  });
  const ErrorKind client = kind_of([&] { run_kex1_client(b, P334, 2); });
  EXPECT_EQ(server.get(), ErrorKind::ParamMismatch);
  EXPECT_EQ(client, ErrorKind::ParamMismatch);
}

TEST(Session, NoElementFlowsAfterParamMismatch) {
  auto [a, b] = stream_pair();
  auto server = std::async(std::launch::async, [&, sa = std::move(a)]() mutable {
    return kind_of([&] { run_kex1_server(sa, P324, 1, AutFamily::A); });
  });
  send(b, Hello::of(P334));
  const Message reply = receive(b);
  EXPECT_TRUE(std::holds_alternative<Hello>(reply));
  EXPECT_EQ(server.get(), ErrorKind::ParamMismatch);
  // The server has returned without sending anything else.
  EXPECT_EQ(kind_of([&] { receive(b); }), ErrorKind::Truncated);
}

TEST(Session, CorruptedElementGivesDigestMismatch) {
  auto [a, b] = stream_pair();
  TamperStream tampered(b, [](std::size_t index, Bytes& frame) {
    if (index != 1) return;
    ElementMsg m = std::get<ElementMsg>(decode(frame));
    m.exps[1] = (m.exps[1] + 1) % 3;
    frame = encode(m);
  });
  auto server = std::async(std::launch::async, [&, sa = std::move(a)]() mutable {
    return kind_of([&] { run_kex1_server(sa, P324, 1, AutFamily::A); });
  });
  const ErrorKind client = kind_of([&] { run_kex1_client(tampered, P324, 2); });
  EXPECT_EQ(client, ErrorKind::DigestMismatch);
  EXPECT_EQ(server.get(), ErrorKind::DigestMismatch);
}

TEST(Session, GarbageFrameIsRejected) {
  auto [a, b] = stream_pair();
  auto server = std::async(std::launch::async, [&, sa = std::move(a)]() mutable {
    return kind_of([&] { run_kex1_server(sa, P324, 1, AutFamily::A); });
  });
  const Bytes junk = frame_of("not json at all");
  b.write_all(junk);
  EXPECT_EQ(server.get(), ErrorKind::BadJson);
}

TEST(Session, CapturedTranscriptIsBroken) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Pair p = loopback(P334, P334, s, s + 1);
    // Rebuild the transcript from the raw frames alone.
    const auto& f = p.client.frames;
    const Element g = std::get<ElementMsg>(decode(f[2])).to_element(P334);
    const Element ma = std::get<ElementMsg>(decode(f[3])).to_element(P334);
    const Element mb = std::get<ElementMsg>(decode(f[4])).to_element(P334);
    AttackReport r = attack_kex1_A(Transcript1{P334, g, ma, mb});
    ASSERT_TRUE(certify(r, p.server.key).succeeded);
    ASSERT_EQ(key_digest(std::get<Element>(r.recovered_key)), p.client.digest);
  }
}

TEST(Tcp, LoopbackSession) {
  TcpListener listener("127.0.0.1", 0);
  ASSERT_NE(listener.port(), 0);
  auto server = std::async(std::launch::async, [&] {
    FdStream s = listener.accept(5s);
    return run_kex1_server(s, P324, 11, AutFamily::AB);
  });
  FdStream c = connect_tcp("127.0.0.1", listener.port(), 5s);
  const Session client = run_kex1_client(c, P324, 12, AutFamily::AB);
  const Session srv = server.get();
  EXPECT_EQ(client.digest, srv.digest);
}

TEST(Tcp, Timeouts) {
  TcpListener listener("127.0.0.1", 0);
  EXPECT_EQ(kind_of([&] { listener.accept(50ms); }), ErrorKind::Timeout);
  FdStream c = connect_tcp("127.0.0.1", listener.port(), 100ms);
  FdStream s = listener.accept(1s);
  EXPECT_EQ(kind_of([&] { receive(c); }), ErrorKind::Timeout);
}

TEST(Tcp, ConnectionRefused) {
  std::uint16_t port = 0;
  {
    TcpListener l("127.0.0.1", 0);
    port = l.port();
  }
  EXPECT_EQ(kind_of([&] { connect_tcp("127.0.0.1", port, 200ms); }), ErrorKind::IoError);
}

}  // namespace
}  // namespace pgkex::wire
