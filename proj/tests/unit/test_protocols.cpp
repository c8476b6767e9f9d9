#include <stdexcept>

#include "pgkex/protocols.hpp"
#include "pgkex/structure.hpp"
#include "testing.hpp"

namespace pgkex {
namespace {

using testing::kind_of;

const GroupParams P324 = GroupParams::make(3, 2, 4);
const GroupParams P334 = GroupParams::make(3, 3, 4);

Element a(const GroupParams& P, std::size_t i) { return generator(P, i); }

TEST(Kex1, DocumentedMessages) {
  Rng rng(61);
  const Element g = sample_noncentral(P324, rng);
  EXPECT_EQ(kex1_message(CentralAut::identity(P324), g), g);
  const CentralAut f{AutA::make(P324, 1, {}), AutB::identity(P324)};
  EXPECT_EQ(kex1_message(f, a(P324, 2)), power(a(P324, 2), 4));
  EXPECT_EQ(kind_of([&] { kex1_message(f, a(P324, 1)); }), ErrorKind::CentralElement);
  EXPECT_EQ(kind_of([&] { kex1_key(f, a(P334, 0)); }), ErrorKind::ParamMismatch);
}

TEST(Kex1, IdentityKeysEqualG) {
  Rng rng(62);
  const Element g = sample_noncentral(P324, rng);
  const Kex1Run run = kex1_run(CentralAut::identity(P324), CentralAut::identity(P324), g);
  EXPECT_EQ(run.alice_key, g);
  EXPECT_EQ(run.bob_key, g);
}

TEST(Kex1, AgreementAndParity) {
  Rng rng(63);
  for (const GroupParams& P : {P324, P334, GroupParams::make(2, 3, 4), GroupParams::make(7, 4, 6)}) {
    for (AutFamily fam : {AutFamily::A, AutFamily::B, AutFamily::AB}) {
      for (int t = 0; t < 300; ++t) {
        const Kex1Run run = kex1_run(P, fam, rng);
        const Transcript1& tr = run.transcript;
        ASSERT_FALSE(is_central(tr.g));
        ASSERT_EQ(run.alice_key, run.bob_key);
        ASSERT_EQ(run.alice_key, apply(run.alice, apply(run.bob, tr.g)));
        ASSERT_EQ(parity(tr.msg_a), parity(tr.g));
        ASSERT_EQ(parity(tr.msg_b), parity(tr.g));
        ASSERT_EQ(parity(run.alice_key), parity(tr.g));
      }
    }
  }
}

TEST(Kex1, SeededRunsAreReproducible) {
  Rng r1(64), r2(64);
  const Kex1Run x = kex1_run(P334, AutFamily::AB, r1);
  const Kex1Run y = kex1_run(P334, AutFamily::AB, r2);
  EXPECT_EQ(x.transcript.g, y.transcript.g);
  EXPECT_EQ(x.transcript.msg_a, y.transcript.msg_a);
  EXPECT_EQ(x.alice_key, y.alice_key);
}

TEST(Kex1, PartyStateMachine) {
  Rng rng(65);
  const Element g = sample_noncentral(P324, rng);
  Kex1Party alice(sample_central(P324, rng), g);
  Kex1Party bob(sample_central(P324, rng), g);
  EXPECT_EQ(alice.state(), Kex1Party::State::Ready);
  EXPECT_THROW(alice.key(), std::logic_error);
  EXPECT_THROW(alice.receive(g), std::logic_error);
  const Element ma = alice.message();
  const Element mb = bob.message();
  EXPECT_EQ(alice.state(), Kex1Party::State::Sent);
  EXPECT_THROW(alice.message(), std::logic_error);
  alice.receive(mb);
  bob.receive(ma);
  EXPECT_EQ(alice.state(), Kex1Party::State::Done);
  EXPECT_EQ(alice.key(), bob.key());
}

TEST(Kex2, IdentityRunAndAgreement) {
  Rng rng(66);
  const Element g = sample_noncentral(P324, rng);
  const CentralAut id = CentralAut::identity(P324);
  Kex2Alice alice(g, id, id);
  Kex2Bob bob(id);
  const Element u1 = alice.start();
  const Element u2 = bob.respond(u1);
  const Element u3 = alice.respond(u2);
  bob.finish(u3);
  EXPECT_EQ(alice.key(), g);
  EXPECT_EQ(bob.key(), g);
  EXPECT_EQ(bob.state(), Kex2Bob::State::Done);

  for (const GroupParams& P : {P324, P334, GroupParams::make(2, 2, 5)}) {
    for (AutFamily fam : {AutFamily::A, AutFamily::B, AutFamily::AB}) {
      for (int t = 0; t < 300; ++t) {
        const Kex2Run run = kex2_run(P, fam, rng);
        const Transcript2& tr = run.transcript;
        ASSERT_EQ(run.alice_key, run.bob_key);
        ASSERT_EQ(run.bob_key, apply(run.hidden, run.g));
        ASSERT_EQ(tr.u1, apply(run.alice, run.g));
        ASSERT_EQ(tr.u2, apply(run.bob, tr.u1));
        ASSERT_EQ(tr.u3, apply(run.hidden, apply(run.bob, run.g)));
        ASSERT_EQ(parity(tr.u1), parity(tr.u2));
        ASSERT_EQ(parity(tr.u2), parity(tr.u3));
      }
    }
  }
}

TEST(Kex2, OutOfOrderCallsThrow) {
  Kex2Bob bob(CentralAut::identity(P324));
  EXPECT_THROW(bob.finish(a(P324, 0)), std::logic_error);
  EXPECT_THROW(bob.key(), std::logic_error);
}

TEST(Signature, IdentitySecret) {
  Rng rng(67);
  const Element alpha = sample_noncentral(P324, rng);
  const Signature sig = sign(alpha, identity(P324), a(P324, 3), rng);
  EXPECT_TRUE(verify(alpha, alpha, sig));
  EXPECT_EQ(kind_of([&] { sign(a(P324, 1), identity(P324), a(P324, 0), rng); }), ErrorKind::CentralElement);
}

TEST(Signature, HonestSignaturesVerify) {
  Rng rng(68);
  for (const GroupParams& P : {P324, P334, GroupParams::make(2, 2, 3)}) {
    for (int t = 0; t < 1000; ++t) {
      const SigningKey key = keygen(P, rng);
      ASSERT_EQ(key.beta, inverse(key.a) * key.alpha * key.a);
      const Element x = sample_element(P, rng);
      ASSERT_TRUE(verify(key.alpha, key.beta, sign(key.alpha, key.a, x, rng)));
    }
  }
}

TEST(Signature, FreshRandomnessPerSignature) {
  Rng rng(69);
  const SigningKey key = keygen(P334, rng);
  const Element x = sample_element(P334, rng);
  int distinct = 0;
  for (int t = 0; t < 50; ++t) {
    if (!(sign(key.alpha, key.a, x, rng).s == sign(key.alpha, key.a, x, rng).s)) ++distinct;
  }
  EXPECT_GT(distinct, 25);
}

TEST(Signature, TamperingIsDetected) {
  Rng rng(70);
  int x_checked = 0, s_rejected = 0, s_total = 0;
  for (int t = 0; t < 1000; ++t) {
    const SigningKey key = keygen(P324, rng);
    const Signature sig = sign(key.alpha, key.a, sample_element(P324, rng), rng);
    // x a0 alpha a0^-1 x^-1 equals x alpha x^-1 iff a0 commutes with alpha.
    const bool a0_commutes = commutator(a(P324, 0), key.alpha).is_identity();
    const Signature bad_x{sig.x * a(P324, 0), sig.s};
    ASSERT_EQ(verify(key.alpha, key.beta, bad_x), a0_commutes);
    if (!a0_commutes) ++x_checked;
    const Element d = sample_element(P324, rng);
    if (d.is_identity()) continue;
    const Signature bad_s{sig.x, sig.s * d};
    const bool ok = verify(key.alpha, key.beta, bad_s);
    ASSERT_EQ(ok, commutator(d, key.beta).is_identity());
    ++s_total;
    if (!ok) ++s_rejected;
  }
  EXPECT_GT(x_checked, 500);
  EXPECT_GT(s_rejected * 10, s_total * 6);
}

TEST(Scalar, DocumentedValues) {
  const ScalarSecret sec = ScalarSecret::make(P334, 7, 4);
  EXPECT_EQ(sec.S, 1U);
  EXPECT_EQ(scalar_message(P334, sec, 2), 23U);
  // (14 + 9*4) mod 27, computed directly.
  EXPECT_EQ((7 * 2 + 9 * 4) % 27, 23);
  const ScalarSecret id = ScalarSecret::make(P334, 1, 0);
  EXPECT_EQ(scalar_message(P334, id, 5), 5U);
  EXPECT_EQ(scalar_key(P334, id, scalar_message(P334, id, 5), 5), 5U);
  EXPECT_EQ(kind_of([&] { scalar_message(P334, id, 27); }), ErrorKind::RangeViolation);
  EXPECT_EQ(kind_of([&] { ScalarSecret::make(P334, 2, 0); }), ErrorKind::RangeViolation);
  EXPECT_EQ(kind_of([&] { ScalarSecret::make(P334, 28, 0); }), ErrorKind::RangeViolation);
}

TEST(Scalar, RolesAgree) {
  Rng rng(71);
  for (int t = 0; t < 1000; ++t) {
    const std::uint64_t pm = P334.p_pow_m();
    const ScalarSecret x = ScalarSecret::make(P334, 1 + 3 * rng.below(9), rng.below(3));
    const ScalarSecret y = ScalarSecret::make(P334, 1 + 3 * rng.below(9), rng.below(3));
    const std::uint64_t b2 = rng.below(pm);
    const std::uint64_t kx = scalar_key(P334, x, scalar_message(P334, y, b2), b2);
    ASSERT_EQ(kx, scalar_key(P334, y, scalar_message(P334, x, b2), b2));
    ASSERT_EQ(kx, (x.k2 * y.k2 * b2 + 9 * (x.S + y.S)) % pm);
  }
}

TEST(Scalar, MatchesGroupMode) {
  Rng rng(72);
  for (const GroupParams& P : {P334, P324, GroupParams::make(5, 4, 5)}) {
    for (int t = 0; t < 1000; ++t) {
      const Kex1Run run = kex1_run(P, AutFamily::A, rng);
      const Element& g = run.transcript.g;
      const ScalarSecret sa = ScalarSecret::of(run.alice.a_part, g);
      const ScalarSecret sb = ScalarSecret::of(run.bob.a_part, g);
      ASSERT_EQ(scalar_message(P, sa, g[2]), run.transcript.msg_a[2]);
      const std::uint64_t key = scalar_key(P, sa, scalar_message(P, sb, g[2]), g[2]);
      ASSERT_EQ(key, run.alice_key[2]);
      for (std::size_t i = 0; i < P.rank(); ++i) {
        if (i != 2) ASSERT_EQ(run.alice_key[i], g[i]);
      }
    }
  }
}

TEST(TranscriptJson, RoundTrip) {
  Rng rng(73);
  const Kex1Run r1 = kex1_run(P324, AutFamily::AB, rng);
  const auto back1 = std::get<Transcript1>(transcript_from_json(to_json(r1.transcript)));
  EXPECT_EQ(back1.g, r1.transcript.g);
  EXPECT_EQ(back1.msg_b, r1.transcript.msg_b);

  const Kex2Run r2 = kex2_run(P334, AutFamily::B, rng);
  const auto back2 = std::get<Transcript2>(transcript_from_json(to_json(r2.transcript)));
  EXPECT_EQ(back2.u3, r2.transcript.u3);

  const SigningKey key = keygen(P324, rng);
  const SigTranscript st{P324, key.alpha, key.beta, sign(key.alpha, key.a, a(P324, 0), rng)};
  const auto back3 = std::get<SigTranscript>(transcript_from_json(to_json(st)));
  EXPECT_EQ(back3.sig.s, st.sig.s);
  EXPECT_TRUE(verify(back3.alpha, back3.beta, back3.sig));

  const std::string text = to_json(r1.transcript);
  EXPECT_NE(text.find("\"protocol\": \"kex1\""), std::string::npos);
  EXPECT_NE(text.find("\"params\""), std::string::npos);
}

TEST(TranscriptJson, Errors) {
  EXPECT_EQ(kind_of([] { transcript_from_json("{not json"); }), ErrorKind::BadJson);
  EXPECT_EQ(kind_of([] { transcript_from_json(R"({"protocol":"kex9","params":[3,2,4],"elements":{}})"); }),
            ErrorKind::BadJson);
  EXPECT_EQ(kind_of([] {
              transcript_from_json(
                  R"({"protocol":"kex1","params":[3,2,4],"elements":{"g":"3,2,4:1,0,0,0,0","msg_a":"3,2,4:1,0,0,0,0","msg_b":"3,3,4:1,0,0,0,0"}})");
            }),
            ErrorKind::ParamMismatch);
}

TEST(Families, Names) {
  EXPECT_EQ(parse_family("AB"), AutFamily::AB);
  EXPECT_EQ(family_name(AutFamily::B), "B");
  EXPECT_EQ(kind_of([] { parse_family("C"); }), ErrorKind::ParseError);
}

}  // namespace
}  // namespace pgkex
