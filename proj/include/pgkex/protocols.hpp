#pragma once

// Key Exchange Protocols I and II, the conjugacy signature scheme and the
// scalar (a2-exponent only) fast path. Each role is an explicit state
// machine; the *_run helpers drive both roles from one seeded generator.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "pgkex/automorphism.hpp"
#include "pgkex/group.hpp"
#include "pgkex/random.hpp"

namespace pgkex {

enum class AutFamily { A, B, AB };

std::string_view family_name(AutFamily f);
/// "A", "B" or "AB". Throws ParseError.
AutFamily parse_family(std::string_view text);

CentralAut sample_family(const GroupParams& params, AutFamily family, Rng& rng);

Element sample_element(const GroupParams& params, Rng& rng);
Element sample_noncentral(const GroupParams& params, Rng& rng);

// ---------------------------------------------------------------- KEX-I

struct Transcript1 {
  GroupParams params;
  Element g;
  Element msg_a;
  Element msg_b;
};

/// apply(f, g). Throws CentralElement when g is central.
Element kex1_message(const CentralAut& f, const Element& g);

/// apply(f, peer_msg). Throws ParamMismatch.
Element kex1_key(const CentralAut& f, const Element& peer_msg);

class Kex1Party {
 public:
  enum class State { Ready, Sent, Done };

  Kex1Party(CentralAut secret, Element g);

  /// Step 3: the public message. Ready -> Sent.
  Element message();
  /// Step 4: consume the peer's message. Sent -> Done.
  void receive(const Element& peer_msg);

  State state() const noexcept { return state_; }
  /// Throws std::logic_error before Done.
  const Element& key() const;

 private:
  CentralAut secret_;
  Element g_;
  std::optional<Element> key_;
  State state_ = State::Ready;
};

struct Kex1Run {
  Transcript1 transcript;
  CentralAut alice;
  CentralAut bob;
  Element alice_key;
  Element bob_key;
};

Kex1Run kex1_run(const CentralAut& alice, const CentralAut& bob, const Element& g);
Kex1Run kex1_run(const GroupParams& params, AutFamily family, Rng& rng);

// --------------------------------------------------------------- KEX-II

struct Transcript2 {
  GroupParams params;
  Element u1;  // phi_A(g)
  Element u2;  // phi_B(phi_A(g))
  Element u3;  // phi_H(phi_B(g))
};

class Kex2Alice {
 public:
  enum class State { Ready, AwaitReply, Done };

  Kex2Alice(Element g, CentralAut phi_a, CentralAut phi_h);

  /// Step 2: u1 = phi_A(g). Throws CentralElement.
  Element start();
  /// Steps 4-5: recover phi_B(g) from u2 and answer with u3.
  Element respond(const Element& u2);

  State state() const noexcept { return state_; }
  const Element& key() const;

 private:
  Element g_;
  CentralAut phi_a_;
  CentralAut phi_h_;
  std::optional<Element> key_;
  State state_ = State::Ready;
};

class Kex2Bob {
 public:
  enum class State { AwaitFirst, AwaitThird, Done };

  explicit Kex2Bob(CentralAut phi_b);

  /// Step 3: u2 = phi_B(u1).
  Element respond(const Element& u1);
  /// Step 6: key = phi_B^-1(u3).
  void finish(const Element& u3);

  State state() const noexcept { return state_; }
  const Element& key() const;

 private:
  CentralAut phi_b_;
  std::optional<Element> key_;
  State state_ = State::AwaitFirst;
};

struct Kex2Run {
  Transcript2 transcript;
  Element g;
  CentralAut alice;
  CentralAut bob;
  CentralAut hidden;
  Element alice_key;
  Element bob_key;
};

Kex2Run kex2_run(const GroupParams& params, AutFamily family, Rng& rng);

// ------------------------------------------------------------ signature

struct SigningKey {
  Element alpha;
  Element beta;  // a^-1 alpha a
  Element a;
};

struct Signature {
  Element x;
  Element s;  // delta k
};

/// Public alpha (non-central) and secret a.
SigningKey keygen(const GroupParams& params, Rng& rng);

/// s = x a gamma with gamma = k alpha k^-1 for a random k. Throws CentralElement.
Signature sign(const Element& alpha, const Element& a_secret, const Element& x, Rng& rng);

/// x alpha x^-1 == s beta s^-1.
bool verify(const Element& alpha, const Element& beta, const Signature& sig);

// --------------------------------------------------------------- scalar

struct ScalarSecret {
  std::uint64_t k2 = 1;
  std::uint64_t S = 0;

  /// k2 must be 1 mod p in [1, p^m); S is taken mod p. Throws RangeViolation.
  static ScalarSecret make(const GroupParams& params, std::uint64_t k2, std::uint64_t S);
  /// The scalar view of an A-family map acting on g.
  static ScalarSecret of(const AutA& f, const Element& g);
};

/// k2 beta2 + p^(m-1) S mod p^m. Throws RangeViolation.
std::uint64_t scalar_message(const GroupParams& params, const ScalarSecret& sec, std::uint64_t beta2);

/// k2 peer + p^(m-1) S mod p^m. Throws RangeViolation.
std::uint64_t scalar_key(const GroupParams& params, const ScalarSecret& sec, std::uint64_t peer_msg,
                         std::uint64_t beta2);

// ----------------------------------------------------------- transcripts

struct SigTranscript {
  GroupParams params;
  Element alpha;
  Element beta;
  Signature sig;
};

using AnyTranscript = std::variant<Transcript1, Transcript2, SigTranscript>;

/// {"protocol":..., "params":[p,m,n], "elements":{...}}, pretty-printed.
std::string to_json(const AnyTranscript& t);
/// Throws BadJson, ParseError or ParamMismatch.
AnyTranscript transcript_from_json(std::string_view text);

}  // namespace pgkex
