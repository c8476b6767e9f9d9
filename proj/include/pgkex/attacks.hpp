#pragma once

// Passive attacks on the protocols. Every attack reads public transcript
// data only; `certify` compares the result against a key computed by the
// oracle from the private automorphisms.

#include <cstdint>
#include <string>
#include <variant>

#include "pgkex/group.hpp"
#include "pgkex/protocols.hpp"

namespace pgkex {

enum class AttackMethod { CenterQuotient, KnapsackA, ScalarKnapsack, BruteConjugacy };

std::string_view method_name(AttackMethod m);

struct AttackReport {
  AttackMethod method = AttackMethod::CenterQuotient;
  std::variant<Element, std::uint64_t> recovered_key;
  /// Set only by certify().
  bool succeeded = false;
};

/// succeeded <- (recovered_key == truth).
AttackReport& certify(AttackReport& report, const Element& truth);
AttackReport& certify(AttackReport& report, std::uint64_t truth);

/// {"method":..., "succeeded":..., "recovered_key":...}
std::string to_json(const AttackReport& report);

/// KEX-I with B-family maps: key = g (g^-1 msg_a)(g^-1 msg_b).
/// Throws NotApplicable when a message leaves the coset g G'.
AttackReport attack_kex1_B(const Transcript1& t);

/// KEX-II with B-family maps: key = u3 (u1^-1 u2)^-1. Throws NotApplicable.
AttackReport attack_kex2_B(const Transcript2& t);

/// l mod p^(m-2-j) from M = l p beta2 + p^(m-1) S mod p^m, j = v_p(beta2).
/// Throws Degenerate when j > m-2 and NotApplicable when M is inconsistent.
std::uint64_t solve_knapsack_l(std::uint64_t M, std::uint64_t beta2, const GroupParams& params);

/// KEX-I with A-family maps: the key differs from g only in the a2 exponent
/// E_A + E_B - beta2 + l0 l0' p^2 beta2. Throws NotApplicable.
AttackReport attack_kex1_A(const Transcript1& t);

/// KEX-I with arbitrary central maps: g cA cB a2^(l0 l0' p^2 beta2), with
/// cX = g^-1 msg_X. Throws NotApplicable on a non-central difference.
AttackReport attack_kex1_central(const Transcript1& t);

/// Scalar fast path: the shared a2 exponent from (beta2, E_A, E_B).
AttackReport attack_scalar(const GroupParams& params, std::uint64_t beta2, std::uint64_t msg_a,
                           std::uint64_t msg_b);

/// Conjugator a' with a'^-1 alpha a' = beta by exhaustive search. The
/// report is certified by forging a signature on `probe` that verifies.
/// Throws TooLarge or NoWitness.
AttackReport attack_signature(const Element& alpha, const Element& beta, const Element& probe, Rng& rng);

}  // namespace pgkex
