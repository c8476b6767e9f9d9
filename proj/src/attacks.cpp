#include "pgkex/attacks.hpp"

#include <json.hpp>

#include "pgkex/arith.hpp"
#include "pgkex/oracle.hpp"
#include "pgkex/structure.hpp"

namespace pgkex {

namespace {

Element a2_power(const GroupParams& params, std::uint64_t e) {
  std::vector<Exponent> exps(params.rank(), 0);
  exps[2] = e % params.p_pow_m();
  return Element(params, std::move(exps));
}

// l0 l0' p^2 beta2 mod p^m, or 0 when beta2 is too divisible for l to matter.
std::uint64_t cross_term(const GroupParams& P, std::uint64_t beta2, std::uint64_t Ma, std::uint64_t Mb) {
  std::uint64_t la = 0;
  std::uint64_t lb = 0;
  try {
    la = solve_knapsack_l(Ma, beta2, P);
    lb = solve_knapsack_l(Mb, beta2, P);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Degenerate) return 0;
    throw;
  }
  const std::uint64_t pm = P.p_pow_m();
  std::uint64_t t = arith::mul_mod(la, lb, pm);
  t = arith::mul_mod(t, P.p_squared() % pm, pm);
  return arith::mul_mod(t, beta2, pm);
}

void require_transcript(const Transcript1& t) {
  require_same_group(t.g, t.msg_a);
  require_same_group(t.g, t.msg_b);
  if (is_central(t.g)) throw Error(ErrorKind::NotApplicable, "public element is central");
}

}  // namespace

std::string_view method_name(AttackMethod m) {
  switch (m) {
    case AttackMethod::CenterQuotient: return "CenterQuotient";
    case AttackMethod::KnapsackA: return "KnapsackA";
    case AttackMethod::ScalarKnapsack: return "ScalarKnapsack";
    case AttackMethod::BruteConjugacy: return "BruteConjugacy";
  }
  return "?";
}

AttackReport& certify(AttackReport& report, const Element& truth) {
  const auto* key = std::get_if<Element>(&report.recovered_key);
  report.succeeded = key != nullptr && *key == truth;
  return report;
}

AttackReport& certify(AttackReport& report, std::uint64_t truth) {
  const auto* key = std::get_if<std::uint64_t>(&report.recovered_key);
  report.succeeded = key != nullptr && *key == truth;
  return report;
}

std::string to_json(const AttackReport& report) {
  nlohmann::ordered_json j;
  j["method"] = method_name(report.method);
  j["succeeded"] = report.succeeded;
  if (const auto* key = std::get_if<Element>(&report.recovered_key)) {
    j["recovered_key"] = key->to_string();
  } else {
    j["recovered_key"] = std::get<std::uint64_t>(report.recovered_key);
  }
  return j.dump();
}

AttackReport attack_kex1_B(const Transcript1& t) {
  require_transcript(t);
  const Element g_inv = inverse(t.g);
  const Element z_a = g_inv * t.msg_a;
  const Element z_b = g_inv * t.msg_b;
  if (!in_derived(z_a) || !in_derived(z_b)) {
    throw Error(ErrorKind::NotApplicable, "messages leave the coset g G'");
  }
  return {AttackMethod::CenterQuotient, t.g * z_a * z_b, false};
}

AttackReport attack_kex2_B(const Transcript2& t) {
  require_same_group(t.u1, t.u2);
  require_same_group(t.u1, t.u3);
  const Element z_b = inverse(t.u1) * t.u2;
  if (!in_derived(z_b) || !in_derived(inverse(t.u1) * t.u3)) {
    throw Error(ErrorKind::NotApplicable, "messages leave a common coset of G'");
  }
  return {AttackMethod::CenterQuotient, t.u3 * inverse(z_b), false};
}

std::uint64_t solve_knapsack_l(std::uint64_t M, std::uint64_t beta2, const GroupParams& P) {
  const std::uint64_t p = P.p();
  const unsigned m = P.m();
  beta2 %= P.p_pow_m();
  const unsigned j = arith::valuation(beta2, p, m);
  if (j + 2 > m) throw Error(ErrorKind::Degenerate, "v_p(beta2) > m-2: k beta2 = beta2 mod p^(m-1)");
  const std::uint64_t reduced = M % P.p_pow_m1();  // l p beta2 mod p^(m-1)
  const std::uint64_t shift = *arith::checked_pow(p, 1 + j);
  if (reduced % shift != 0) throw Error(ErrorKind::NotApplicable, "M is not an A-family message difference");
  const std::uint64_t mod = *arith::checked_pow(p, m - 2 - j);
  if (mod == 1) return 0;
  const std::uint64_t unit = beta2 / *arith::checked_pow(p, j);
  const std::uint64_t unit_inv = *arith::inverse_mod(unit % mod, mod);
  return arith::mul_mod((reduced / shift) % mod, unit_inv, mod);
}

AttackReport attack_kex1_A(const Transcript1& t) {
  require_transcript(t);
  for (std::size_t i = 0; i < t.params.rank(); ++i) {
    if (i == 2) continue;
    if (t.msg_a[i] != t.g[i] || t.msg_b[i] != t.g[i]) {
      throw Error(ErrorKind::NotApplicable, "messages differ from g outside the a2 exponent");
    }
  }
  const GroupParams& P = t.params;
  const std::uint64_t pm = P.p_pow_m();
  const std::uint64_t beta2 = t.g[2];
  const std::uint64_t Ea = t.msg_a[2];
  const std::uint64_t Eb = t.msg_b[2];
  std::uint64_t e = arith::sub_mod(arith::add_mod(Ea, Eb, pm), beta2, pm);
  e = arith::add_mod(e, cross_term(P, beta2, arith::sub_mod(Ea, beta2, pm), arith::sub_mod(Eb, beta2, pm)), pm);
  std::vector<Exponent> exps(t.g.exps().begin(), t.g.exps().end());
  exps[2] = e;
  return {AttackMethod::KnapsackA, Element(P, std::move(exps)), false};
}

AttackReport attack_kex1_central(const Transcript1& t) {
  require_transcript(t);
  const GroupParams& P = t.params;
  const Element g_inv = inverse(t.g);
  const Element c_a = g_inv * t.msg_a;
  const Element c_b = g_inv * t.msg_b;
  if (!is_central(c_a) || !is_central(c_b)) {
    throw Error(ErrorKind::NotApplicable, "messages differ from g by a non-central element");
  }
  // B-maps add nothing to the a2 exponent of c, so c_X[2] = l p beta2 + p^(m-1) S.
  const std::uint64_t cross = cross_term(P, t.g[2], c_a[2], c_b[2]);
  return {AttackMethod::KnapsackA, t.g * c_a * c_b * a2_power(P, cross), false};
}

AttackReport attack_scalar(const GroupParams& params, std::uint64_t beta2, std::uint64_t msg_a,
                           std::uint64_t msg_b) {
  const std::uint64_t pm = params.p_pow_m();
  if (beta2 >= pm || msg_a >= pm || msg_b >= pm) throw Error(ErrorKind::RangeViolation, "exponent must be < p^m");
  std::uint64_t e = arith::sub_mod(arith::add_mod(msg_a, msg_b, pm), beta2, pm);
  e = arith::add_mod(e, cross_term(params, beta2, arith::sub_mod(msg_a, beta2, pm), arith::sub_mod(msg_b, beta2, pm)),
                     pm);
  return {AttackMethod::ScalarKnapsack, e, false};
}

AttackReport attack_signature(const Element& alpha, const Element& beta, const Element& probe, Rng& rng) {
  const Element forged_a = oracle::conjugacy_search(alpha, beta);
  AttackReport report{AttackMethod::BruteConjugacy, forged_a, false};
  report.succeeded = verify(alpha, beta, sign(alpha, forged_a, probe, rng));
  return report;
}

}  // namespace pgkex
