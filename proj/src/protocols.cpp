#include "pgkex/protocols.hpp"

#include <json.hpp>
#include <stdexcept>

#include "pgkex/arith.hpp"
#include "pgkex/structure.hpp"

namespace pgkex {

namespace {

void require_noncentral(const Element& g, const char* what) {
  if (is_central(g)) throw Error(ErrorKind::CentralElement, std::string(what) + " is central");
}

template <class T>
const T& done_or_throw(const std::optional<T>& value) {
  if (!value) throw std::logic_error("key requested before the exchange finished");
  return *value;
}

}  // namespace

std::string_view family_name(AutFamily f) {
  switch (f) {
    case AutFamily::A: return "A";
    case AutFamily::B: return "B";
    case AutFamily::AB: return "AB";
  }
  return "?";
}

AutFamily parse_family(std::string_view text) {
  if (text == "A") return AutFamily::A;
  if (text == "B") return AutFamily::B;
  if (text == "AB") return AutFamily::AB;
  throw Error(ErrorKind::ParseError, "family must be A, B or AB");
}

CentralAut sample_family(const GroupParams& params, AutFamily family, Rng& rng) {
  switch (family) {
    case AutFamily::A: return {sample_A(params, rng), AutB::identity(params)};
    case AutFamily::B: return {AutA::identity(params), sample_B(params, rng)};
    case AutFamily::AB: break;
  }
  return sample_central(params, rng);
}

Element sample_element(const GroupParams& params, Rng& rng) {
  std::vector<Exponent> e(params.rank());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = rng.below(params.modulus(i));
  return Element(params, std::move(e));
}

Element sample_noncentral(const GroupParams& params, Rng& rng) {
  while (true) {
    Element g = sample_element(params, rng);
    if (!is_central(g)) return g;
  }
}

// ---------------------------------------------------------------- KEX-I

Element kex1_message(const CentralAut& f, const Element& g) {
  require_noncentral(g, "public element");
  return apply(f, g);
}

Element kex1_key(const CentralAut& f, const Element& peer_msg) {
  if (!(f.params() == peer_msg.params())) {
    throw Error(ErrorKind::ParamMismatch, f.params().to_string() + " vs " + peer_msg.params().to_string());
  }
  return apply(f, peer_msg);
}

Kex1Party::Kex1Party(CentralAut secret, Element g) : secret_(std::move(secret)), g_(std::move(g)) {}

Element Kex1Party::message() {
  if (state_ != State::Ready) throw std::logic_error("message already sent");
  Element msg = kex1_message(secret_, g_);
  state_ = State::Sent;
  return msg;
}

void Kex1Party::receive(const Element& peer_msg) {
  if (state_ != State::Sent) throw std::logic_error("receive before send");
  key_ = kex1_key(secret_, peer_msg);
  state_ = State::Done;
}

const Element& Kex1Party::key() const { return done_or_throw(key_); }

Kex1Run kex1_run(const CentralAut& alice, const CentralAut& bob, const Element& g) {
  Kex1Party a(alice, g);
  Kex1Party b(bob, g);
  const Element msg_a = a.message();
  const Element msg_b = b.message();
  a.receive(msg_b);
  b.receive(msg_a);
  return {{g.params(), g, msg_a, msg_b}, alice, bob, a.key(), b.key()};
}

Kex1Run kex1_run(const GroupParams& params, AutFamily family, Rng& rng) {
  const Element g = sample_noncentral(params, rng);
  const CentralAut alice = sample_family(params, family, rng);
  const CentralAut bob = sample_family(params, family, rng);
  return kex1_run(alice, bob, g);
}

// --------------------------------------------------------------- KEX-II

Kex2Alice::Kex2Alice(Element g, CentralAut phi_a, CentralAut phi_h)
    : g_(std::move(g)), phi_a_(std::move(phi_a)), phi_h_(std::move(phi_h)) {}

Element Kex2Alice::start() {
  if (state_ != State::Ready) throw std::logic_error("already started");
  require_noncentral(g_, "g");
  state_ = State::AwaitReply;
  return apply(phi_a_, g_);
}

Element Kex2Alice::respond(const Element& u2) {
  if (state_ != State::AwaitReply) throw std::logic_error("unexpected reply");
  const Element phi_b_g = apply(invert(phi_a_), u2);
  key_ = apply(phi_h_, g_);
  state_ = State::Done;
  return apply(phi_h_, phi_b_g);
}

const Element& Kex2Alice::key() const { return done_or_throw(key_); }

Kex2Bob::Kex2Bob(CentralAut phi_b) : phi_b_(std::move(phi_b)) {}

Element Kex2Bob::respond(const Element& u1) {
  if (state_ != State::AwaitFirst) throw std::logic_error("unexpected first message");
  state_ = State::AwaitThird;
  return apply(phi_b_, u1);
}

void Kex2Bob::finish(const Element& u3) {
  if (state_ != State::AwaitThird) throw std::logic_error("unexpected third message");
  key_ = apply(invert(phi_b_), u3);
  state_ = State::Done;
}

const Element& Kex2Bob::key() const { return done_or_throw(key_); }

Kex2Run kex2_run(const GroupParams& params, AutFamily family, Rng& rng) {
  const Element g = sample_noncentral(params, rng);
  const CentralAut phi_a = sample_family(params, family, rng);
  const CentralAut phi_b = sample_family(params, family, rng);
  const CentralAut phi_h = sample_family(params, family, rng);
  Kex2Alice alice(g, phi_a, phi_h);
  Kex2Bob bob(phi_b);
  const Element u1 = alice.start();
  const Element u2 = bob.respond(u1);
  const Element u3 = alice.respond(u2);
  bob.finish(u3);
  return {{params, u1, u2, u3}, g, phi_a, phi_b, phi_h, alice.key(), bob.key()};
}

// ------------------------------------------------------------ signature

SigningKey keygen(const GroupParams& params, Rng& rng) {
  const Element alpha = sample_noncentral(params, rng);
  const Element a = sample_element(params, rng);
  return {alpha, inverse(a) * alpha * a, a};
}

Signature sign(const Element& alpha, const Element& a_secret, const Element& x, Rng& rng) {
  require_noncentral(alpha, "alpha");
  require_same_group(alpha, a_secret);
  require_same_group(alpha, x);
  const Element k = sample_element(alpha.params(), rng);
  const Element gamma = k * alpha * inverse(k);
  return {x, x * a_secret * gamma};
}

bool verify(const Element& alpha, const Element& beta, const Signature& sig) {
  require_same_group(alpha, beta);
  return sig.x * alpha * inverse(sig.x) == sig.s * beta * inverse(sig.s);
}

// --------------------------------------------------------------- scalar

ScalarSecret ScalarSecret::make(const GroupParams& params, std::uint64_t k2, std::uint64_t S) {
  if (k2 == 0 || k2 >= params.p_pow_m() || k2 % params.p() != 1 % params.p()) {
    throw Error(ErrorKind::RangeViolation, "k2 must be 1 mod p in [1, p^m)");
  }
  return {k2, S % params.p()};
}

ScalarSecret ScalarSecret::of(const AutA& f, const Element& g) {
  const GroupParams& P = f.params;
  std::uint64_t S = 0;
  for (const auto& [i, ri] : f.r) S = arith::add_mod(S, arith::mul_mod(ri, g[i], P.p()), P.p());
  return make(P, f.k() % P.p_pow_m(), S);
}

std::uint64_t scalar_message(const GroupParams& params, const ScalarSecret& sec, std::uint64_t beta2) {
  if (beta2 >= params.p_pow_m()) throw Error(ErrorKind::RangeViolation, "beta2 must be < p^m");
  const std::uint64_t pm = params.p_pow_m();
  return arith::add_mod(arith::mul_mod(sec.k2, beta2, pm), arith::mul_mod(params.p_pow_m1(), sec.S, pm), pm);
}

std::uint64_t scalar_key(const GroupParams& params, const ScalarSecret& sec, std::uint64_t peer_msg,
                         std::uint64_t beta2) {
  if (beta2 >= params.p_pow_m()) throw Error(ErrorKind::RangeViolation, "beta2 must be < p^m");
  return scalar_message(params, sec, peer_msg);
}

// ----------------------------------------------------------- transcripts

namespace {

using nlohmann::ordered_json;

Element element_field(const ordered_json& elements, const char* name, const GroupParams& params) {
  if (!elements.contains(name) || !elements[name].is_string()) {
    throw Error(ErrorKind::BadJson, std::string("missing element '") + name + "'");
  }
  Element g = Element::parse(elements[name].get<std::string>());
  if (!(g.params() == params)) throw Error(ErrorKind::ParamMismatch, std::string("element '") + name + "'");
  return g;
}

}  // namespace

std::string to_json(const AnyTranscript& t) {
  ordered_json j;
  ordered_json elements;
  const GroupParams* params = nullptr;
  if (const auto* t1 = std::get_if<Transcript1>(&t)) {
    j["protocol"] = "kex1";
    params = &t1->params;
    elements["g"] = t1->g.to_string();
    elements["msg_a"] = t1->msg_a.to_string();
    elements["msg_b"] = t1->msg_b.to_string();
  } else if (const auto* t2 = std::get_if<Transcript2>(&t)) {
    j["protocol"] = "kex2";
    params = &t2->params;
    elements["u1"] = t2->u1.to_string();
    elements["u2"] = t2->u2.to_string();
    elements["u3"] = t2->u3.to_string();
  } else {
    const auto& ts = std::get<SigTranscript>(t);
    j["protocol"] = "sig";
    params = &ts.params;
    elements["alpha"] = ts.alpha.to_string();
    elements["beta"] = ts.beta.to_string();
    elements["x"] = ts.sig.x.to_string();
    elements["s"] = ts.sig.s.to_string();
  }
  j["params"] = {params->p(), params->m(), params->n()};
  j["elements"] = std::move(elements);
  return j.dump(2);
}

AnyTranscript transcript_from_json(std::string_view text) {
  const ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::BadJson, "transcript is not a JSON object");
  try {
    const auto& pv = j.at("params");
    if (!pv.is_array() || pv.size() != 3) throw Error(ErrorKind::BadJson, "params must be [p,m,n]");
    const GroupParams params =
        GroupParams::make(pv[0].get<std::uint64_t>(), pv[1].get<unsigned>(), pv[2].get<unsigned>());
    const auto& el = j.at("elements");
    const std::string protocol = j.at("protocol").get<std::string>();
    if (protocol == "kex1") {
      return Transcript1{params, element_field(el, "g", params), element_field(el, "msg_a", params),
                         element_field(el, "msg_b", params)};
    }
    if (protocol == "kex2") {
      return Transcript2{params, element_field(el, "u1", params), element_field(el, "u2", params),
                         element_field(el, "u3", params)};
    }
    if (protocol == "sig") {
      return SigTranscript{params, element_field(el, "alpha", params), element_field(el, "beta", params),
                           Signature{element_field(el, "x", params), element_field(el, "s", params)}};
    }
    throw Error(ErrorKind::BadJson, "unknown protocol '" + protocol + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadJson, e.what());
  }
}

}  // namespace pgkex
