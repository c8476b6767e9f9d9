#include "pgkex/group.hpp"

#include <charconv>
#include <sstream>

#include "pgkex/arith.hpp"

namespace pgkex {

using arith::add_mod;
using arith::mul_mod;

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::WidthOverflow: return "WidthOverflow";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ParamMismatch: return "ParamMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::CentralElement: return "CentralElement";
    case ErrorKind::NotHomomorphism: return "NotHomomorphism";
    case ErrorKind::NotAutomorphism: return "NotAutomorphism";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NoWitness: return "NoWitness";
    case ErrorKind::FrameTooLarge: return "FrameTooLarge";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::BadJson: return "BadJson";
    case ErrorKind::BadVersion: return "BadVersion";
    case ErrorKind::DigestMismatch: return "DigestMismatch";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

GroupParams GroupParams::make(std::uint64_t p, unsigned m, unsigned n) {
  if (!arith::is_prime(p)) throw Error(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  if (m < 2) throw Error(ErrorKind::RangeViolation, "m must be >= 2");
  if (n < 3) throw Error(ErrorKind::RangeViolation, "n must be >= 3");
  const auto pm = arith::checked_pow(p, m);
  if (!pm) throw Error(ErrorKind::WidthOverflow, "p^m exceeds 2^63 - 1");
  GroupParams params;
  params.p_ = p;
  params.m_ = m;
  params.n_ = n;
  params.pm_ = *pm;
  params.pm1_ = *pm / p;
  params.p2_ = p * p;
  params.order_ = arith::checked_pow(p, params.order_log());
  return params;
}

std::string GroupParams::to_string() const {
  return std::to_string(p_) + "," + std::to_string(m_) + "," + std::to_string(n_);
}

Element::Element(const GroupParams& params) : params_(params), exps_(params.rank(), 0) {}

Element::Element(const GroupParams& params, std::vector<Exponent> exps)
    : params_(params), exps_(std::move(exps)) {
  if (exps_.size() != params_.rank()) {
    throw Error(ErrorKind::RangeViolation, "expected " + std::to_string(params_.rank()) +
                                               " exponents, got " + std::to_string(exps_.size()));
  }
  // Raw exponents of a0 beyond p are not plain residues: a0^p = a_{n-1}^p.
  const std::uint64_t p = params_.p();
  const Exponent carry = exps_[0] / p;
  exps_[0] %= p;
  for (std::size_t i = 1; i < exps_.size(); ++i) exps_[i] %= params_.modulus(i);
  if (carry != 0) {
    const std::size_t k = params_.n() - 1;
    const std::uint64_t mod = params_.modulus(k);
    exps_[k] = add_mod(exps_[k], mul_mod(carry % mod, p, mod), mod);
  }
}

Element::Element(const GroupParams& params, std::initializer_list<Exponent> exps)
    : Element(params, std::vector<Exponent>(exps)) {}

bool Element::is_identity() const noexcept {
  for (Exponent e : exps_) {
    if (e != 0) return false;
  }
  return true;
}

std::string Element::to_string() const {
  std::string out = params_.to_string();
  out += ':';
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(exps_[i]);
  }
  return out;
}

namespace {

std::vector<std::uint64_t> parse_numbers(std::string_view text, std::string_view what) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view tok = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw Error(ErrorKind::ParseError, "bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

Element Element::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::ParseError, "element must look like p,m,n:e0,...,en");
  }
  const auto header = parse_numbers(text.substr(0, colon), "parameters");
  if (header.size() != 3) throw Error(ErrorKind::ParseError, "expected three parameters p,m,n");
  if (header[1] > 64 || header[2] > 4096) throw Error(ErrorKind::RangeViolation, "m or n out of range");
  const GroupParams params =
      GroupParams::make(header[0], static_cast<unsigned>(header[1]), static_cast<unsigned>(header[2]));
  auto exps = parse_numbers(text.substr(colon + 1), "exponents");
  if (exps.size() != params.rank()) {
    throw Error(ErrorKind::ParseError, "expected " + std::to_string(params.rank()) + " exponents");
  }
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] >= params.modulus(i)) {
      throw Error(ErrorKind::RangeViolation, "exponent " + std::to_string(i) + " not collected");
    }
  }
  return Element(params, std::move(exps));
}

Element generator(const GroupParams& params, std::size_t i) {
  if (i > params.n()) {
    throw Error(ErrorKind::IndexOutOfRange, "generator index " + std::to_string(i) + " > n");
  }
  std::vector<Exponent> exps(params.rank(), 0);
  exps[i] = 1;
  return Element(params, std::move(exps));
}

Element identity(const GroupParams& params) { return Element(params); }

void require_same_group(const Element& g, const Element& h) {
  if (!(g.params() == h.params())) {
    throw Error(ErrorKind::ParamMismatch, g.params().to_string() + " vs " + h.params().to_string());
  }
}

namespace {

// Adds y * c(t) to `out`, where c(t) = [t, a0] for a tail t = (t1..tn):
// [a_n, a0] = a1 and [a_i, a0] = a_{i+1}^p for 2 <= i <= n-1 ([a1, a0] = 1).
void add_commutator_with_a0(const GroupParams& P, std::span<const Exponent> tail_src, std::uint64_t y,
                            std::vector<Exponent>& out) {
  const std::uint64_t p = P.p();
  const std::size_t n = P.n();
  out[1] = add_mod(out[1], mul_mod(y, tail_src[n] % p, p), p);
  for (std::size_t i = 3; i <= n; ++i) {
    const std::uint64_t c = p * mul_mod(y, tail_src[i - 1] % p, p);
    out[i] = add_mod(out[i], c, P.p_squared());
  }
}

// Folds a0^p = a_{n-1}^p into the tail.
void add_a0_overflow(const GroupParams& P, std::vector<Exponent>& out) {
  const std::size_t k = P.n() - 1;
  out[k] = add_mod(out[k], P.p(), P.modulus(k));
}

}  // namespace

Element multiply(const Element& g, const Element& h) {
  require_same_group(g, h);
  const GroupParams& P = g.params();
  const std::size_t n = P.n();
  const std::uint64_t x = g[0];
  const std::uint64_t y = h[0];
  // a0^x t a0^y s = a0^(x+y) t [t,a0]^y s, commutators being central.
  std::vector<Exponent> r(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) r[i] = add_mod(g[i], h[i], P.modulus(i));
  if (y != 0) add_commutator_with_a0(P, g.exps(), y, r);
  const std::uint64_t s = x + y;
  r[0] = s % P.p();
  if (s >= P.p()) add_a0_overflow(P, r);
  return Element(P, std::move(r));
}

Element multiply_stepwise(const Element& g, const Element& h) {
  require_same_group(g, h);
  const GroupParams& P = g.params();
  const std::size_t n = P.n();
  std::vector<Exponent> tail(g.exps().begin(), g.exps().end());
  std::uint64_t a0_count = tail[0];
  tail[0] = 0;
  for (std::uint64_t step = 0; step < h[0]; ++step) {
    // t a0 = a0 t [t, a0]
    const std::vector<Exponent> before = tail;
    add_commutator_with_a0(P, before, 1, tail);
    if (++a0_count == P.p()) {
      a0_count = 0;
      add_a0_overflow(P, tail);
    }
  }
  for (std::size_t i = 1; i <= n; ++i) tail[i] = add_mod(tail[i], h[i], P.modulus(i));
  tail[0] = a0_count;
  return Element(P, std::move(tail));
}

Element inverse(const Element& g) {
  const GroupParams& P = g.params();
  const std::size_t n = P.n();
  // (a0^x t)^-1 = t^-1 a0^-x, and a0^-x = a0^(p-x) a_{n-1}^-p.
  std::vector<Exponent> tail_inv(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) tail_inv[i] = arith::neg_mod(g[i], P.modulus(i));
  if (g[0] == 0) return Element(P, std::move(tail_inv));
  std::vector<Exponent> a0_part(n + 1, 0);
  a0_part[0] = P.p() - g[0];
  const std::size_t k = n - 1;
  a0_part[k] = arith::neg_mod(P.p(), P.modulus(k));
  return multiply(Element(P, std::move(tail_inv)), Element(P, std::move(a0_part)));
}

Element power(const Element& g, std::int64_t e) {
  Element base = e < 0 ? inverse(g) : g;
  std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1 : static_cast<std::uint64_t>(e);
  Element result(g.params());
  while (k > 0) {
    if (k & 1U) result = multiply(result, base);
    k >>= 1U;
    if (k) base = multiply(base, base);
  }
  return result;
}

Element commutator(const Element& g, const Element& h) {
  require_same_group(g, h);
  return multiply(multiply(inverse(g), inverse(h)), multiply(g, h));
}

std::uint64_t order(const Element& g) {
  std::uint64_t ord = 1;
  Element x = g;
  while (!x.is_identity()) {
    x = power(x, static_cast<std::int64_t>(g.params().p()));
    ord *= g.params().p();
  }
  return ord;
}

std::size_t ElementHash::operator()(const Element& g) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (Exponent e : g.exps()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace pgkex
