#pragma once

// Exact arithmetic in the class-2 p-group G_n(m,p) presented on generators
// a0, a1, ..., an. Elements are stored as collected words
//   a0^e0 a1^e1 a2^e2 ... an^en
// with e0, e1 in [0,p), e2 in [0,p^m) and ei in [0,p^2) for i >= 3.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgkex/error.hpp"

namespace pgkex {

using Exponent = std::uint64_t;

class GroupParams {
 public:
  /// Validates and caches derived constants. Throws NotPrime, RangeViolation
  /// (m < 2 or n < 3) or WidthOverflow (p^m > 2^63 - 1).
  static GroupParams make(std::uint64_t p, unsigned m, unsigned n);

  std::uint64_t p() const noexcept { return p_; }
  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return n_; }

  std::uint64_t p_pow_m() const noexcept { return pm_; }
  std::uint64_t p_pow_m1() const noexcept { return pm1_; }
  std::uint64_t p_squared() const noexcept { return p2_; }

  /// Number of generators a0..an.
  std::size_t rank() const noexcept { return n_ + 1; }

  /// Order of the generator a_i, which is also the exponent range in the
  /// collected form.
  std::uint64_t modulus(std::size_t i) const noexcept {
    if (i <= 1) return p_;
    if (i == 2) return pm_;
    return p2_;
  }

  /// log_p |G| = m + 2n - 2.
  unsigned order_log() const noexcept { return m_ + 2 * n_ - 2; }

  /// |G| when it fits in 63 bits.
  std::optional<std::uint64_t> order() const noexcept { return order_; }

  std::string to_string() const;

  friend bool operator==(const GroupParams&, const GroupParams&) = default;

 private:
  GroupParams() = default;

  std::uint64_t p_ = 0;
  unsigned m_ = 0;
  unsigned n_ = 0;
  std::uint64_t pm_ = 0;
  std::uint64_t pm1_ = 0;
  std::uint64_t p2_ = 0;
  std::optional<std::uint64_t> order_;
};

class Element {
 public:
  /// Identity of the given group.
  explicit Element(const GroupParams& params);

  /// Builds from raw exponents; values are reduced into the collected ranges
  /// as exponents of the corresponding generators. Throws RangeViolation on a
  /// length mismatch.
  Element(const GroupParams& params, std::vector<Exponent> exps);
  Element(const GroupParams& params, std::initializer_list<Exponent> exps);

  const GroupParams& params() const noexcept { return params_; }
  std::span<const Exponent> exps() const noexcept { return exps_; }
  Exponent operator[](std::size_t i) const { return exps_[i]; }

  bool is_identity() const noexcept;

  /// Canonical text form `p,m,n:e0,e1,...,en`.
  std::string to_string() const;
  static Element parse(std::string_view text);

  friend bool operator==(const Element& a, const Element& b) {
    return a.params_ == b.params_ && a.exps_ == b.exps_;
  }
  friend bool operator<(const Element& a, const Element& b) { return a.exps_ < b.exps_; }

 private:
  GroupParams params_;
  std::vector<Exponent> exps_;
};

/// Unit vector a_i. Throws IndexOutOfRange for i > n.
Element generator(const GroupParams& params, std::size_t i);

Element identity(const GroupParams& params);

/// Collected word of g*h, computed in closed form using that commutators are
/// central. Throws ParamMismatch.
Element multiply(const Element& g, const Element& h);

/// Same product, moving a0 letters leftward one at a time.
Element multiply_stepwise(const Element& g, const Element& h);

Element inverse(const Element& g);

Element power(const Element& g, std::int64_t e);

/// [g,h] = g^-1 h^-1 g h.
Element commutator(const Element& g, const Element& h);

/// Least e >= 1 with g^e = 1 (always a power of p).
std::uint64_t order(const Element& g);

inline Element operator*(const Element& g, const Element& h) { return multiply(g, h); }

void require_same_group(const Element& g, const Element& h);

struct ElementHash {
  std::size_t operator()(const Element& g) const noexcept;
};

}  // namespace pgkex
