#pragma once

// Subgroup structure of G_n(m,p): center, derived subgroup, Frattini
// quotient, parity, heights in G/G', and the R / K subgroups.

#include <cstdint>
#include <optional>
#include <vector>

#include "pgkex/group.hpp"

namespace pgkex {

/// Exponents (as powers of p) of Z(G), G' and G/G', and d = min(a, c).
struct GroupConstants {
  unsigned a = 0;
  unsigned b = 0;
  unsigned c = 0;
  unsigned d = 0;

  friend bool operator==(const GroupConstants&, const GroupConstants&) = default;
};

GroupConstants group_constants(const GroupParams& params);

/// (e0, e3, e4, ..., en) mod p.
struct ParityVector {
  std::vector<std::uint64_t> entries;

  friend bool operator==(const ParityVector&, const ParityVector&) = default;
};

/// Membership in Z(G) = <a2^p> x G'.
bool is_central(const Element& g);

/// Membership in G' = <a1, a3^p, ..., an^p>.
bool in_derived(const Element& g);

ParityVector parity(const Element& g);

/// Image in G/Phi(G) = Z_p^n, coordinates on (a0, a2, a3, ..., an).
std::vector<std::uint64_t> frattini_coordinates(const Element& g);

/// Height of gG' in the abelian group G/G'; std::nullopt stands for an
/// infinite height (g in G'). Enumerates the quotient: throws TooLarge when
/// |G/G'| exceeds kQuotientBound.
std::optional<unsigned> height_mod_derived(const Element& g);

inline constexpr std::uint64_t kQuotientBound = 1'000'000;

/// K = { central g : height(gG') >= b }. Throws TooLarge like height_mod_derived.
bool in_K(const Element& g);

/// R = { central g : |g| <= p^d }.
bool in_R(const Element& g);

/// The abelian quotient G/G' as an explicit table of coset representatives.
/// Representatives have e1 = 0 and e_i < p for i >= 3.
class DerivedQuotient {
 public:
  explicit DerivedQuotient(const GroupParams& params);

  std::size_t size() const noexcept { return reps_.size(); }
  const std::vector<Element>& representatives() const noexcept { return reps_; }

  /// Index of the coset gG'.
  std::size_t index_of(const Element& g) const;

  /// Height of the coset with the given index; std::nullopt when it is the
  /// identity coset.
  std::optional<unsigned> height(std::size_t coset) const;

 private:
  GroupParams params_;
  std::vector<Element> reps_;
  std::vector<unsigned> height_;  // UINT_MAX for the identity coset
};

/// A subgroup given by generators.
struct SubgroupGens {
  std::vector<Element> gens;
};

struct CharacteristicSeries {
  std::vector<SubgroupGens> K;  // K_0 .. K_{n-1}
  std::vector<SubgroupGens> L;  // L_0 .. L_{n-1}
};

/// Closed-form generator lists of the two characteristic series, with
/// v = a2^(p^(m-1)).
CharacteristicSeries characteristic_series(const GroupParams& params);

/// v = a2^(p^(m-1)).
Element v_element(const GroupParams& params);

}  // namespace pgkex
