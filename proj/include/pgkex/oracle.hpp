#pragma once

// Independent ground truth. Nothing here calls the closed-form multiply;
// arithmetic goes through letter-by-letter rewriting of free words, and
// group-theoretic sets are found by exhaustive enumeration.

#include <cstdint>
#include <vector>

#include "pgkex/automorphism.hpp"
#include "pgkex/group.hpp"

namespace pgkex::oracle {

inline constexpr std::uint64_t kEnumerationBound = 1'000'000;
inline constexpr std::uint64_t kCentralCandidateBound = 1'000'000;
inline constexpr std::uint64_t kAutomorphismBudget = 200'000'000;

struct Letter {
  std::size_t gen = 0;
  int sign = 1;  // +1 or -1

  friend bool operator==(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

/// The collected word of g spelled out letter by letter.
Word word_of(const Element& g);

Word concat(const Word& a, const Word& b);

/// Normal form of a free word by single-step rewriting. Each step swaps an
/// adjacent (a_i^{+-1}, a0^{+-1}) pair into (a0^{+-1}, a_i^{+-1}) and appends
/// the central commutator letters at the right end of the word. The number
/// of (non-a0, a0) inversions drops by exactly one per step, which is
/// asserted. Exponents are reduced only once every a0 sits on the left.
Element naive_normalize(const Word& w, const GroupParams& params);

/// g*h through the rewriting path.
Element naive_multiply(const Element& g, const Element& h);

/// Every collected word in lexicographic order. Throws TooLarge when
/// |G| > kEnumerationBound.
std::vector<Element> enumerate_group(const GroupParams& params);

/// Elements commuting with every generator (naive products only).
std::vector<Element> enumerate_center(const GroupParams& params);

/// Subgroup generated by `gens`, by breadth-first closure with naive products.
std::vector<Element> subgroup_closure(const GroupParams& params, const std::vector<Element>& gens);

/// G' as the closure of all commutators of pairs of elements.
std::vector<Element> enumerate_derived(const GroupParams& params);

/// Phi(G) as the intersection of all maximal subgroups, each found as the
/// kernel of a nonzero homomorphism G -> Z_p.
std::vector<Element> frattini_by_maximal_subgroups(const GroupParams& params);

/// Least e >= 1 with g^e = 1, by repeated naive multiplication.
std::uint64_t brute_order(const Element& g);

/// Number of homomorphisms G -> Z(G), by checking every assignment of
/// generator images in the enumerated center.
std::uint64_t count_homs_to_center(const GroupParams& params);

/// All maps a_i -> a_i z (z in Z(G), a1 fixed) that are automorphisms.
/// Throws TooLarge when |Z|^n > kCentralCandidateBound.
std::vector<CentralAut> enumerate_central_autos(const GroupParams& params);

struct AutomorphismSweep {
  std::uint64_t candidates = 0;
  std::uint64_t count = 0;
  std::uint64_t central = 0;
  bool abelian = false;
  std::vector<GeneratorMap> automorphisms;
};

/// Exhaustive search over images of the minimal generating set
/// (a0, a2, ..., an); the image of a1 = [an, a0] is forced. Throws TooLarge
/// when |G|^n exceeds `budget`.
AutomorphismSweep enumerate_all_autos(const GroupParams& params,
                                      std::uint64_t budget = kAutomorphismBudget);

/// Honest KEX-I shared key from both private automorphisms.
Element dh_oracle(const CentralAut& alice, const CentralAut& bob, const Element& g);

/// First enumerated x with x^-1 alpha x = beta. Throws NoWitness or TooLarge.
Element conjugacy_search(const Element& alpha, const Element& beta);

}  // namespace pgkex::oracle
