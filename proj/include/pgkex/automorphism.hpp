#pragma once

// Central automorphisms of G_n(m,p) in the canonical A x B form, plus general
// generator maps for candidate (possibly non-central) automorphisms.
//
// A-family: k = l*p + 1, a1 -> a1, a2 -> a2^k, a_i -> a_i v^{r_i} for i in R,
//           where R is a subset of {0,3,...,n} and v = a2^(p^(m-1)).
// B-family: a1 -> a1, a_i -> a_i z_i with z_i in G' for i in {0,2,...,n}.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pgkex/group.hpp"
#include "pgkex/random.hpp"

namespace pgkex {

struct AutA {
  GroupParams params;
  std::uint64_t l = 0;
  /// Index in {0,3,...,n} -> r_i in (0,p). Absent indices are outside R.
  std::map<std::size_t, std::uint64_t> r;

  /// Validated construction; zero coefficients are dropped. Throws RangeViolation.
  static AutA make(const GroupParams& params, std::uint64_t l, std::map<std::size_t, std::uint64_t> r);
  static AutA identity(const GroupParams& params) { return make(params, 0, {}); }

  std::uint64_t k() const { return l * params.p() + 1; }

  /// `A:l=<int>;r=<i>:<ri>,...`
  std::string to_string() const;
  static AutA parse(const GroupParams& params, std::string_view text);

  friend bool operator==(const AutA&, const AutA&) = default;
};

struct AutB {
  GroupParams params;
  /// Index in {0,2,...,n} -> z_i in G'. Absent indices carry the identity.
  std::map<std::size_t, Element> z;

  /// Validated construction; identity factors are dropped. Throws RangeViolation.
  static AutB make(const GroupParams& params, std::map<std::size_t, Element> z);
  static AutB identity(const GroupParams& params) { return make(params, {}); }

  /// `B:z<i>=<element>,...`
  std::string to_string() const;
  static AutB parse(const GroupParams& params, std::string_view text);

  friend bool operator==(const AutB&, const AutB&) = default;
};

struct CentralAut {
  AutA a_part;
  AutB b_part;

  static CentralAut identity(const GroupParams& params) {
    return {AutA::identity(params), AutB::identity(params)};
  }
  const GroupParams& params() const noexcept { return a_part.params; }

  friend bool operator==(const CentralAut&, const CentralAut&) = default;
};

/// Images of a0..an; only meaningful as a map once is_automorphism holds.
struct GeneratorMap {
  std::vector<Element> images;

  static GeneratorMap identity(const GroupParams& params);
  const GroupParams& params() const { return images.at(0).params(); }
};

/// Parameters of the general candidate automorphism theta:
///   theta(a0) = a0^k0 a_{n-1}^beta v^r z,  theta(a2) = a2^k2 z',
///   theta(a_i) = a_i^{k_i} v^{r_i} z_i (i >= 3),  theta(a1) = a1^{k1},
/// with k_{i+1} = k0 k_i mod p and k1 = k0 k_n mod p.
struct GeneralAutParams {
  std::uint64_t k0 = 1;
  std::uint64_t k2 = 1;
  std::uint64_t beta_n_minus_1 = 0;
  /// v-exponents; key 0 is the `r` of theta(a0), keys >= 3 are the r_i.
  std::map<std::size_t, std::uint64_t> v_exponents;
  /// G' factors keyed by generator index (0, 2, 3, ..., n).
  std::map<std::size_t, Element> derived_factors;
};

/// k_0, k_1, ..., k_n of the recursion (k_2 reduced mod p^m, the rest mod p).
std::vector<std::uint64_t> k_sequence(const GroupParams& params, std::uint64_t k0, std::uint64_t k2);

GeneratorMap generator_images(const AutA& f);
GeneratorMap generator_images(const AutB& f);
GeneratorMap generator_images(const CentralAut& f);

/// Homomorphic extension of the generator images to the collected word of g.
Element apply(const GeneratorMap& map, const Element& g);
Element apply(const AutA& f, const Element& g);
Element apply(const AutB& f, const Element& g);
Element apply(const CentralAut& f, const Element& g);

/// x -> f(g(x)), kept in canonical A x B form.
CentralAut compose(const CentralAut& f, const CentralAut& g);
CentralAut invert(const CentralAut& f);

AutA sample_A(const GroupParams& params, Rng& rng);
AutB sample_B(const GroupParams& params, Rng& rng);
CentralAut sample_central(const GroupParams& params, Rng& rng);

/// Uniform element of G'.
Element sample_derived(const GroupParams& params, Rng& rng);

GeneratorMap general_from_k0(const GroupParams& params, const GeneralAutParams& spec);
GeneratorMap general_from_k0(const GroupParams& params, std::uint64_t k0, std::uint64_t k2);

/// True when every defining relation of G holds on the images.
bool relations_hold(const GeneratorMap& map);

/// Relations hold and the induced n x n matrix on G/Phi(G) is invertible over Z_p.
bool is_automorphism(const GeneratorMap& map);

/// g^-1 theta(g) is central for every generator.
bool is_central_map(const GeneratorMap& map);

/// Rank over Z_p of the Frattini-quotient matrix of the map.
std::size_t frattini_rank(const GeneratorMap& map);

/// A homomorphism G -> Z(G), stored by its generator images.
struct CenterHom {
  std::vector<Element> images;
};

Element evaluate(const CenterHom& h, const Element& g);

/// f -> (g -> g^-1 f(g)).
CenterHom to_hom(const CentralAut& f);

/// Inverse correspondence. Throws NotHomomorphism when the images do not
/// define a homomorphism into Z(G) of the A x B shape, NotAutomorphism when
/// g -> g h(g) is not bijective.
CentralAut from_hom(const CenterHom& h);

/// Canonical form of a central automorphism given by generator images.
CentralAut central_from_map(const GeneratorMap& map);

/// Conjugation g -> h^-1 g h as a B-family element (z_i = [a_i, h]).
AutB inner_as_B(const Element& h);

}  // namespace pgkex
