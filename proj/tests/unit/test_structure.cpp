#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

#include "pgkex/automorphism.hpp"
#include "pgkex/oracle.hpp"
#include "pgkex/protocols.hpp"
#include "pgkex/structure.hpp"
#include "testing.hpp"

namespace pgkex {
namespace {

using testing::kind_of;

const GroupParams P223 = GroupParams::make(2, 2, 3);
const GroupParams P324 = GroupParams::make(3, 2, 4);

Element a(const GroupParams& P, std::size_t i) { return generator(P, i); }
Element a_pow(const GroupParams& P, std::size_t i, std::int64_t e) { return power(generator(P, i), e); }

std::set<Element> as_set(const std::vector<Element>& v) { return {v.begin(), v.end()}; }

TEST(Constants, ValuesForTheFamily) {
  const GroupConstants k = group_constants(P324);
  EXPECT_EQ(k, (GroupConstants{1, 1, 2, 1}));
  const GroupConstants k5 = group_constants(GroupParams::make(3, 5, 4));
  EXPECT_EQ(k5, (GroupConstants{4, 1, 5, 4}));
  EXPECT_GE(k5.c, k5.b);
}

// Exponent of a finite abelian p-group given as an element list: max order.
template <class OrderFn>
std::uint64_t exponent_of(const std::vector<Element>& elems, OrderFn order_fn) {
  std::uint64_t e = 1;
  for (const Element& g : elems) e = std::max(e, order_fn(g));
  return e;
}

TEST(Constants, MatchEnumeratedExponents) {
  for (const GroupParams& P : {P223, P324, GroupParams::make(2, 3, 3)}) {
    SCOPED_TRACE(P.to_string());
    const GroupConstants k = group_constants(P);
    const std::uint64_t p = P.p();
    auto pw = [&](unsigned e) {
      std::uint64_t v = 1;
      for (unsigned i = 0; i < e; ++i) v *= p;
      return v;
    };
    EXPECT_EQ(exponent_of(oracle::enumerate_center(P), oracle::brute_order), pw(k.a));
    EXPECT_EQ(exponent_of(oracle::enumerate_derived(P), oracle::brute_order), pw(k.b));
    // exp(G/G'): least p^c with g^(p^c) in G' for every g.
    const auto derived = as_set(oracle::enumerate_derived(P));
    unsigned c = 0;
    for (const Element& g : oracle::enumerate_group(P)) {
      unsigned t = 0;
      Element x = g;
      while (!derived.count(x)) {
        x = power(x, static_cast<std::int64_t>(p));
        ++t;
      }
      c = std::max(c, t);
    }
    EXPECT_EQ(c, k.c);
  }
}

TEST(Center, DocumentedMembership) {
  EXPECT_TRUE(is_central(a_pow(P324, 2, 3)));
  EXPECT_FALSE(is_central(a(P324, 0)));
  EXPECT_TRUE(is_central(a(P324, 1)));
}

TEST(Derived, DocumentedMembership) {
  EXPECT_TRUE(in_derived(a(P324, 1)));
  EXPECT_FALSE(in_derived(a_pow(P324, 2, 3)));
  EXPECT_TRUE(in_derived(identity(P324)));
}

TEST(Center, MatchesEnumeration) {
  for (const GroupParams& P : {P223, P324, GroupParams::make(2, 3, 3), GroupParams::make(2, 2, 4)}) {
    SCOPED_TRACE(P.to_string());
    const auto center = as_set(oracle::enumerate_center(P));
    const auto derived = as_set(oracle::enumerate_derived(P));
    for (const Element& g : oracle::enumerate_group(P)) {
      EXPECT_EQ(is_central(g), center.count(g) == 1) << g.to_string();
      EXPECT_EQ(in_derived(g), derived.count(g) == 1) << g.to_string();
    }
  }
}

TEST(Parity, DocumentedValues) {
  const Element g = a(P324, 0) * a_pow(P324, 2, 5) * a_pow(P324, 3, 4);
  EXPECT_EQ(parity(g).entries, (std::vector<std::uint64_t>{1, 1, 0}));
  EXPECT_EQ(parity(identity(P324)).entries, (std::vector<std::uint64_t>{0, 0, 0}));
  EXPECT_EQ(parity(a(P324, 2)).entries, (std::vector<std::uint64_t>{0, 0, 0}));
}

TEST(Parity, PreservedByCentralAutomorphisms) {
  Rng rng(21);
  for (const GroupParams& P : {P324, GroupParams::make(3, 3, 5), GroupParams::make(2, 3, 4)}) {
    for (int t = 0; t < 1000; ++t) {
      const CentralAut f = sample_central(P, rng);
      const Element g = sample_element(P, rng);
      ASSERT_EQ(parity(apply(f, g)), parity(g));
    }
  }
}

TEST(Height, DocumentedValues) {
  EXPECT_EQ(height_mod_derived(a_pow(P324, 2, 3)), 1U);
  EXPECT_EQ(height_mod_derived(a(P324, 1)), std::nullopt);
  EXPECT_EQ(height_mod_derived(a(P324, 0)), 0U);
  EXPECT_EQ(kind_of([] { height_mod_derived(a(GroupParams::make(2, 30, 3), 0)); }), ErrorKind::TooLarge);
}

TEST(Height, HigherPowers) {
  const GroupParams P = GroupParams::make(3, 4, 4);
  EXPECT_EQ(height_mod_derived(a_pow(P, 2, 9)), 2U);
  EXPECT_EQ(height_mod_derived(a_pow(P, 2, 27)), 3U);
  EXPECT_EQ(height_mod_derived(a_pow(P, 2, 18)), 2U);
  EXPECT_EQ(height_mod_derived(a_pow(P, 2, 9) * a(P, 3)), 0U);
}

TEST(KAndR, DocumentedMembership) {
  EXPECT_TRUE(in_K(a_pow(P324, 2, 3)));
  EXPECT_TRUE(in_R(a_pow(P324, 2, 3)));
  EXPECT_FALSE(in_K(a(P324, 0)));
  EXPECT_FALSE(in_R(a(P324, 0)));
  EXPECT_TRUE(in_K(a(P324, 1)));
  EXPECT_TRUE(in_R(a(P324, 1)));
}

TEST(KAndR, EqualTheCenter) {
  for (const GroupParams& P : {P223, P324}) {
    for (const Element& g : oracle::enumerate_group(P)) {
      ASSERT_EQ(in_K(g), is_central(g)) << g.to_string();
      ASSERT_EQ(in_R(g), is_central(g)) << g.to_string();
    }
  }
}

TEST(Frattini, DocumentedCoordinates) {
  EXPECT_EQ(frattini_coordinates(a(P324, 0)), (std::vector<std::uint64_t>{1, 0, 0, 0}));
  EXPECT_EQ(frattini_coordinates(a(P324, 1)), (std::vector<std::uint64_t>{0, 0, 0, 0}));
  EXPECT_EQ(frattini_coordinates(a_pow(P324, 2, 3)), (std::vector<std::uint64_t>{0, 0, 0, 0}));
}

TEST(Frattini, KernelIsTheIntersectionOfMaximalSubgroups) {
  for (const GroupParams& P : {P223, P324}) {
    const auto phi = as_set(oracle::frattini_by_maximal_subgroups(P));
    EXPECT_EQ(phi.size() * static_cast<std::size_t>(std::pow(P.p(), P.n())), *P.order());
    for (const Element& g : oracle::enumerate_group(P)) {
      const auto c = frattini_coordinates(g);
      const bool zero = std::all_of(c.begin(), c.end(), [](auto x) { return x == 0; });
      ASSERT_EQ(zero, phi.count(g) == 1) << g.to_string();
    }
  }
}

TEST(Frattini, CoordinatesAreAHomomorphism) {
  Rng rng(22);
  for (int t = 0; t < 2000; ++t) {
    const Element g = sample_element(P324, rng);
    const Element h = sample_element(P324, rng);
    auto cg = frattini_coordinates(g);
    const auto ch = frattini_coordinates(h);
    for (std::size_t i = 0; i < cg.size(); ++i) cg[i] = (cg[i] + ch[i]) % 3;
    ASSERT_EQ(frattini_coordinates(g * h), cg);
  }
}

TEST(DerivedQuotient, SizeAndCosets) {
  const DerivedQuotient q(P324);
  EXPECT_EQ(q.size(), 6561U / 27U);
  Rng rng(23);
  for (int t = 0; t < 500; ++t) {
    const Element g = sample_element(P324, rng);
    const Element d = sample_derived(P324, rng);
    ASSERT_EQ(q.index_of(g), q.index_of(g * d));
  }
}

std::set<Element> closure(const GroupParams& P, const SubgroupGens& s) {
  return as_set(oracle::subgroup_closure(P, s.gens));
}

std::set<Element> intersect(const std::set<Element>& x, const std::set<Element>& y) {
  std::set<Element> out;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::inserter(out, out.end()));
  return out;
}

TEST(CharacteristicSeries, DocumentedIdentities) {
  const GroupParams& P = P324;
  const std::size_t n = P.n();
  const CharacteristicSeries s = characteristic_series(P);
  ASSERT_EQ(s.K.size(), n);
  ASSERT_EQ(s.L.size(), n);
  std::vector<Element> h;
  for (std::size_t i = 1; i <= n; ++i) h.push_back(a(P, i));
  EXPECT_EQ(closure(P, s.K[0]), as_set(oracle::subgroup_closure(P, h)));

  const auto derived = oracle::enumerate_derived(P);
  auto with_derived = [&](std::vector<Element> gens) {
    gens.insert(gens.end(), derived.begin(), derived.end());
    return as_set(oracle::subgroup_closure(P, gens));
  };
  EXPECT_EQ(intersect(closure(P, s.K[n - 2]), closure(P, s.L[0])), with_derived({a(P, 2)}));
  const Element v = v_element(P);
  for (std::size_t i = 3; i <= n; ++i) {
    EXPECT_EQ(intersect(closure(P, s.K[n - i]), closure(P, s.L[i - 2])), with_derived({v, a(P, i)})) << i;
  }
}

TEST(CharacteristicSeries, PreservedByEveryAutomorphismAt223) {
  const GroupParams& P = P223;
  const CharacteristicSeries s = characteristic_series(P);
  std::vector<std::set<Element>> subgroups;
  for (const auto& k : s.K) subgroups.push_back(closure(P, k));
  for (const auto& l : s.L) subgroups.push_back(closure(P, l));
  const auto sweep = oracle::enumerate_all_autos(P);
  ASSERT_EQ(sweep.count, 512U);
  for (const GeneratorMap& f : sweep.automorphisms) {
    for (const auto& sub : subgroups) {
      std::set<Element> image;
      for (const Element& x : sub) image.insert(apply(f, x));
      ASSERT_EQ(image, sub);
    }
  }
}

TEST(Structure, DerivedExponentEqualsCentralQuotientExponent) {
  for (const GroupParams& P : {P223, P324}) {
    const auto center = as_set(oracle::enumerate_center(P));
    std::uint64_t quotient_exp = 1;
    for (const Element& g : oracle::enumerate_group(P)) {
      std::uint64_t e = 1;
      Element x = g;
      while (!center.count(x)) {
        x = power(x, static_cast<std::int64_t>(P.p()));
        e *= P.p();
      }
      quotient_exp = std::max(quotient_exp, e);
    }
    EXPECT_EQ(exponent_of(oracle::enumerate_derived(P), oracle::brute_order), quotient_exp);
    EXPECT_EQ(quotient_exp, P.p());
  }
}

}  // namespace
}  // namespace pgkex
