#include "pgkex/structure.hpp"

#include <algorithm>
#include <climits>

namespace pgkex {

GroupConstants group_constants(const GroupParams& params) {
  const unsigned m = params.m();
  GroupConstants k;
  k.a = m - 1;
  k.b = 1;
  k.c = m;
  k.d = std::min(k.a, k.c);
  return k;
}

bool is_central(const Element& g) {
  const GroupParams& P = g.params();
  if (g[0] != 0 || g[2] % P.p() != 0) return false;
  for (std::size_t i = 3; i <= P.n(); ++i) {
    if (g[i] % P.p() != 0) return false;
  }
  return true;
}

bool in_derived(const Element& g) {
  const GroupParams& P = g.params();
  if (g[0] != 0 || g[2] != 0) return false;
  for (std::size_t i = 3; i <= P.n(); ++i) {
    if (g[i] % P.p() != 0) return false;
  }
  return true;
}

ParityVector parity(const Element& g) {
  const GroupParams& P = g.params();
  ParityVector v;
  v.entries.push_back(g[0] % P.p());
  for (std::size_t i = 3; i <= P.n(); ++i) v.entries.push_back(g[i] % P.p());
  return v;
}

std::vector<std::uint64_t> frattini_coordinates(const Element& g) {
  const GroupParams& P = g.params();
  std::vector<std::uint64_t> out;
  out.reserve(P.n());
  out.push_back(g[0] % P.p());
  for (std::size_t i = 2; i <= P.n(); ++i) out.push_back(g[i] % P.p());
  return out;
}

Element v_element(const GroupParams& params) {
  std::vector<Exponent> e(params.rank(), 0);
  e[2] = params.p_pow_m1();
  return Element(params, std::move(e));
}

namespace {

// Mixed-radix key of a coset: digits (e0, e2, e3 mod p, ..., en mod p).
std::size_t coset_key(const Element& g) {
  const GroupParams& P = g.params();
  std::size_t key = g[0];
  key = key * P.p_pow_m() + g[2];
  for (std::size_t i = 3; i <= P.n(); ++i) key = key * P.p() + g[i] % P.p();
  return key;
}

std::uint64_t quotient_size(const GroupParams& P) {
  // |G/G'| = p * p^m * p^(n-2)
  std::uint64_t size = P.p();
  const auto cap = kQuotientBound;
  auto mul = [&](std::uint64_t f) {
    if (size > cap / f) {
      size = cap + 1;
    } else {
      size *= f;
    }
  };
  mul(P.p_pow_m());
  for (unsigned i = 3; i <= P.n(); ++i) mul(P.p());
  return size;
}

}  // namespace

DerivedQuotient::DerivedQuotient(const GroupParams& params) : params_(params) {
  const std::uint64_t size = quotient_size(params);
  if (size > kQuotientBound) {
    throw Error(ErrorKind::TooLarge, "|G/G'| exceeds " + std::to_string(kQuotientBound));
  }
  reps_.reserve(size);
  for (std::size_t key = 0; key < size; ++key) {
    std::vector<Exponent> e(params.rank(), 0);
    std::size_t rest = key;
    for (std::size_t i = params.n(); i >= 3; --i) {
      e[i] = rest % params.p();
      rest /= params.p();
    }
    e[2] = rest % params.p_pow_m();
    e[0] = rest / params.p_pow_m();
    reps_.emplace_back(params, std::move(e));
  }

  // Heights by explicit p-power chains: layer t holds p^t A as a bitmap.
  height_.assign(size, 0);
  std::vector<char> layer(size, 1);
  const std::size_t identity = 0;
  for (unsigned t = 0;; ++t) {
    std::vector<char> next(size, 0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < size; ++i) {
      if (!layer[i]) continue;
      height_[i] = t;
      const std::size_t j = coset_key(power(reps_[i], static_cast<std::int64_t>(params.p())));
      if (!next[j]) {
        next[j] = 1;
        ++count;
      }
    }
    layer.swap(next);
    if (count == 1 && layer[identity]) break;
  }
  height_[identity] = UINT_MAX;
}

std::size_t DerivedQuotient::index_of(const Element& g) const {
  if (!(g.params() == params_)) throw Error(ErrorKind::ParamMismatch, "coset of another group");
  return coset_key(g);
}

std::optional<unsigned> DerivedQuotient::height(std::size_t coset) const {
  const unsigned h = height_.at(coset);
  if (h == UINT_MAX) return std::nullopt;
  return h;
}

std::optional<unsigned> height_mod_derived(const Element& g) {
  const DerivedQuotient quotient(g.params());
  return quotient.height(quotient.index_of(g));
}

bool in_K(const Element& g) {
  if (!is_central(g)) return false;
  const auto h = height_mod_derived(g);
  return !h || *h >= group_constants(g.params()).b;
}

bool in_R(const Element& g) {
  if (!is_central(g)) return false;
  std::uint64_t bound = 1;
  for (unsigned i = 0; i < group_constants(g.params()).d; ++i) bound *= g.params().p();
  return order(g) <= bound;
}

CharacteristicSeries characteristic_series(const GroupParams& params) {
  const std::size_t n = params.n();
  const auto p = static_cast<std::int64_t>(params.p());
  auto a = [&](std::size_t i) { return generator(params, i); };
  auto ap = [&](std::size_t i) { return power(generator(params, i), p); };
  const Element v = v_element(params);

  CharacteristicSeries series;
  // K_i = <a1, ..., a_{n-i}, a_{n-i+1}^p, ..., an^p>
  for (std::size_t i = 0; i < n; ++i) {
    SubgroupGens k;
    for (std::size_t j = 1; j <= n - i; ++j) k.gens.push_back(a(j));
    for (std::size_t j = n - i + 1; j <= n; ++j) k.gens.push_back(ap(j));
    series.K.push_back(std::move(k));
  }
  // L_0 = H, L_1 = <a1, v, a3, ..., an>,
  // L_i = <a1, v, a3^p, ..., a_{i+1}^p, a_{i+2}, ..., an>
  SubgroupGens l0;
  for (std::size_t j = 1; j <= n; ++j) l0.gens.push_back(a(j));
  series.L.push_back(std::move(l0));
  for (std::size_t i = 1; i < n; ++i) {
    SubgroupGens l;
    l.gens.push_back(a(1));
    l.gens.push_back(v);
    for (std::size_t j = 3; j <= n; ++j) {
      const bool powered = i >= 2 && j <= i + 1;
      l.gens.push_back(powered ? ap(j) : a(j));
    }
    series.L.push_back(std::move(l));
  }
  return series;
}

}  // namespace pgkex
