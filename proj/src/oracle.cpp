#include "pgkex/oracle.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "pgkex/arith.hpp"

namespace pgkex::oracle {

namespace {

void require_small(const GroupParams& params) {
  const auto order = params.order();
  if (!order || *order > kEnumerationBound) {
    throw Error(ErrorKind::TooLarge, "|G| = p^" + std::to_string(params.order_log()) + " exceeds " +
                                         std::to_string(kEnumerationBound));
  }
}

std::size_t inversions(const Word& w) {
  std::size_t count = 0;
  std::size_t non_a0_seen = 0;
  for (const Letter& x : w) {
    if (x.gen == 0) {
      count += non_a0_seen;
    } else {
      ++non_a0_seen;
    }
  }
  return count;
}

// Letters of [a_j, a0] read off the defining relations.
void append_commutator(const GroupParams& P, std::size_t j, int sign, Word& w) {
  const std::size_t n = P.n();
  if (j == 1) return;
  if (j == n) {
    w.push_back({1, sign});
    return;
  }
  for (std::uint64_t k = 0; k < P.p(); ++k) w.push_back({j + 1, sign});
}

// Multiplication table built from naive products; indices follow
// enumerate_group order.
class CayleyTable {
 public:
  explicit CayleyTable(const GroupParams& params) : elements_(enumerate_group(params)) {
    const std::size_t size = elements_.size();
    for (std::size_t i = 0; i < size; ++i) index_.emplace(elements_[i], static_cast<std::uint32_t>(i));
    table_.resize(size * size);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        table_[i * size + j] = index_.at(naive_multiply(elements_[i], elements_[j]));
      }
    }
    inverse_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (table_[i * size + j] == 0) inverse_[i] = static_cast<std::uint32_t>(j);
      }
    }
  }

  std::size_t size() const { return elements_.size(); }
  const Element& element(std::uint32_t i) const { return elements_[i]; }
  std::uint32_t index(const Element& g) const { return index_.at(g); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return table_[a * elements_.size() + b]; }
  std::uint32_t inv(std::uint32_t a) const { return inverse_[a]; }
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const {
    std::uint32_t r = 0;
    for (std::uint64_t k = 0; k < e; ++k) r = mul(r, a);
    return r;
  }
  std::uint32_t comm(std::uint32_t a, std::uint32_t b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }

  bool relations_hold(const std::vector<std::uint32_t>& x, const GroupParams& P) const {
    const std::size_t n = P.n();
    if (pow(x[1], P.p()) != 0) return false;
    if (pow(x[2], P.p_pow_m()) != 0) return false;
    for (std::size_t i = 3; i <= n; ++i) {
      if (pow(x[i], P.p_squared()) != 0) return false;
    }
    if (pow(x[n - 1], P.p()) != pow(x[0], P.p())) return false;
    if (comm(x[1], x[0]) != 0) return false;
    if (comm(x[n], x[0]) != x[1]) return false;
    for (std::size_t i = 3; i <= n; ++i) {
      if (comm(x[i - 1], x[0]) != pow(x[i], P.p())) return false;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = i + 1; j <= n; ++j) {
        if (comm(x[i], x[j]) != 0) return false;
      }
    }
    return true;
  }

  // Image of every element under the homomorphic extension; true if bijective.
  bool extends_bijectively(const std::vector<std::uint32_t>& x) const {
    std::vector<char> hit(size(), 0);
    for (std::size_t g = 0; g < size(); ++g) {
      const Element& el = elements_[g];
      std::uint32_t img = 0;
      for (std::size_t i = 0; i < x.size(); ++i) img = mul(img, pow(x[i], el[i]));
      if (hit[img]) return false;
      hit[img] = 1;
    }
    return true;
  }

 private:
  std::vector<Element> elements_;
  std::unordered_map<Element, std::uint32_t, ElementHash> index_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> inverse_;
};

constexpr std::size_t kTableBound = 4096;

}  // namespace

Word word_of(const Element& g) {
  Word w;
  for (std::size_t i = 0; i < g.exps().size(); ++i) {
    for (Exponent k = 0; k < g[i]; ++k) w.push_back({i, 1});
  }
  return w;
}

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

Element naive_normalize(const Word& input, const GroupParams& params) {
  Word w = input;
  std::size_t measure = inversions(w);
  while (measure > 0) {
    std::size_t i = 0;
    while (!(w[i].gen != 0 && w[i + 1].gen == 0)) ++i;
    const Letter x = w[i];
    const Letter a0 = w[i + 1];
    if (x.gen > params.n()) throw Error(ErrorKind::IndexOutOfRange, "letter beyond a_n");
    w[i] = a0;
    w[i + 1] = x;
    // x a0^t = a0^t x [x, a0]^{sign}; the commutator is central, so it goes to the end.
    append_commutator(params, x.gen, x.sign * a0.sign, w);
    const std::size_t next = inversions(w);
    if (next + 1 != measure) throw std::logic_error("rewriting measure did not decrease by one");
    measure = next;
  }

  std::vector<std::int64_t> sums(params.rank(), 0);
  for (const Letter& x : w) {
    if (x.gen > params.n()) throw Error(ErrorKind::IndexOutOfRange, "letter beyond a_n");
    sums[x.gen] += x.sign;
  }
  // a0^(qp + r) = a0^r a_{n-1}^(qp)
  const auto p = static_cast<std::int64_t>(params.p());
  std::int64_t q = sums[0] / p;
  std::int64_t r = sums[0] % p;
  if (r < 0) {
    r += p;
    --q;
  }
  sums[0] = r;
  sums[params.n() - 1] += q * p;
  std::vector<Exponent> exps(params.rank());
  for (std::size_t i = 0; i < exps.size(); ++i) exps[i] = arith::reduce_signed(sums[i], params.modulus(i));
  return Element(params, std::move(exps));
}

Element naive_multiply(const Element& g, const Element& h) {
  require_same_group(g, h);
  return naive_normalize(concat(word_of(g), word_of(h)), g.params());
}

std::vector<Element> enumerate_group(const GroupParams& params) {
  require_small(params);
  const std::uint64_t size = *params.order();
  std::vector<Element> out;
  out.reserve(size);
  std::vector<Exponent> e(params.rank(), 0);
  for (std::uint64_t k = 0; k < size; ++k) {
    out.emplace_back(params, e);
    for (std::size_t i = e.size(); i-- > 0;) {
      if (++e[i] < params.modulus(i)) break;
      e[i] = 0;
    }
  }
  return out;
}

std::vector<Element> enumerate_center(const GroupParams& params) {
  std::vector<Element> gens;
  for (std::size_t i = 0; i < params.rank(); ++i) gens.push_back(generator(params, i));
  std::vector<Element> out;
  for (const Element& g : enumerate_group(params)) {
    bool central = true;
    for (const Element& a : gens) {
      if (!(naive_multiply(g, a) == naive_multiply(a, g))) {
        central = false;
        break;
      }
    }
    if (central) out.push_back(g);
  }
  return out;
}

std::vector<Element> subgroup_closure(const GroupParams& params, const std::vector<Element>& gens) {
  require_small(params);
  std::set<Element> seen{identity(params)};
  std::deque<Element> queue{identity(params)};
  while (!queue.empty()) {
    const Element x = queue.front();
    queue.pop_front();
    for (const Element& s : gens) {
      Element y = naive_multiply(x, s);
      if (seen.insert(y).second) queue.push_back(std::move(y));
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<Element> enumerate_derived(const GroupParams& params) {
  // Normal closure of the commutators of generators, with every commutator
  // spelled through naive products.
  std::vector<Element> gens;
  for (std::size_t i = 0; i < params.rank(); ++i) gens.push_back(generator(params, i));
  auto naive_inverse = [&](const Element& g) {
    Word w;
    const Word fwd = word_of(g);
    for (auto it = fwd.rbegin(); it != fwd.rend(); ++it) w.push_back({it->gen, -it->sign});
    return naive_normalize(w, params);
  };
  std::vector<Element> seeds;
  for (const Element& a : gens) {
    for (const Element& b : gens) {
      seeds.push_back(naive_multiply(naive_multiply(naive_inverse(a), naive_inverse(b)), naive_multiply(a, b)));
    }
  }
  std::vector<Element> sub = subgroup_closure(params, seeds);
  while (true) {
    std::set<Element> current(sub.begin(), sub.end());
    std::vector<Element> extra = sub;
    for (const Element& x : sub) {
      for (const Element& a : gens) {
        Element c = naive_multiply(naive_multiply(naive_inverse(a), x), a);
        if (!current.count(c)) extra.push_back(std::move(c));
      }
    }
    if (extra.size() == sub.size()) return sub;
    sub = subgroup_closure(params, extra);
  }
}

std::vector<Element> frattini_by_maximal_subgroups(const GroupParams& params) {
  const std::vector<Element> group = enumerate_group(params);
  const std::uint64_t p = params.p();
  const std::size_t r = params.rank();
  std::vector<char> in_all(group.size(), 1);

  // Additive relation check in Z_p for an assignment f of the generators.
  auto is_hom = [&](const std::vector<std::uint64_t>& f) {
    const std::size_t n = params.n();
    auto times = [&](std::uint64_t x, std::uint64_t k) { return arith::mul_mod(x, k % p, p); };
    if (times(f[1], p) != 0) return false;
    if (times(f[2], params.p_pow_m()) != 0) return false;
    if (times(f[n - 1], p) != times(f[0], p)) return false;
    // Commutators vanish in an abelian target.
    if (f[1] != 0) return false;  // [an, a0] = a1
    for (std::size_t i = 3; i <= n; ++i) {
      if (times(f[i], p) != 0) return false;  // [a_{i-1}, a0] = a_i^p
    }
    return true;
  };

  std::vector<std::uint64_t> f(r, 0);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < r; ++i) total *= p;
  for (std::uint64_t code = 1; code < total; ++code) {
    std::uint64_t c = code;
    for (std::size_t i = 0; i < r; ++i) {
      f[i] = c % p;
      c /= p;
    }
    if (!is_hom(f)) continue;
    for (std::size_t g = 0; g < group.size(); ++g) {
      std::uint64_t value = 0;
      for (std::size_t i = 0; i < r; ++i) value = arith::add_mod(value, arith::mul_mod(f[i], group[g][i] % p, p), p);
      if (value != 0) in_all[g] = 0;
    }
  }
  std::vector<Element> out;
  for (std::size_t g = 0; g < group.size(); ++g) {
    if (in_all[g]) out.push_back(group[g]);
  }
  return out;
}

std::uint64_t brute_order(const Element& g) {
  Element x = g;
  std::uint64_t e = 1;
  while (!x.is_identity()) {
    x = naive_multiply(x, g);
    ++e;
  }
  return e;
}

std::uint64_t count_homs_to_center(const GroupParams& params) {
  const CayleyTable table(params);
  if (table.size() > kTableBound) throw Error(ErrorKind::TooLarge, "table too large");
  std::vector<std::uint32_t> center;
  for (const Element& z : enumerate_center(params)) center.push_back(table.index(z));
  const std::size_t r = params.rank();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < r; ++i) total *= center.size();
  std::uint64_t count = 0;
  std::vector<std::uint32_t> x(r);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (std::size_t i = 0; i < r; ++i) {
      x[i] = center[c % center.size()];
      c /= center.size();
    }
    if (table.relations_hold(x, params)) ++count;
  }
  return count;
}

std::vector<CentralAut> enumerate_central_autos(const GroupParams& params) {
  const std::vector<Element> center = enumerate_center(params);
  const std::size_t n = params.n();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= center.size();
    if (total > kCentralCandidateBound) {
      throw Error(ErrorKind::TooLarge, "|Z|^n exceeds " + std::to_string(kCentralCandidateBound));
    }
  }
  std::vector<CentralAut> out;
  std::vector<std::size_t> free_gens{0};
  for (std::size_t i = 2; i <= n; ++i) free_gens.push_back(i);
  for (std::uint64_t code = 0; code < total; ++code) {
    GeneratorMap map = GeneratorMap::identity(params);
    std::uint64_t c = code;
    for (std::size_t i : free_gens) {
      map.images[i] = naive_multiply(map.images[i], center[c % center.size()]);
      c /= center.size();
    }
    if (is_automorphism(map)) out.push_back(central_from_map(map));
  }
  return out;
}

AutomorphismSweep enumerate_all_autos(const GroupParams& params, std::uint64_t budget) {
  require_small(params);
  const std::uint64_t size = *params.order();
  const std::size_t n = params.n();
  std::uint64_t candidates = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (candidates > budget / size) {
      throw Error(ErrorKind::TooLarge, "|G|^n = " + std::to_string(size) + "^" + std::to_string(n) +
                                           " candidates exceed the budget of " + std::to_string(budget));
    }
    candidates *= size;
  }
  if (size > kTableBound) throw Error(ErrorKind::TooLarge, "group too large for a Cayley table");
  const CayleyTable table(params);

  std::vector<char> central_mask(size, 0);
  for (const Element& z : enumerate_center(params)) central_mask[table.index(z)] = 1;

  AutomorphismSweep sweep;
  sweep.candidates = candidates;
  std::vector<std::size_t> free_gens{0};
  for (std::size_t i = 2; i <= n; ++i) free_gens.push_back(i);
  std::vector<std::uint32_t> x(n + 1, 0);
  std::vector<std::vector<std::uint32_t>> found;
  for (std::uint64_t code = 0; code < candidates; ++code) {
    std::uint64_t c = code;
    for (std::size_t i : free_gens) {
      x[i] = static_cast<std::uint32_t>(c % size);
      c /= size;
    }
    x[1] = table.comm(x[n], x[0]);
    if (!table.relations_hold(x, params)) continue;
    if (!table.extends_bijectively(x)) continue;
    found.push_back(x);
  }

  sweep.count = found.size();
  for (const auto& images : found) {
    bool central = true;
    for (std::size_t i = 0; i <= n; ++i) {
      const std::uint32_t a = table.index(generator(params, i));
      if (!central_mask[table.mul(table.inv(a), images[i])]) central = false;
    }
    if (central) ++sweep.central;
    GeneratorMap map;
    for (std::uint32_t idx : images) map.images.push_back(table.element(idx));
    sweep.automorphisms.push_back(std::move(map));
  }

  // Abelian iff every pair agrees on every generator.
  auto image_of = [&](const std::vector<std::uint32_t>& f, std::uint32_t g) {
    const Element& el = table.element(g);
    std::uint32_t img = 0;
    for (std::size_t i = 0; i <= n; ++i) img = table.mul(img, table.pow(f[i], el[i]));
    return img;
  };
  sweep.abelian = true;
  for (std::size_t a = 0; a < found.size() && sweep.abelian; ++a) {
    for (std::size_t b = a + 1; b < found.size() && sweep.abelian; ++b) {
      for (std::size_t i = 0; i <= n; ++i) {
        if (image_of(found[a], found[b][i]) != image_of(found[b], found[a][i])) {
          sweep.abelian = false;
          break;
        }
      }
    }
  }
  return sweep;
}

Element dh_oracle(const CentralAut& alice, const CentralAut& bob, const Element& g) {
  return apply(alice, apply(bob, g));
}

Element conjugacy_search(const Element& alpha, const Element& beta) {
  require_same_group(alpha, beta);
  for (const Element& x : enumerate_group(alpha.params())) {
    if (inverse(x) * alpha * x == beta) return x;
  }
  throw Error(ErrorKind::NoWitness, "no x with x^-1 alpha x = beta");
}

}  // namespace pgkex::oracle
