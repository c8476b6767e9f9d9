#include "pgkex/automorphism.hpp"

#include <charconv>

#include "pgkex/arith.hpp"
#include "pgkex/structure.hpp"

namespace pgkex {

namespace {

bool is_a_index(const GroupParams& P, std::size_t i) { return i == 0 || (i >= 3 && i <= P.n()); }
bool is_b_index(const GroupParams& P, std::size_t i) { return i == 0 || (i >= 2 && i <= P.n()); }

void require_same_params(const GroupParams& a, const GroupParams& b) {
  if (!(a == b)) throw Error(ErrorKind::ParamMismatch, a.to_string() + " vs " + b.to_string());
}

std::uint64_t parse_u64(std::string_view tok) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw Error(ErrorKind::ParseError, "bad integer '" + std::string(tok) + "'");
  }
  return value;
}

Element pow_u(const Element& g, std::uint64_t e) { return power(g, static_cast<std::int64_t>(e)); }

}  // namespace

AutA AutA::make(const GroupParams& params, std::uint64_t l, std::map<std::size_t, std::uint64_t> r) {
  if (l >= params.p_pow_m1()) throw Error(ErrorKind::RangeViolation, "l must be < p^(m-1)");
  AutA f{params, l, {}};
  for (const auto& [i, ri] : r) {
    if (!is_a_index(params, i)) {
      throw Error(ErrorKind::RangeViolation, "R index " + std::to_string(i) + " not in {0,3,...,n}");
    }
    if (ri >= params.p()) throw Error(ErrorKind::RangeViolation, "r_i must be < p");
    if (ri != 0) f.r.emplace(i, ri);
  }
  return f;
}

std::string AutA::to_string() const {
  std::string out = "A:l=" + std::to_string(l) + ";r=";
  bool first = true;
  for (const auto& [i, ri] : r) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(i) + ":" + std::to_string(ri);
  }
  return out;
}

AutA AutA::parse(const GroupParams& params, std::string_view text) {
  constexpr std::string_view head = "A:l=";
  const std::size_t semi = text.find(";r=");
  if (text.substr(0, head.size()) != head || semi == std::string_view::npos) {
    throw Error(ErrorKind::ParseError, "expected A:l=<int>;r=<i>:<ri>,...");
  }
  const std::uint64_t l = parse_u64(text.substr(head.size(), semi - head.size()));
  std::map<std::size_t, std::uint64_t> r;
  std::string_view rest = text.substr(semi + 3);
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) throw Error(ErrorKind::ParseError, "bad R entry");
    r[parse_u64(item.substr(0, colon))] = parse_u64(item.substr(colon + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return make(params, l, std::move(r));
}

AutB AutB::make(const GroupParams& params, std::map<std::size_t, Element> z) {
  AutB f{params, {}};
  for (auto& [i, zi] : z) {
    if (!is_b_index(params, i)) {
      throw Error(ErrorKind::RangeViolation, "z index " + std::to_string(i) + " not in {0,2,...,n}");
    }
    require_same_params(params, zi.params());
    if (!in_derived(zi)) throw Error(ErrorKind::RangeViolation, "z_i must lie in G'");
    if (!zi.is_identity()) f.z.emplace(i, std::move(zi));
  }
  return f;
}

std::string AutB::to_string() const {
  std::string out = "B:";
  bool first = true;
  for (const auto& [i, zi] : z) {
    if (!first) out += ',';
    first = false;
    out += "z" + std::to_string(i) + "=" + zi.to_string();
  }
  return out;
}

AutB AutB::parse(const GroupParams& params, std::string_view text) {
  if (text.substr(0, 2) != "B:") throw Error(ErrorKind::ParseError, "expected B:z<i>=<element>,...");
  std::map<std::size_t, Element> z;
  std::string_view rest = text.substr(2);
  while (!rest.empty()) {
    // Element text contains commas but never ",z".
    const std::size_t next = rest.find(",z");
    const std::string_view item = rest.substr(0, next);
    const std::size_t eq = item.find('=');
    if (item.empty() || item[0] != 'z' || eq == std::string_view::npos) {
      throw Error(ErrorKind::ParseError, "bad B entry");
    }
    z.insert_or_assign(parse_u64(item.substr(1, eq - 1)), Element::parse(item.substr(eq + 1)));
    if (next == std::string_view::npos) break;
    rest = rest.substr(next + 1);
  }
  return make(params, std::move(z));
}

GeneratorMap GeneratorMap::identity(const GroupParams& params) {
  GeneratorMap map;
  for (std::size_t i = 0; i < params.rank(); ++i) map.images.push_back(generator(params, i));
  return map;
}

std::vector<std::uint64_t> k_sequence(const GroupParams& params, std::uint64_t k0, std::uint64_t k2) {
  const std::uint64_t p = params.p();
  const std::size_t n = params.n();
  std::vector<std::uint64_t> k(n + 1, 0);
  k[0] = k0 % p;
  k[2] = k2 % params.p_pow_m();
  std::uint64_t prev = k2 % p;
  for (std::size_t i = 3; i <= n; ++i) {
    k[i] = arith::mul_mod(k[0], prev, p);
    prev = k[i];
  }
  k[1] = arith::mul_mod(k[0], k[n], p);
  return k;
}

GeneratorMap generator_images(const AutA& f) {
  const GroupParams& P = f.params;
  GeneratorMap map = GeneratorMap::identity(P);
  const Element v = v_element(P);
  map.images[2] = pow_u(generator(P, 2), f.k());
  for (const auto& [i, ri] : f.r) map.images[i] = map.images[i] * pow_u(v, ri);
  return map;
}

GeneratorMap generator_images(const AutB& f) {
  GeneratorMap map = GeneratorMap::identity(f.params);
  for (const auto& [i, zi] : f.z) map.images[i] = map.images[i] * zi;
  return map;
}

GeneratorMap generator_images(const CentralAut& f) {
  require_same_params(f.a_part.params, f.b_part.params);
  // The families commute, so sigma_A(sigma_B(a_i)) = sigma_A(a_i) z_i.
  GeneratorMap map = generator_images(f.a_part);
  for (const auto& [i, zi] : f.b_part.z) map.images[i] = map.images[i] * zi;
  return map;
}

Element apply(const GeneratorMap& map, const Element& g) {
  require_same_params(map.params(), g.params());
  Element out(g.params());
  for (std::size_t i = 0; i < map.images.size(); ++i) {
    if (g[i] != 0) out = out * pow_u(map.images[i], g[i]);
  }
  return out;
}

Element apply(const AutA& f, const Element& g) { return apply(generator_images(f), g); }
Element apply(const AutB& f, const Element& g) { return apply(generator_images(f), g); }
Element apply(const CentralAut& f, const Element& g) { return apply(generator_images(f), g); }

CentralAut compose(const CentralAut& f, const CentralAut& g) {
  require_same_params(f.params(), g.params());
  const GroupParams& P = f.params();
  const std::uint64_t k = arith::mul_mod(f.a_part.k(), g.a_part.k(), P.p_pow_m());
  std::map<std::size_t, std::uint64_t> r = f.a_part.r;
  for (const auto& [i, ri] : g.a_part.r) r[i] = arith::add_mod(r[i], ri, P.p());
  std::map<std::size_t, Element> z = f.b_part.z;
  for (const auto& [i, zi] : g.b_part.z) {
    auto it = z.find(i);
    if (it == z.end()) {
      z.emplace(i, zi);
    } else {
      it->second = it->second * zi;
    }
  }
  return {AutA::make(P, (k - 1) / P.p(), std::move(r)), AutB::make(P, std::move(z))};
}

CentralAut invert(const CentralAut& f) {
  const GroupParams& P = f.params();
  const auto k_inv = arith::inverse_mod(f.a_part.k(), P.p_pow_m());
  std::map<std::size_t, std::uint64_t> r;
  for (const auto& [i, ri] : f.a_part.r) r[i] = P.p() - ri;
  std::map<std::size_t, Element> z;
  for (const auto& [i, zi] : f.b_part.z) z.emplace(i, inverse(zi));
  return {AutA::make(P, (*k_inv - 1) / P.p(), std::move(r)), AutB::make(P, std::move(z))};
}

Element sample_derived(const GroupParams& params, Rng& rng) {
  std::vector<Exponent> e(params.rank(), 0);
  e[1] = rng.below(params.p());
  for (std::size_t i = 3; i <= params.n(); ++i) e[i] = params.p() * rng.below(params.p());
  return Element(params, std::move(e));
}

AutA sample_A(const GroupParams& params, Rng& rng) {
  const std::uint64_t l = rng.below(params.p_pow_m1());
  std::map<std::size_t, std::uint64_t> r;
  for (std::size_t i = 0; i <= params.n(); ++i) {
    if (!is_a_index(params, i)) continue;
    if (rng.coin()) r[i] = rng.between(1, params.p() - 1);
  }
  return AutA::make(params, l, std::move(r));
}

AutB sample_B(const GroupParams& params, Rng& rng) {
  std::map<std::size_t, Element> z;
  for (std::size_t i = 0; i <= params.n(); ++i) {
    if (!is_b_index(params, i)) continue;
    z.emplace(i, sample_derived(params, rng));
  }
  return AutB::make(params, std::move(z));
}

CentralAut sample_central(const GroupParams& params, Rng& rng) {
  AutA a = sample_A(params, rng);
  AutB b = sample_B(params, rng);
  return {std::move(a), std::move(b)};
}

GeneratorMap general_from_k0(const GroupParams& params, const GeneralAutParams& spec) {
  const std::uint64_t p = params.p();
  const std::size_t n = params.n();
  if (spec.k0 == 0 || spec.k0 >= p) throw Error(ErrorKind::RangeViolation, "k0 must satisfy 0 < k0 < p");
  if (spec.k2 == 0 || spec.k2 >= params.p_pow_m() || spec.k2 % p == 0) {
    throw Error(ErrorKind::RangeViolation, "k2 must satisfy 0 < k2 < p^m and gcd(k2, p) = 1");
  }
  for (const auto& [i, r] : spec.v_exponents) {
    if (r >= p || !(i == 0 || (i >= 3 && i <= n))) {
      throw Error(ErrorKind::RangeViolation, "bad v-exponent for index " + std::to_string(i));
    }
  }
  for (const auto& [i, z] : spec.derived_factors) {
    require_same_params(params, z.params());
    if (!in_derived(z) || i == 1 || i > n) {
      throw Error(ErrorKind::RangeViolation, "bad G' factor for index " + std::to_string(i));
    }
  }

  const auto k = k_sequence(params, spec.k0, spec.k2);
  const Element v = v_element(params);
  auto v_pow = [&](std::size_t i) {
    const auto it = spec.v_exponents.find(i);
    return it == spec.v_exponents.end() ? identity(params) : pow_u(v, it->second);
  };
  auto factor = [&](std::size_t i) {
    const auto it = spec.derived_factors.find(i);
    return it == spec.derived_factors.end() ? identity(params) : it->second;
  };

  GeneratorMap map;
  map.images.reserve(n + 1);
  map.images.push_back(pow_u(generator(params, 0), k[0]) *
                       pow_u(generator(params, n - 1), spec.beta_n_minus_1) * v_pow(0) * factor(0));
  map.images.push_back(pow_u(generator(params, 1), k[1]));
  map.images.push_back(pow_u(generator(params, 2), k[2]) * factor(2));
  for (std::size_t i = 3; i <= n; ++i) {
    map.images.push_back(pow_u(generator(params, i), k[i]) * v_pow(i) * factor(i));
  }
  return map;
}

GeneratorMap general_from_k0(const GroupParams& params, std::uint64_t k0, std::uint64_t k2) {
  GeneralAutParams spec;
  spec.k0 = k0;
  spec.k2 = k2;
  return general_from_k0(params, spec);
}

bool relations_hold(const GeneratorMap& map) {
  const GroupParams& P = map.params();
  const std::size_t n = P.n();
  if (map.images.size() != n + 1) return false;
  const auto& x = map.images;
  const auto p = static_cast<std::int64_t>(P.p());
  const auto p2 = static_cast<std::int64_t>(P.p_squared());

  if (!power(x[1], p).is_identity()) return false;
  if (!power(x[2], static_cast<std::int64_t>(P.p_pow_m())).is_identity()) return false;
  for (std::size_t i = 3; i <= n; ++i) {
    if (!power(x[i], p2).is_identity()) return false;
  }
  if (!(power(x[n - 1], p) == power(x[0], p))) return false;
  if (!commutator(x[1], x[0]).is_identity()) return false;
  if (!(commutator(x[n], x[0]) == x[1])) return false;
  for (std::size_t i = 3; i <= n; ++i) {
    if (!(commutator(x[i - 1], x[0]) == power(x[i], p))) return false;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (!commutator(x[i], x[j]).is_identity()) return false;
    }
  }
  return true;
}

std::size_t frattini_rank(const GeneratorMap& map) {
  const GroupParams& P = map.params();
  const std::uint64_t p = P.p();
  std::vector<std::vector<std::uint64_t>> rows;
  rows.push_back(frattini_coordinates(map.images[0]));
  for (std::size_t i = 2; i <= P.n(); ++i) rows.push_back(frattini_coordinates(map.images[i]));

  const std::size_t cols = P.n();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const std::uint64_t inv = *arith::inverse_mod(rows[rank][c], p);
    for (auto& e : rows[rank]) e = arith::mul_mod(e, inv, p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      const std::uint64_t factor = rows[r][c];
      for (std::size_t j = 0; j < cols; ++j) {
        rows[r][j] = arith::sub_mod(rows[r][j], arith::mul_mod(factor, rows[rank][j], p), p);
      }
    }
    ++rank;
  }
  return rank;
}

bool is_automorphism(const GeneratorMap& map) {
  return relations_hold(map) && frattini_rank(map) == map.params().n();
}

bool is_central_map(const GeneratorMap& map) {
  const GroupParams& P = map.params();
  for (std::size_t i = 0; i < map.images.size(); ++i) {
    if (!is_central(inverse(generator(P, i)) * map.images[i])) return false;
  }
  return true;
}

Element evaluate(const CenterHom& h, const Element& g) {
  GeneratorMap as_map{h.images};
  return apply(as_map, g);
}

CenterHom to_hom(const CentralAut& f) {
  const GroupParams& P = f.params();
  const GeneratorMap map = generator_images(f);
  CenterHom h;
  for (std::size_t i = 0; i < map.images.size(); ++i) {
    h.images.push_back(inverse(generator(P, i)) * map.images[i]);
  }
  return h;
}

CentralAut from_hom(const CenterHom& h) {
  if (h.images.empty()) throw Error(ErrorKind::NotHomomorphism, "no images");
  const GroupParams& P = h.images[0].params();
  if (h.images.size() != P.rank()) throw Error(ErrorKind::NotHomomorphism, "wrong number of images");
  for (const Element& img : h.images) {
    require_same_params(P, img.params());
    if (!is_central(img)) throw Error(ErrorKind::NotHomomorphism, "image outside Z(G)");
  }
  if (!relations_hold(GeneratorMap{h.images})) {
    throw Error(ErrorKind::NotHomomorphism, "images violate a defining relation");
  }

  // Split each image along Z(G) = <a2^p> x G'.
  std::uint64_t l = 0;
  std::map<std::size_t, std::uint64_t> r;
  std::map<std::size_t, Element> z;
  for (std::size_t i = 0; i <= P.n(); ++i) {
    if (i == 1) continue;
    const Exponent e2 = h.images[i][2];
    std::vector<Exponent> rest(h.images[i].exps().begin(), h.images[i].exps().end());
    rest[2] = 0;
    z.emplace(i, Element(P, std::move(rest)));
    if (i == 2) {
      l = e2 / P.p();
    } else if (e2 % P.p_pow_m1() != 0) {
      throw Error(ErrorKind::NotHomomorphism, "a2-component of image of a" + std::to_string(i) +
                                                  " has order > p; not of A x B shape");
    } else {
      r[i] = e2 / P.p_pow_m1();
    }
  }
  CentralAut f{AutA::make(P, l, std::move(r)), AutB::make(P, std::move(z))};
  if (!is_automorphism(generator_images(f))) {
    throw Error(ErrorKind::NotAutomorphism, "g -> g h(g) is not bijective");
  }
  return f;
}

CentralAut central_from_map(const GeneratorMap& map) {
  const GroupParams& P = map.params();
  CenterHom h;
  for (std::size_t i = 0; i < map.images.size(); ++i) {
    h.images.push_back(inverse(generator(P, i)) * map.images[i]);
  }
  return from_hom(h);
}

AutB inner_as_B(const Element& h) {
  const GroupParams& P = h.params();
  std::map<std::size_t, Element> z;
  for (std::size_t i = 0; i <= P.n(); ++i) {
    if (i == 1) continue;
    z.emplace(i, commutator(generator(P, i), h));
  }
  return AutB::make(P, std::move(z));
}

}  // namespace pgkex
