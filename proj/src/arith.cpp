#include "pgkex/arith.hpp"

#include <array>
#include <limits>

namespace pgkex::arith {

u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

std::optional<u64> checked_pow(u64 p, unsigned e) {
  constexpr u64 limit = static_cast<u64>(std::numeric_limits<i64>::max());
  u128 acc = 1;
  for (unsigned i = 0; i < e; ++i) {
    acc *= p;
    if (acc > limit) return std::nullopt;
  }
  return static_cast<u64>(acc);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  // These twelve bases are a proven deterministic witness set below 2^64.
  static constexpr std::array<u64, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 b : bases) {
    if (n % b == 0) return n == b;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (u64 a : bases) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

unsigned valuation(u64 x, u64 p, unsigned cap) {
  if (x == 0) return cap;
  unsigned v = 0;
  while (x % p == 0 && v < cap) {
    x /= p;
    ++v;
  }
  return v;
}

std::optional<u64> inverse_mod(u64 a, u64 m) {
  // Extended Euclid over signed 128-bit to keep the Bezout coefficients exact.
  __int128 old_r = static_cast<__int128>(a % m), r = static_cast<__int128>(m);
  __int128 old_s = 1, s = 0;
  while (r != 0) {
    const __int128 q = old_r / r;
    const __int128 tr = old_r - q * r;
    old_r = r;
    r = tr;
    const __int128 ts = old_s - q * s;
    old_s = s;
    s = ts;
  }
  if (old_r != 1) return std::nullopt;
  __int128 inv = old_s % static_cast<__int128>(m);
  if (inv < 0) inv += m;
  return static_cast<u64>(inv);
}

}  // namespace pgkex::arith
