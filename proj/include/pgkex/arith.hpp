#pragma once

// Exact modular arithmetic on 64-bit residues. Every intermediate product is
// widened to 128 bits, so moduli up to 2^63 - 1 are safe.

#include <cstdint>
#include <optional>

namespace pgkex::arith {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 add_mod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) + b) % m); }

inline u64 sub_mod(u64 a, u64 b, u64 m) {
  a %= m;
  b %= m;
  return a >= b ? a - b : m - (b - a);
}

inline u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }

inline u64 neg_mod(u64 a, u64 m) { return sub_mod(0, a, m); }

/// Reduces a signed value into [0, m).
inline u64 reduce_signed(i64 a, u64 m) {
  if (a >= 0) return static_cast<u64>(a) % m;
  // -(a+1) avoids overflow at INT64_MIN.
  const u64 mag = static_cast<u64>(-(a + 1)) + 1;
  return neg_mod(mag % m, m);
}

u64 pow_mod(u64 base, u64 exp, u64 m);

/// Checked p^e; std::nullopt when the result exceeds 2^63 - 1.
std::optional<u64> checked_pow(u64 p, unsigned e);

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(u64 n);

/// p-adic valuation; v_p(0) is reported as `cap`.
unsigned valuation(u64 x, u64 p, unsigned cap);

/// Inverse of a unit modulo m; std::nullopt if gcd(a, m) != 1.
std::optional<u64> inverse_mod(u64 a, u64 m);

}  // namespace pgkex::arith
