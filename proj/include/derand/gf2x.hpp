/*
 * Copyright 2026 The derand Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file gf2x.hpp
 * @brief Arithmetic in binary extension fields GF(2^w), 1 <= w <= 64.
 *
 * Elements are w-bit polynomials over GF(2), little-endian: bit i holds the
 * coefficient of x^i. A FieldCtx owns the reduction modulus; the leading
 * x^w term is implicit and only the low w coefficients are stored.
 *
 * Multiplication is a carry-less product followed by Barrett reduction,
 * using PCLMULQDQ when the compiler targets it.
 */

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>

#if defined(__PCLMUL__) && (defined(__x86_64__) || defined(_M_X64))
#include <immintrin.h>
#define DERAND_HAVE_PCLMUL 1
#endif

#include "derand/error.hpp"

namespace derand::gf2x {

using u128 = unsigned __int128;

/// Carry-less 64x64 -> 128 bit product.
[[nodiscard]] inline u128 clmul(std::uint64_t a, std::uint64_t b) noexcept {
#ifdef DERAND_HAVE_PCLMUL
  const __m128i va = _mm_cvtsi64_si128(static_cast<long long>(a));
  const __m128i vb = _mm_cvtsi64_si128(static_cast<long long>(b));
  const __m128i p = _mm_clmulepi64_si128(va, vb, 0x00);
  const auto lo = static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
  const auto hi = static_cast<std::uint64_t>(_mm_extract_epi64(p, 1));
  return (static_cast<u128>(hi) << 64) | lo;
#else
  u128 acc = 0;
  u128 shifted = a;
  while (b != 0) {
    if (b & 1U) acc ^= shifted;
    shifted <<= 1;
    b >>= 1;
  }
  return acc;
#endif
}

namespace detail {

// Low w coefficients of the default modulus for each width (index = w).
// Widths 3, 4, 8, 16, 32 and 64 use the customary low-weight polynomials;
// the others are the lowest-weight irreducible (trinomial, else pentanomial)
// with the smallest middle exponents.
inline constexpr std::array<std::uint64_t, 65> kStandardModulus = {
    0x0ULL,                                                        // unused
    0x1ULL,     0x3ULL,     0x3ULL,     0x3ULL,     0x5ULL,       // 1..5
    0x3ULL,     0x3ULL,     0x1bULL,    0x3ULL,     0x9ULL,       // 6..10
    0x5ULL,     0x9ULL,     0x1bULL,    0x21ULL,    0x3ULL,       // 11..15
    0x2bULL,    0x9ULL,     0x9ULL,     0x27ULL,    0x9ULL,       // 16..20
    0x5ULL,     0x3ULL,     0x21ULL,    0x1bULL,    0x9ULL,       // 21..25
    0x1bULL,    0x27ULL,    0x3ULL,     0x5ULL,     0x3ULL,       // 26..30
    0x9ULL,     0x8dULL,    0x401ULL,   0x81ULL,    0x5ULL,       // 31..35
    0x201ULL,   0x53ULL,    0x63ULL,    0x11ULL,    0x39ULL,      // 36..40
    0x9ULL,     0x81ULL,    0x59ULL,    0x21ULL,    0x1bULL,      // 41..45
    0x3ULL,     0x21ULL,    0x2dULL,    0x201ULL,   0x1dULL,      // 46..50
    0x4bULL,    0x9ULL,     0x47ULL,    0x201ULL,   0x81ULL,      // 51..55
    0x95ULL,    0x11ULL,    0x80001ULL, 0x95ULL,    0x3ULL,       // 56..60
    0x27ULL,    0x20000001ULL, 0x3ULL,  0x1bULL,                  // 61..64
};

[[nodiscard]] constexpr std::uint64_t low_mask(unsigned w) noexcept {
  return w >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
}

// Degree of a nonzero polynomial held in 128 bits.
[[nodiscard]] inline int degree(u128 p) noexcept {
  const auto hi = static_cast<std::uint64_t>(p >> 64);
  if (hi != 0) return 127 - std::countl_zero(hi);
  const auto lo = static_cast<std::uint64_t>(p);
  return lo == 0 ? -1 : 63 - std::countl_zero(lo);
}

// Remainder of a by b over GF(2)[x], schoolbook.
[[nodiscard]] inline u128 poly_mod(u128 a, u128 b) noexcept {
  const int db = degree(b);
  for (int da = degree(a); da >= db; da = degree(a)) a ^= b << (da - db);
  return a;
}

// Quotient floor(x^(2w) / (x^w + low)) minus its leading x^w term.
[[nodiscard]] inline std::uint64_t barrett_constant(unsigned w, std::uint64_t low) noexcept {
  // Long division of x^(2w); quotient has degree w and x^w is implicit.
  const u128 modulus = (u128{1} << w) | low;
  u128 rem = u128{1} << (2 * w - (w == 64 ? 1 : 0));
  u128 quot = 0;
  if (w == 64) {
    // 2w = 128 does not fit; start from x^127 and shift the quotient once more.
    // x^128 = x * x^127, so divide x^127, then fold the final step by hand.
    for (int d = degree(rem); d >= 64; d = degree(rem)) {
      quot |= u128{1} << (d - 64);
      rem ^= modulus << (d - 64);
    }
    quot <<= 1;
    rem <<= 1;
    if (degree(rem) >= 64) {
      quot |= 1;
      rem ^= modulus;
    }
  } else {
    for (int d = degree(rem); d >= static_cast<int>(w); d = degree(rem)) {
      quot |= u128{1} << (d - static_cast<int>(w));
      rem ^= modulus << (d - static_cast<int>(w));
    }
  }
  return static_cast<std::uint64_t>(quot) & low_mask(w);
}

}  // namespace detail

class FieldCtx;

/// A field element: w-bit value read as a polynomial over GF(2).
struct FieldElement {
  std::uint64_t bits = 0;

  [[nodiscard]] constexpr bool is_zero() const noexcept { return bits == 0; }
  friend constexpr bool operator==(FieldElement, FieldElement) = default;
};

/// Width and modulus of GF(2^w). Cheap to copy; immutable once built.
class FieldCtx {
 public:
  /// GF(2^w) with the built-in modulus for this width.
  static FieldCtx standard(unsigned width) {
    if (width < 1 || width > 64) {
      throw ConfigError("field width must be in [1, 64], got " + std::to_string(width));
    }
    return FieldCtx(width, detail::kStandardModulus[width]);
  }

  /// GF(2^w) with a caller-chosen modulus x^w + low. Irreducibility is checked
  /// exhaustively for w <= 16; wider custom moduli are rejected.
  static FieldCtx with_modulus(unsigned width, std::uint64_t low_terms) {
    if (width < 1 || width > 16) {
      throw ConfigError("custom moduli are only accepted for widths 1..16");
    }
    if ((low_terms & ~detail::low_mask(width)) != 0) {
      throw ConfigError("modulus low terms exceed the field width");
    }
    if (!is_irreducible_small(width, low_terms)) {
      throw ConfigError("modulus is reducible");
    }
    return FieldCtx(width, low_terms);
  }

  /// Trial division by every polynomial of degree 1..w/2. Exhaustive, so only for w <= 16.
  [[nodiscard]] static bool is_irreducible_small(unsigned width, std::uint64_t low_terms) {
    if (width > 16) throw ConfigError("exhaustive irreducibility check limited to w <= 16");
    const u128 f = (u128{1} << width) | low_terms;
    for (std::uint64_t divisor = 2; divisor < (std::uint64_t{1} << (width / 2 + 1)); ++divisor) {
      if (detail::degree(divisor) > static_cast<int>(width / 2)) break;
      if (detail::poly_mod(f, divisor) == 0) return false;
    }
    return true;
  }

  [[nodiscard]] constexpr unsigned width() const noexcept { return width_; }
  [[nodiscard]] constexpr std::uint64_t mask() const noexcept { return mask_; }
  [[nodiscard]] constexpr std::uint64_t modulus_low() const noexcept { return modulus_low_; }
  [[nodiscard]] constexpr std::uint64_t barrett_low() const noexcept { return barrett_low_; }
  /// Number of field elements, saturated at 2^64 - 1 for w = 64.
  [[nodiscard]] constexpr std::uint64_t order() const noexcept {
    return width_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_);
  }
  [[nodiscard]] constexpr bool contains(std::uint64_t v) const noexcept { return (v & ~mask_) == 0; }

  /// Checked construction of an element of this field.
  [[nodiscard]] FieldElement element(std::uint64_t v) const {
    if (!contains(v)) {
      throw ConfigError("value does not fit in GF(2^" + std::to_string(width_) + ")");
    }
    return FieldElement{v};
  }

  /// Reduce a product of two field elements (degree < 2w).
  [[nodiscard]] std::uint64_t reduce(u128 p) const noexcept {
    const unsigned w = width_;
    const auto hi = static_cast<std::uint64_t>(p >> w);
    const auto q = hi ^ static_cast<std::uint64_t>(clmul(hi, barrett_low_) >> w);
    return (static_cast<std::uint64_t>(p) ^ static_cast<std::uint64_t>(clmul(q, modulus_low_))) & mask_;
  }

  /// Raw multiply on bit patterns; both operands must already be reduced.
  [[nodiscard]] std::uint64_t mul_raw(std::uint64_t a, std::uint64_t b) const noexcept {
    return reduce(clmul(a, b));
  }

  friend bool operator==(const FieldCtx& a, const FieldCtx& b) noexcept {
    return a.width_ == b.width_ && a.modulus_low_ == b.modulus_low_;
  }

 private:
  FieldCtx(unsigned width, std::uint64_t low)
      : width_(width),
        mask_(detail::low_mask(width)),
        modulus_low_(low),
        barrett_low_(detail::barrett_constant(width, low)) {}

  unsigned width_;
  std::uint64_t mask_;
  std::uint64_t modulus_low_;
  std::uint64_t barrett_low_;
};

[[nodiscard]] constexpr FieldElement gf_add(FieldElement a, FieldElement b) noexcept {
  return FieldElement{a.bits ^ b.bits};
}

[[nodiscard]] inline FieldElement gf_mul(FieldElement a, FieldElement b, const FieldCtx& ctx) noexcept {
  return FieldElement{ctx.mul_raw(a.bits, b.bits)};
}

/// a^e by square-and-multiply. 0^0 = 1.
[[nodiscard]] inline FieldElement gf_pow(FieldElement a, std::uint64_t e, const FieldCtx& ctx) noexcept {
  std::uint64_t result = 1;
  std::uint64_t base = a.bits;
  while (e != 0) {
    if (e & 1U) result = ctx.mul_raw(result, base);
    base = ctx.mul_raw(base, base);
    e >>= 1;
  }
  return FieldElement{result};
}

/// Multiplicative inverse via a^(2^w - 2). Zero has no inverse.
[[nodiscard]] inline FieldElement gf_inv(FieldElement a, const FieldCtx& ctx) {
  if (a.is_zero()) throw PreconditionError("zero has no multiplicative inverse");
  // 2^w - 2 = 2 + 4 + ... + 2^(w-1): square-and-accumulate avoids overflow at w = 64.
  std::uint64_t result = 1;
  std::uint64_t sq = a.bits;
  for (unsigned i = 1; i < ctx.width(); ++i) {
    sq = ctx.mul_raw(sq, sq);
    result = ctx.mul_raw(result, sq);
  }
  return FieldElement{result};
}

/// Horner evaluation of sum coeffs[i] * x^i.
[[nodiscard]] inline FieldElement poly_eval(std::span<const FieldElement> coeffs, FieldElement x,
                                            const FieldCtx& ctx) {
  if (coeffs.empty()) throw PreconditionError("poly_eval needs at least one coefficient");
  std::uint64_t acc = coeffs.back().bits;
  for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) {
    acc = ctx.mul_raw(acc, x.bits) ^ it->bits;
  }
  return FieldElement{acc};
}

/// Same value as poly_eval, computed as four interleaved Horner chains in x^4
/// so consecutive multiplies are independent. Used on the hot hashing path.
[[nodiscard]] inline std::uint64_t poly_eval_interleaved(std::span<const std::uint64_t> coeffs,
                                                         std::uint64_t x, const FieldCtx& ctx) noexcept {
  const std::size_t k = coeffs.size();
  if (k < 8) {
    std::uint64_t acc = 0;
    for (std::size_t i = k; i-- > 0;) acc = ctx.mul_raw(acc, x) ^ coeffs[i];
    return acc;
  }
  const std::uint64_t x2 = ctx.mul_raw(x, x);
  const std::uint64_t x3 = ctx.mul_raw(x2, x);
  const std::uint64_t x4 = ctx.mul_raw(x2, x2);
  std::array<std::uint64_t, 4> acc{};
  // Chain r accumulates coefficients with index = r (mod 4).
  std::size_t top = (k + 3) / 4;
  for (std::size_t step = top; step-- > 0;) {
    for (std::size_t r = 0; r < 4; ++r) {
      const std::size_t idx = step * 4 + r;
      acc[r] = ctx.mul_raw(acc[r], x4) ^ (idx < k ? coeffs[idx] : 0);
    }
  }
  return acc[0] ^ ctx.mul_raw(acc[1], x) ^ ctx.mul_raw(acc[2], x2) ^ ctx.mul_raw(acc[3], x3);
}

/// Number of points evaluated side by side in the batch routines.
inline constexpr std::size_t kBatchLanes = 8;

/// out[b] = sum coeffs[i] * xs[b]^i for every b: plain Horner, run on
/// kBatchLanes points at once so the multiplies of different points overlap.
inline void poly_eval_batch(std::span<const std::uint64_t> coeffs, std::span<const std::uint64_t> xs,
                            std::span<std::uint64_t> out, const FieldCtx& ctx) noexcept {
  const std::size_t k = coeffs.size();
  std::size_t b = 0;
  for (; b + kBatchLanes <= xs.size(); b += kBatchLanes) {
    std::array<std::uint64_t, kBatchLanes> acc{};
    for (std::size_t i = k; i-- > 0;) {
      for (std::size_t lane = 0; lane < kBatchLanes; ++lane) {
        acc[lane] = ctx.mul_raw(acc[lane], xs[b + lane]) ^ coeffs[i];
      }
    }
    for (std::size_t lane = 0; lane < kBatchLanes; ++lane) out[b + lane] = acc[lane];
  }
  for (; b < xs.size(); ++b) out[b] = poly_eval_interleaved(coeffs, xs[b], ctx);
}

}  // namespace derand::gf2x
