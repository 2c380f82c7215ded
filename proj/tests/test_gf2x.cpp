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

#include <gtest/gtest.h>

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "derand/gf2x.hpp"

namespace {

using derand::gf2x::FieldCtx;
using derand::gf2x::FieldElement;
using derand::gf2x::u128;
namespace gf = derand::gf2x;

// Schoolbook shift-and-add multiply with bit-by-bit reduction.
std::uint64_t slow_mul(std::uint64_t a, std::uint64_t b, unsigned w, std::uint64_t low) {
  const std::uint64_t mask = w == 64 ? ~0ULL : (1ULL << w) - 1;
  std::uint64_t acc = 0;
  for (unsigned i = 0; i < w; ++i) {
    if ((b >> i) & 1) acc ^= a;
    const bool carry = (a >> (w - 1)) & 1;
    a = (a << 1) & mask;
    if (carry) a ^= low;
  }
  return acc;
}

// x^(2^k) mod f, by repeated squaring with slow_mul.
std::uint64_t frobenius(unsigned w, std::uint64_t low, unsigned k) {
  std::uint64_t r = w == 1 ? (low & 1) : 2;  // the element x
  for (unsigned i = 0; i < k; ++i) r = slow_mul(r, r, w, low);
  return r;
}

u128 poly_gcd(u128 a, u128 b) {
  while (b != 0) {
    a = gf::detail::poly_mod(a, b);
    std::swap(a, b);
  }
  return a;
}

// Rabin's test: f | x^(2^w) - x and gcd(f, x^(2^(w/q)) - x) = 1 for primes q | w.
bool rabin_irreducible(unsigned w, std::uint64_t low) {
  if (w == 1) return true;
  if (frobenius(w, low, w) != 2) return false;
  const u128 f = (u128{1} << w) | low;
  for (unsigned q = 2; q <= w; ++q) {
    if (w % q != 0) continue;
    bool prime = true;
    for (unsigned p = 2; p * p <= q; ++p) prime &= (q % p != 0);
    if (!prime) continue;
    const u128 h = frobenius(w, low, w / q) ^ 2;
    if (poly_gcd(f, h) != 1) return false;
  }
  return true;
}

TEST(Gf2x, AddExamples) {
  const auto f = FieldCtx::standard(3);
  EXPECT_EQ(gf::gf_add(FieldElement{0b110}, FieldElement{0b011}).bits, 0b101U);
  for (std::uint64_t a = 0; a < 8; ++a) {
    EXPECT_TRUE(gf::gf_add(FieldElement{a}, FieldElement{a}).is_zero());
    EXPECT_EQ(gf::gf_add(FieldElement{a}, FieldElement{0}).bits, a);
  }
  EXPECT_EQ(f.modulus_low(), 0b011U);
}

TEST(Gf2x, MulExamplesGf8) {
  const auto f = FieldCtx::standard(3);
  EXPECT_EQ(gf::gf_mul(FieldElement{0b010}, FieldElement{0b010}, f).bits, 0b100U);
  EXPECT_EQ(gf::gf_mul(FieldElement{0b110}, FieldElement{0b011}, f).bits, 0b001U);
  for (std::uint64_t a = 0; a < 8; ++a) EXPECT_EQ(gf::gf_mul(FieldElement{a}, FieldElement{1}, f).bits, a);
}

// Log/antilog tables from the generator x of GF(2^3) = GF(2)[x]/(x^3+x+1).
TEST(Gf2x, LogTableOracleGf8) {
  const auto f = FieldCtx::standard(3);
  std::array<std::uint64_t, 7> antilog{};
  std::array<int, 8> log{};
  std::uint64_t v = 1;
  for (int i = 0; i < 7; ++i) {
    antilog[i] = v;
    log[v] = i;
    v <<= 1;
    if (v & 8) v ^= 0b1011;
  }
  for (std::uint64_t a = 1; a < 8; ++a) {
    for (std::uint64_t b = 1; b < 8; ++b) {
      EXPECT_EQ(gf::gf_mul(FieldElement{a}, FieldElement{b}, f).bits, antilog[(log[a] + log[b]) % 7]);
    }
  }
}

TEST(Gf2x, ModulusTableIsIrreducible) {
  for (unsigned w = 1; w <= 64; ++w) {
    const auto f = FieldCtx::standard(w);
    EXPECT_TRUE(rabin_irreducible(w, f.modulus_low())) << "w=" << w;
  }
  EXPECT_EQ(FieldCtx::standard(4).modulus_low(), 0x3U);
  EXPECT_EQ(FieldCtx::standard(8).modulus_low(), 0x1bU);
  EXPECT_EQ(FieldCtx::standard(16).modulus_low(), 0x2bU);
  EXPECT_EQ(FieldCtx::standard(32).modulus_low(), 0x8dU);
  EXPECT_EQ(FieldCtx::standard(64).modulus_low(), 0x1bU);
}

TEST(Gf2x, WidthOutOfRangeRejected) {
  EXPECT_THROW(FieldCtx::standard(0), derand::ConfigError);
  EXPECT_THROW(FieldCtx::standard(65), derand::ConfigError);
}

TEST(Gf2x, SmallModulusValidation) {
  EXPECT_NO_THROW(FieldCtx::with_modulus(8, 0x1d));  // x^8+x^4+x^3+x^2+1
  EXPECT_THROW(FieldCtx::with_modulus(8, 0x01), derand::ConfigError);  // x^8+1 = (x+1)^8
  for (unsigned w = 2; w <= 10; ++w) {
    for (std::uint64_t low = 1; low < (1ULL << w); low += 2) {
      const bool expect = rabin_irreducible(w, low);
      if (expect) {
        EXPECT_NO_THROW(FieldCtx::with_modulus(w, low));
      } else {
        EXPECT_THROW(FieldCtx::with_modulus(w, low), derand::ConfigError);
      }
    }
  }
}

TEST(Gf2x, ElementRangeChecked) {
  const auto f = FieldCtx::standard(4);
  EXPECT_NO_THROW((void)f.element(15));
  EXPECT_THROW((void)f.element(16), derand::ConfigError);
}

TEST(Gf2x, BarrettMatchesSchoolbookAllWidths) {
  std::mt19937_64 rng(7);
  for (unsigned w = 1; w <= 64; ++w) {
    const auto f = FieldCtx::standard(w);
    for (int it = 0; it < 2000; ++it) {
      const std::uint64_t a = rng() & f.mask();
      const std::uint64_t b = rng() & f.mask();
      ASSERT_EQ(f.mul_raw(a, b), slow_mul(a, b, w, f.modulus_low())) << "w=" << w;
    }
    // Extremes stress the top bit of the quotient.
    ASSERT_EQ(f.mul_raw(f.mask(), f.mask()), slow_mul(f.mask(), f.mask(), w, f.modulus_low()));
  }
}

TEST(Gf2x, ClmulMatchesLoop) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 10000; ++it) {
    const std::uint64_t a = rng();
    const std::uint64_t b = rng();
    u128 ref = 0;
    for (unsigned i = 0; i < 64; ++i) {
      if ((b >> i) & 1) ref ^= u128{a} << i;
    }
    ASSERT_TRUE(gf::clmul(a, b) == ref);
  }
}

TEST(Gf2x, FieldAxiomsExhaustiveSmall) {
  for (unsigned w = 1; w <= 4; ++w) {
    const auto f = FieldCtx::standard(w);
    const std::uint64_t q = f.order();
    for (std::uint64_t a = 0; a < q; ++a) {
      for (std::uint64_t b = 0; b < q; ++b) {
        const FieldElement A{a}, B{b};
        ASSERT_EQ(gf::gf_mul(A, B, f), gf::gf_mul(B, A, f));
        for (std::uint64_t c = 0; c < q; ++c) {
          const FieldElement C{c};
          ASSERT_EQ(gf::gf_mul(A, gf::gf_add(B, C), f), gf::gf_add(gf::gf_mul(A, B, f), gf::gf_mul(A, C, f)));
          ASSERT_EQ(gf::gf_mul(gf::gf_mul(A, B, f), C, f), gf::gf_mul(A, gf::gf_mul(B, C, f), f));
        }
      }
    }
  }
}

TEST(Gf2x, InversesAndGroupOrder) {
  for (unsigned w = 1; w <= 8; ++w) {
    const auto f = FieldCtx::standard(w);
    for (std::uint64_t a = 1; a < f.order(); ++a) {
      const FieldElement A{a};
      ASSERT_EQ(gf::gf_mul(A, gf::gf_inv(A, f), f).bits, 1U);
      ASSERT_EQ(gf::gf_pow(A, f.order() - 1, f).bits, 1U);
    }
    EXPECT_THROW((void)gf::gf_inv(FieldElement{0}, f), derand::PreconditionError);
  }
}

TEST(Gf2x, PowConventions) {
  const auto f = FieldCtx::standard(8);
  EXPECT_EQ(gf::gf_pow(FieldElement{0}, 0, f).bits, 1U);
  EXPECT_EQ(gf::gf_pow(FieldElement{0}, 5, f).bits, 0U);
  for (std::uint64_t a = 0; a < 256; ++a) {
    EXPECT_EQ(gf::gf_pow(FieldElement{a}, 1, f).bits, a);
    EXPECT_EQ(gf::gf_pow(FieldElement{a}, 0, f).bits, 1U);
    std::uint64_t acc = 1;
    for (int e = 0; e < 20; ++e) {
      ASSERT_EQ(gf::gf_pow(FieldElement{a}, e, f).bits, acc);
      acc = f.mul_raw(acc, a);
    }
  }
}

TEST(Gf2x, PolyEvalExamples) {
  const auto f = FieldCtx::standard(3);
  const std::vector<FieldElement> one_one_one{FieldElement{1}, FieldElement{1}, FieldElement{1}};
  EXPECT_EQ(gf::poly_eval(one_one_one, FieldElement{0b010}, f).bits, 0b111U);
  const std::vector<FieldElement> constant{FieldElement{5}};
  const std::vector<FieldElement> identity{FieldElement{0}, FieldElement{1}};
  for (std::uint64_t x = 0; x < 8; ++x) {
    EXPECT_EQ(gf::poly_eval(constant, FieldElement{x}, f).bits, 5U);
    EXPECT_EQ(gf::poly_eval(identity, FieldElement{x}, f).bits, x);
  }
  EXPECT_THROW((void)gf::poly_eval(std::vector<FieldElement>{}, FieldElement{1}, f), derand::PreconditionError);
}

TEST(Gf2x, PolyEvalMatchesTermwiseOracle) {
  std::mt19937_64 rng(3);
  for (unsigned w : {3U, 8U, 16U, 31U, 64U}) {
    const auto f = FieldCtx::standard(w);
    for (int it = 0; it < 300; ++it) {
      const std::size_t k = 1 + rng() % 40;
      std::vector<FieldElement> coeffs(k);
      std::vector<std::uint64_t> raw(k);
      for (std::size_t i = 0; i < k; ++i) raw[i] = coeffs[i].bits = rng() & f.mask();
      const FieldElement x{rng() & f.mask()};
      FieldElement want{0};
      for (std::size_t i = 0; i < k; ++i) {
        want = gf::gf_add(want, gf::gf_mul(coeffs[i], gf::gf_pow(x, i, f), f));
      }
      ASSERT_EQ(gf::poly_eval(coeffs, x, f), want);
      ASSERT_EQ(gf::poly_eval_interleaved(raw, x.bits, f), want.bits);
    }
  }
}

}  // namespace
