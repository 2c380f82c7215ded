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
 * @file dist.hpp
 * @brief Seeded randomness sources over the ball universe.
 *
 * - KWiseSource: a random polynomial of degree k-1 over GF(2^w); outputs of
 *   any k distinct balls are jointly uniform.
 * - EpsBiasedSource: the powering construction, bit r = <x^r, y>. Every
 *   nonzero GF(2) character over n positions has bias at most n / 2^m.
 * - KWiseBiasedSource: an eps-biased string Y read through the generator
 *   rows (1, a, a^3, ..., a^(2t-1)), t = floor(k/2), of the extended
 *   dual-BCH code. Any k rows are linearly independent, so any k balls see
 *   an eps-biased joint output. When the universe is small enough the rows
 *   degenerate to unit vectors (a plain eps-biased string indexed by ball).
 * - FullRandomSource: counter-mode SplitMix64, the "perfectly random" baseline.
 *
 * All sources are immutable after construction and safe to share across threads.
 */

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "derand/error.hpp"
#include "derand/gf2x.hpp"
#include "derand/seed.hpp"

namespace derand {

/// A ball identifier from the universe U.
using Ball = std::uint64_t;

namespace dist {

using gf2x::FieldCtx;
using gf2x::FieldElement;

[[nodiscard]] constexpr std::uint64_t out_mask(unsigned bits) noexcept {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

/// Smallest width that holds every id in [0, count).
[[nodiscard]] constexpr unsigned bits_for_count(std::uint64_t count) noexcept {
  return count <= 2 ? 1U : static_cast<unsigned>(std::bit_width(count - 1));
}

// ---------------------------------------------------------------------------

class KWiseSource {
 public:
  KWiseSource(FieldCtx ctx, std::vector<FieldElement> coeffs, unsigned out_bits)
      : ctx_(ctx), out_bits_(out_bits) {
    if (coeffs.empty()) throw ConfigError("k-wise source needs k >= 1 coefficients");
    if (out_bits < 1 || out_bits > ctx.width()) {
      throw ConfigError("k-wise output width must be in [1, w]");
    }
    coeffs_.reserve(coeffs.size());
    for (auto c : coeffs) coeffs_.push_back(ctx.element(c.bits).bits);
  }

  /// Coefficients drawn from a SplitMix64 stream keyed by `seed`.
  static KWiseSource from_seed(FieldCtx ctx, unsigned k, unsigned out_bits, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<FieldElement> coeffs(k);
    for (auto& c : coeffs) c = FieldElement{rng.next() & ctx.mask()};
    return KWiseSource(ctx, std::move(coeffs), out_bits);
  }

  /// Inverse of seed_hex().
  static KWiseSource from_hex(FieldCtx ctx, unsigned k, unsigned out_bits, std::string_view hex) {
    const auto words = hex::decode_words(hex, ctx.width(), k);
    std::vector<FieldElement> coeffs;
    for (auto w : words) coeffs.push_back(ctx.element(w));
    return KWiseSource(ctx, std::move(coeffs), out_bits);
  }

  /// k coefficients, constant term first, each ceil(w/4) hex digits: k*w seed bits.
  [[nodiscard]] std::string seed_hex() const { return hex::encode_words(coeffs_, ctx_.width()); }

  [[nodiscard]] unsigned k() const noexcept { return static_cast<unsigned>(coeffs_.size()); }
  [[nodiscard]] unsigned out_bits() const noexcept { return out_bits_; }
  [[nodiscard]] const FieldCtx& ctx() const noexcept { return ctx_; }
  [[nodiscard]] std::span<const std::uint64_t> coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] std::uint64_t seed_bits() const noexcept {
    return static_cast<std::uint64_t>(coeffs_.size()) * ctx_.width();
  }

  /// Low out_bits of p(u). Balls are encoded verbatim; they must fit in w bits.
  [[nodiscard]] std::uint64_t eval(Ball u) const {
    if (!ctx_.contains(u)) {
      throw ConfigError("ball id " + std::to_string(u) + " exceeds GF(2^" +
                        std::to_string(ctx_.width()) + ") capacity");
    }
    return gf2x::poly_eval_interleaved(coeffs_, u, ctx_) & out_mask(out_bits_);
  }

  /// eval() over a span of balls.
  void eval_many(std::span<const Ball> balls, std::span<std::uint64_t> out) const {
    for (Ball u : balls) {
      if (!ctx_.contains(u)) (void)eval(u);  // throws with the offending id
    }
    gf2x::poly_eval_batch(coeffs_, balls, out, ctx_);
    const std::uint64_t mask = out_mask(out_bits_);
    for (std::size_t i = 0; i < balls.size(); ++i) out[i] &= mask;
  }

 private:
  FieldCtx ctx_;
  std::vector<std::uint64_t> coeffs_;
  unsigned out_bits_;
};

[[nodiscard]] inline std::uint64_t kwise_eval(const KWiseSource& src, Ball u) { return src.eval(u); }

// ---------------------------------------------------------------------------

class EpsBiasedSource {
 public:
  EpsBiasedSource(FieldCtx ctx, FieldElement x, FieldElement y, std::uint64_t n_positions)
      : ctx_(ctx), x_(ctx.element(x.bits)), y_(ctx.element(y.bits)), n_positions_(n_positions) {}

  static EpsBiasedSource from_seed(FieldCtx ctx, std::uint64_t n_positions, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const FieldElement x{rng.next() & ctx.mask()};
    const FieldElement y{rng.next() & ctx.mask()};
    return EpsBiasedSource(ctx, x, y, n_positions);
  }

  /// x then y, ceil(m/4) hex digits each: 2m seed bits.
  static EpsBiasedSource from_hex(FieldCtx ctx, std::uint64_t n_positions, std::string_view hex) {
    const auto w = hex::decode_words(hex, ctx.width(), 2);
    return EpsBiasedSource(ctx, FieldElement{w[0]}, FieldElement{w[1]}, n_positions);
  }

  [[nodiscard]] std::string seed_hex() const { return hex::encode_words({x_.bits, y_.bits}, ctx_.width()); }

  [[nodiscard]] const FieldCtx& ctx() const noexcept { return ctx_; }
  [[nodiscard]] FieldElement x() const noexcept { return x_; }
  [[nodiscard]] FieldElement y() const noexcept { return y_; }
  [[nodiscard]] std::uint64_t n_positions() const noexcept { return n_positions_; }
  [[nodiscard]] std::uint64_t seed_bits() const noexcept { return 2ULL * ctx_.width(); }

  /// Guaranteed bias n_positions / 2^m (may exceed 1, in which case it says nothing).
  [[nodiscard]] double bias_bound() const noexcept {
    return std::ldexp(static_cast<double>(n_positions_), -static_cast<int>(ctx_.width()));
  }
  [[nodiscard]] double bias_bound_log2() const noexcept {
    return std::log2(static_cast<double>(std::max<std::uint64_t>(n_positions_, 1))) -
           static_cast<double>(ctx_.width());
  }

  /// <x^r, y> over GF(2).
  [[nodiscard]] bool bit(std::uint64_t r) const {
    if (r >= n_positions_) {
      throw PreconditionError("position " + std::to_string(r) + " out of range (n_positions = " +
                              std::to_string(n_positions_) + ")");
    }
    return (std::popcount(gf2x::gf_pow(x_, r, ctx_).bits & y_.bits) & 1) != 0;
  }

  /// Bits [0, count) packed little-endian into 64-bit words. Four interleaved
  /// power chains keep the multiplier busy.
  [[nodiscard]] std::vector<std::uint64_t> materialize(std::uint64_t count) const {
    if (count > n_positions_) throw PreconditionError("materialize beyond n_positions");
    std::vector<std::uint64_t> words((count + 63) / 64, 0);
    const std::uint64_t y = y_.bits;
    std::array<std::uint64_t, 4> p{1, x_.bits, ctx_.mul_raw(x_.bits, x_.bits), 0};
    p[3] = ctx_.mul_raw(p[2], x_.bits);
    const std::uint64_t x4 = ctx_.mul_raw(p[2], p[2]);
    std::uint64_t r = 0;
    for (; r + 4 <= count; r += 4) {
      std::uint64_t nib = 0;
      for (unsigned c = 0; c < 4; ++c) {
        nib |= static_cast<std::uint64_t>(std::popcount(p[c] & y) & 1) << c;
        p[c] = ctx_.mul_raw(p[c], x4);
      }
      words[r >> 6] |= nib << (r & 63);  // r % 4 == 0, so the nibble never straddles words
    }
    for (unsigned c = 0; r < count; ++r, ++c) {
      words[r >> 6] |= static_cast<std::uint64_t>(std::popcount(p[c] & y) & 1) << (r & 63);
    }
    return words;
  }

 private:
  FieldCtx ctx_;
  FieldElement x_;
  FieldElement y_;
  std::uint64_t n_positions_;
};

[[nodiscard]] inline bool eps_bit(const EpsBiasedSource& src, std::uint64_t r) { return src.bit(r); }

// ---------------------------------------------------------------------------

enum class RowMode { dual_bch, identity };

[[nodiscard]] inline std::string to_string(RowMode m) { return m == RowMode::dual_bch ? "dual-bch" : "identity"; }

class KWiseBiasedSource {
 public:
  /// Identity rows are only materialized for universes up to 2^kMaxIdentityBits.
  static constexpr unsigned kMaxIdentityBits = 26;

  /// Half-degree t of the generator rows: rows have 1 + t*s bits.
  [[nodiscard]] static constexpr std::uint64_t half_wise(std::uint64_t k) noexcept { return k / 2; }

  /// Identity rows when they are no longer than the dual-BCH rows and fit in memory.
  [[nodiscard]] static RowMode choose_mode(std::uint64_t k, unsigned code_width) noexcept {
    if (code_width > kMaxIdentityBits) return RowMode::dual_bch;
    const std::uint64_t universe = std::uint64_t{1} << code_width;
    const std::uint64_t t = half_wise(k);
    // 1 + t*s >= 2^s, written to avoid overflow for huge k.
    const bool bch_longer = t >= (universe - 1 + code_width - 1) / code_width;
    return bch_longer ? RowMode::identity : RowMode::dual_bch;
  }

  /// Inner positions consumed for the given shape.
  [[nodiscard]] static std::uint64_t positions_needed(std::uint64_t k, unsigned code_width, unsigned out_bits,
                                                      RowMode mode) {
    if (mode == RowMode::identity) return (std::uint64_t{1} << code_width) * out_bits;
    return (1 + half_wise(k) * code_width) * out_bits;
  }

  KWiseBiasedSource(std::uint64_t k, EpsBiasedSource inner, FieldCtx code_ctx, unsigned out_bits, RowMode mode)
      : k_(k), inner_(std::move(inner)), code_ctx_(code_ctx), out_bits_(out_bits), mode_(mode) {
    if (k < 1) throw ConfigError("k-wise biased source needs k >= 1");
    if (out_bits < 1 || out_bits > 64) throw ConfigError("output width must be in [1, 64]");
    if (mode == RowMode::identity && code_ctx.width() > kMaxIdentityBits) {
      throw ConfigError("identity rows need a universe of at most 2^" + std::to_string(kMaxIdentityBits));
    }
    if (mode == RowMode::dual_bch && half_wise(k) > (std::uint64_t{1} << 24)) {
      throw ConfigError("dual-BCH rows longer than 2^24 field elements");
    }
    const std::uint64_t need = positions_needed(k, code_ctx.width(), out_bits, mode);
    if (need > inner_.n_positions()) {
      throw ConfigError("configuration needs " + std::to_string(need) + " inner positions, source has " +
                        std::to_string(inner_.n_positions()));
    }
    bits_ = inner_.materialize(need);
    if (mode == RowMode::dual_bch) unpack_chunks();
  }

  static KWiseBiasedSource from_seed(std::uint64_t k, FieldCtx inner_ctx, FieldCtx code_ctx, unsigned out_bits,
                                     std::uint64_t seed) {
    const RowMode mode = choose_mode(k, code_ctx.width());
    const std::uint64_t need = positions_needed(k, code_ctx.width(), out_bits, mode);
    return KWiseBiasedSource(k, EpsBiasedSource::from_seed(inner_ctx, need, seed), code_ctx, out_bits, mode);
  }

  [[nodiscard]] std::uint64_t k() const noexcept { return k_; }
  [[nodiscard]] unsigned out_bits() const noexcept { return out_bits_; }
  [[nodiscard]] RowMode mode() const noexcept { return mode_; }
  [[nodiscard]] const EpsBiasedSource& inner() const noexcept { return inner_; }
  [[nodiscard]] const FieldCtx& code_ctx() const noexcept { return code_ctx_; }
  [[nodiscard]] std::uint64_t seed_bits() const noexcept { return inner_.seed_bits(); }
  [[nodiscard]] std::string seed_hex() const { return inner_.seed_hex(); }
  [[nodiscard]] std::uint64_t row_length() const noexcept {
    return mode_ == RowMode::identity ? (std::uint64_t{1} << code_ctx_.width())
                                      : 1 + half_wise(k_) * code_ctx_.width();
  }
  [[nodiscard]] std::uint64_t positions_used() const noexcept { return row_length() * out_bits_; }

  /// out_bits output bits of ball u; bit j is the parity of row(u) against block j of Y.
  [[nodiscard]] std::uint64_t eval(Ball u) const {
    if (!code_ctx_.contains(u)) {
      throw ConfigError("ball id " + std::to_string(u) + " exceeds the code field GF(2^" +
                        std::to_string(code_ctx_.width()) + ")");
    }
    if (mode_ == RowMode::identity) return read_bits(u * out_bits_, out_bits_);
    return eval_bch(u);
  }

  /// eval() over a span of balls; dual-BCH rows are walked for several balls at once.
  void eval_many(std::span<const Ball> balls, std::span<std::uint64_t> out) const {
    std::size_t b = 0;
    if (mode_ == RowMode::dual_bch) {
      for (Ball u : balls) {
        if (!code_ctx_.contains(u)) (void)eval(u);
      }
      for (; b + gf2x::kBatchLanes <= balls.size(); b += gf2x::kBatchLanes) {
        eval_bch_lanes(balls.data() + b, out.data() + b);
      }
    }
    for (; b < balls.size(); ++b) out[b] = eval(balls[b]);
  }

  /// Inner positions whose XOR gives output bit j of ball u (the GF(2) linear form).
  [[nodiscard]] std::vector<std::uint64_t> linear_form(Ball u, unsigned j) const {
    if (!code_ctx_.contains(u) || j >= out_bits_) throw PreconditionError("linear_form out of range");
    if (mode_ == RowMode::identity) return {u * out_bits_ + j};
    const std::uint64_t base = j * row_length();
    std::vector<std::uint64_t> pos{base};
    const unsigned s = code_ctx_.width();
    const std::uint64_t a2 = code_ctx_.mul_raw(u, u);
    std::uint64_t p = u;
    for (std::uint64_t i = 0; i < half_wise(k_); ++i) {
      for (unsigned b = 0; b < s; ++b) {
        if ((p >> b) & 1U) pos.push_back(base + 1 + i * s + b);
      }
      p = code_ctx_.mul_raw(p, a2);
    }
    return pos;
  }

 private:
  [[nodiscard]] bool read_bit(std::uint64_t pos) const noexcept { return (bits_[pos >> 6] >> (pos & 63)) & 1U; }

  [[nodiscard]] std::uint64_t read_bits(std::uint64_t pos, unsigned len) const noexcept {
    const std::uint64_t word = pos >> 6;
    const unsigned off = pos & 63;
    std::uint64_t v = bits_[word] >> off;
    if (off + len > 64 && word + 1 < bits_.size()) v |= bits_[word + 1] << (64 - off);
    return v & out_mask(len);
  }

  // Block j of Y, re-aligned so that bit r of the copy is Y[j * row_length() + r].
  void unpack_chunks() {
    const std::uint64_t len = row_length();
    row_words_ = static_cast<std::size_t>((len + 63) / 64);
    blocks_.assign(row_words_ * out_bits_, 0);
    for (unsigned j = 0; j < out_bits_; ++j) {
      const std::uint64_t base = j * len;
      for (std::size_t w = 0; w < row_words_; ++w) {
        const std::uint64_t take = std::min<std::uint64_t>(64, len - 64 * w);
        blocks_[j * row_words_ + w] = read_bits(base + 64 * w, static_cast<unsigned>(take));
      }
    }
  }

  // Writes the packed row (1, a, a^3, ..., a^(2t-1)) given the odd powers.
  void pack_row(const std::uint64_t* powers, std::uint64_t* row) const noexcept {
    const unsigned s = code_ctx_.width();
    std::fill(row, row + row_words_, 0);
    row[0] = 1;
    std::uint64_t pos = 1;
    for (std::uint64_t i = 0; i < half_wise(k_); ++i, pos += s) {
      const std::size_t w = pos >> 6;
      const unsigned off = pos & 63;
      row[w] |= powers[i] << off;
      if (off + s > 64) row[w + 1] |= powers[i] >> (64 - off);
    }
  }

  [[nodiscard]] std::uint64_t dot_blocks(const std::uint64_t* row) const noexcept {
    std::uint64_t out = 0;
    for (unsigned j = 0; j < out_bits_; ++j) {
      const std::uint64_t* blk = blocks_.data() + j * row_words_;
      std::uint64_t x = 0;
      for (std::size_t w = 0; w < row_words_; ++w) x ^= row[w] & blk[w];
      out |= static_cast<std::uint64_t>(std::popcount(x) & 1) << j;
    }
    return out;
  }

  // One ball: odd powers from four chains stepping by a^8.
  [[nodiscard]] std::uint64_t eval_bch(std::uint64_t a) const {
    const std::uint64_t t = half_wise(k_);
    const FieldCtx& f = code_ctx_;
    thread_local std::vector<std::uint64_t> scratch;
    scratch.resize(t + row_words_ + 4);
    std::uint64_t* pw = scratch.data();
    std::uint64_t* row = pw + t + 4;
    const std::uint64_t a2 = f.mul_raw(a, a);
    const std::uint64_t a4 = f.mul_raw(a2, a2);
    const std::uint64_t a8 = f.mul_raw(a4, a4);
    std::array<std::uint64_t, 4> p{a, f.mul_raw(a, a2), 0, 0};
    p[2] = f.mul_raw(p[1], a2);
    p[3] = f.mul_raw(p[2], a2);
    for (std::uint64_t i = 0; i < t; i += 4) {
      for (unsigned c = 0; c < 4; ++c) {
        pw[i + c] = p[c];
        p[c] = f.mul_raw(p[c], a8);
      }
    }
    pack_row(pw, row);
    return dot_blocks(row);
  }

  // kBatchLanes balls at once; each lane is an independent power chain.
  void eval_bch_lanes(const Ball* a, std::uint64_t* out) const {
    constexpr std::size_t kLanes = gf2x::kBatchLanes;
    const std::uint64_t t = half_wise(k_);
    const FieldCtx& f = code_ctx_;
    thread_local std::vector<std::uint64_t> scratch;
    scratch.resize(kLanes * t + row_words_);
    std::uint64_t* row = scratch.data() + kLanes * t;
    std::array<std::uint64_t, kLanes> p{};
    std::array<std::uint64_t, kLanes> a2{};
    for (std::size_t l = 0; l < kLanes; ++l) {
      p[l] = a[l];
      a2[l] = f.mul_raw(a[l], a[l]);
    }
    for (std::uint64_t i = 0; i < t; ++i) {
      for (std::size_t l = 0; l < kLanes; ++l) {
        scratch[l * t + i] = p[l];
        p[l] = f.mul_raw(p[l], a2[l]);
      }
    }
    for (std::size_t l = 0; l < kLanes; ++l) {
      pack_row(scratch.data() + l * t, row);
      out[l] = dot_blocks(row);
    }
  }

  std::uint64_t k_;
  EpsBiasedSource inner_;
  FieldCtx code_ctx_;
  unsigned out_bits_;
  RowMode mode_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> blocks_;  // out_bits blocks of row_words_ words each
  std::size_t row_words_ = 0;
};

[[nodiscard]] inline std::uint64_t kwise_biased_eval(const KWiseBiasedSource& src, Ball u) { return src.eval(u); }

// ---------------------------------------------------------------------------

class FullRandomSource {
 public:
  FullRandomSource(std::uint64_t seed, unsigned out_bits) : seed_(seed), key_(mix64(seed)), out_bits_(out_bits) {
    if (out_bits < 1 || out_bits > 64) throw ConfigError("output width must be in [1, 64]");
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] unsigned out_bits() const noexcept { return out_bits_; }
  [[nodiscard]] std::uint64_t seed_bits() const noexcept { return 64; }
  [[nodiscard]] std::string seed_hex() const { return hex::encode_word(seed_, 16); }
  static FullRandomSource from_hex(std::string_view hex, unsigned out_bits) {
    return FullRandomSource(hex::decode_word(hex), out_bits);
  }

  /// Keyed counter hash of the ball id; independent of evaluation order.
  [[nodiscard]] std::uint64_t eval(Ball u) const noexcept {
    return mix64(key_ ^ mix64(u ^ 0xd1b54a32d192ed03ULL)) & out_mask(out_bits_);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  unsigned out_bits_;
};

// ---------------------------------------------------------------------------
// Exhaustive seed spaces. Each maps a seed index in [0, size()) to one
// outcome: the joint output bits of a source on a fixed input list,
// concatenated with the first input in the low bits.

template <typename S>
concept SeedSpace = requires(const S& s, std::uint64_t seed) {
  { s.size() } -> std::convertible_to<std::uint64_t>;
  { s.inputs() } -> std::convertible_to<std::uint64_t>;
  { s.outcome_bits() } -> std::convertible_to<unsigned>;
  { s.outcome(seed) } -> std::convertible_to<std::uint64_t>;
};

/// Every coefficient vector of a k-wise source.
class KWiseSeedSpace {
 public:
  KWiseSeedSpace(FieldCtx ctx, unsigned k, unsigned out_bits, std::vector<Ball> balls)
      : ctx_(ctx), k_(k), out_bits_(out_bits), balls_(std::move(balls)) {
    if (static_cast<std::uint64_t>(k) * ctx.width() >= 63) throw BudgetExceeded("k-wise seed space too large");
  }
  [[nodiscard]] std::uint64_t size() const noexcept { return std::uint64_t{1} << (k_ * ctx_.width()); }
  [[nodiscard]] std::uint64_t inputs() const noexcept { return balls_.size(); }
  [[nodiscard]] unsigned outcome_bits() const noexcept { return out_bits_ * static_cast<unsigned>(balls_.size()); }
  [[nodiscard]] std::uint64_t outcome(std::uint64_t seed) const {
    std::vector<FieldElement> coeffs(k_);
    for (unsigned i = 0; i < k_; ++i) coeffs[i] = FieldElement{(seed >> (i * ctx_.width())) & ctx_.mask()};
    const KWiseSource src(ctx_, std::move(coeffs), out_bits_);
    std::uint64_t out = 0;
    for (std::size_t b = 0; b < balls_.size(); ++b) out |= src.eval(balls_[b]) << (b * out_bits_);
    return out;
  }

 private:
  FieldCtx ctx_;
  unsigned k_;
  unsigned out_bits_;
  std::vector<Ball> balls_;
};

/// Every (x, y) seed of the powering construction, read at chosen positions.
class EpsBiasedSeedSpace {
 public:
  EpsBiasedSeedSpace(FieldCtx ctx, std::vector<std::uint64_t> positions)
      : ctx_(ctx), positions_(std::move(positions)) {
    if (2 * ctx.width() >= 63) throw BudgetExceeded("eps-biased seed space too large");
  }
  [[nodiscard]] std::uint64_t size() const noexcept { return std::uint64_t{1} << (2 * ctx_.width()); }
  [[nodiscard]] std::uint64_t inputs() const noexcept { return positions_.size(); }
  [[nodiscard]] unsigned outcome_bits() const noexcept { return static_cast<unsigned>(positions_.size()); }
  [[nodiscard]] std::uint64_t outcome(std::uint64_t seed) const {
    const FieldElement x{seed & ctx_.mask()};
    const FieldElement y{seed >> ctx_.width()};
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      const auto xr = gf2x::gf_pow(x, positions_[i], ctx_);
      out |= static_cast<std::uint64_t>(std::popcount(xr.bits & y.bits) & 1) << i;
    }
    return out;
  }

 private:
  FieldCtx ctx_;
  std::vector<std::uint64_t> positions_;
};

/// Every inner seed of a k-wise biased source, evaluated on a ball list.
class KWiseBiasedSeedSpace {
 public:
  KWiseBiasedSeedSpace(std::uint64_t k, FieldCtx inner_ctx, FieldCtx code_ctx, unsigned out_bits,
                       std::vector<Ball> balls, RowMode mode)
      : k_(k), inner_(inner_ctx), code_(code_ctx), out_bits_(out_bits), mode_(mode), balls_(std::move(balls)) {
    if (2 * inner_ctx.width() >= 63) throw BudgetExceeded("k-wise biased seed space too large");
  }
  [[nodiscard]] std::uint64_t size() const noexcept { return std::uint64_t{1} << (2 * inner_.width()); }
  [[nodiscard]] std::uint64_t inputs() const noexcept { return balls_.size(); }
  [[nodiscard]] unsigned outcome_bits() const noexcept { return out_bits_ * static_cast<unsigned>(balls_.size()); }
  [[nodiscard]] std::uint64_t positions() const {
    return KWiseBiasedSource::positions_needed(k_, code_.width(), out_bits_, mode_);
  }
  [[nodiscard]] std::uint64_t outcome(std::uint64_t seed) const {
    const EpsBiasedSource eps(inner_, FieldElement{seed & inner_.mask()}, FieldElement{seed >> inner_.width()},
                              positions());
    const KWiseBiasedSource src(k_, eps, code_, out_bits_, mode_);
    std::uint64_t out = 0;
    for (std::size_t b = 0; b < balls_.size(); ++b) out |= src.eval(balls_[b]) << (b * out_bits_);
    return out;
  }

 private:
  std::uint64_t k_;
  FieldCtx inner_;
  FieldCtx code_;
  unsigned out_bits_;
  RowMode mode_;
  std::vector<Ball> balls_;
};

/// The ideal source: enumerates every assignment of outputs to the inputs.
class UniformSeedSpace {
 public:
  UniformSeedSpace(unsigned out_bits, std::uint64_t inputs) : out_bits_(out_bits), inputs_(inputs) {
    if (out_bits * inputs >= 63) throw BudgetExceeded("uniform seed space too large");
  }
  [[nodiscard]] std::uint64_t size() const noexcept { return std::uint64_t{1} << outcome_bits(); }
  [[nodiscard]] std::uint64_t inputs() const noexcept { return inputs_; }
  [[nodiscard]] unsigned outcome_bits() const noexcept { return static_cast<unsigned>(out_bits_ * inputs_); }
  [[nodiscard]] std::uint64_t outcome(std::uint64_t seed) const noexcept { return seed; }

 private:
  unsigned out_bits_;
  std::uint64_t inputs_;
};

/// A single seed with a fixed outcome.
class ConstantSeedSpace {
 public:
  ConstantSeedSpace(unsigned bits, std::uint64_t value) : bits_(bits), value_(value & out_mask(bits)) {}
  [[nodiscard]] std::uint64_t size() const noexcept { return 1; }
  [[nodiscard]] std::uint64_t inputs() const noexcept { return bits_; }
  [[nodiscard]] unsigned outcome_bits() const noexcept { return bits_; }
  [[nodiscard]] std::uint64_t outcome(std::uint64_t) const noexcept { return value_; }

 private:
  unsigned bits_;
  std::uint64_t value_;
};

/// Default enumeration budget for the exhaustive oracles, in seed x input evaluations.
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 30;
/// Largest joint outcome space the oracles will histogram.
inline constexpr unsigned kMaxOutcomeBits = 24;

/// Histogram of outcomes over the whole seed space.
template <SeedSpace S>
[[nodiscard]] std::vector<std::uint64_t> outcome_histogram(const S& space, std::uint64_t budget) {
  const std::uint64_t seeds = space.size();
  const std::uint64_t inputs = std::max<std::uint64_t>(space.inputs(), 1);
  if (space.outcome_bits() > kMaxOutcomeBits) {
    throw BudgetExceeded("outcome space 2^" + std::to_string(space.outcome_bits()) + " too large to histogram");
  }
  if (seeds > budget / inputs) {
    throw BudgetExceeded("enumeration of " + std::to_string(seeds) + " seeds x " + std::to_string(inputs) +
                         " inputs exceeds budget " + std::to_string(budget));
  }
  std::vector<std::uint64_t> hist(std::size_t{1} << space.outcome_bits(), 0);
  for (std::uint64_t s = 0; s < seeds; ++s) ++hist[space.outcome(s)];
  return hist;
}

/// Exact L1 distance between the induced joint distribution and uniform. Refuses
/// (BudgetExceeded) rather than sampling when enumeration is too large.
template <SeedSpace S>
[[nodiscard]] double sd_to_uniform(const S& space, std::uint64_t budget = kDefaultBudget) {
  const auto hist = outcome_histogram(space, budget);
  const std::uint64_t seeds = space.size();
  const std::uint64_t cells = hist.size();
  // sum |c/N - 1/C| = sum |c*C - N| / (N*C), accumulated in integers.
  gf2x::u128 num = 0;
  for (auto c : hist) {
    const gf2x::u128 lhs = static_cast<gf2x::u128>(c) * cells;
    num += lhs > seeds ? lhs - seeds : seeds - lhs;
  }
  return static_cast<double>(num) / (static_cast<double>(seeds) * static_cast<double>(cells));
}

}  // namespace dist
}  // namespace derand
