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
 * @file family.hpp
 * @brief The composed hash h(x) = (h_1(x) o ... o h_k(x) o h_{k+1}(x)) XOR g(x).
 *
 * h_1 occupies the most significant bits. Each h_i reads a k_i-wise
 * small-bias source, g is a k_g-wise independent polynomial, and the
 * heavy-load variant drops g. Parameters follow the Uniform-Greedy,
 * Always-Go-Left and heavy-load regimes; see derive_params().
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "derand/asym.hpp"
#include "derand/dist.hpp"
#include "derand/error.hpp"
#include "derand/gf2x.hpp"
#include "derand/seed.hpp"

namespace derand::family {

using dist::KWiseBiasedSource;
using dist::KWiseSource;
using dist::RowMode;
using gf2x::FieldCtx;

enum class FamilyMode { uniform_greedy, always_go_left, heavy_load };

[[nodiscard]] inline std::string to_string(FamilyMode m) {
  switch (m) {
    case FamilyMode::uniform_greedy: return "uniform-greedy";
    case FamilyMode::always_go_left: return "always-go-left";
    case FamilyMode::heavy_load: return "heavy-load";
  }
  return "?";
}

/// Per-level shape of one small-bias source.
struct LevelSpec {
  unsigned bits = 0;            ///< output width b_i
  std::uint64_t wise = 0;       ///< k_i (balls), already clamped to the universe
  RowMode row_mode = RowMode::dual_bch;
  unsigned inner_width = 64;    ///< field width m of the powering construction
  std::uint64_t positions = 0;  ///< inner string length consumed
  double bias_log2 = 0;         ///< achieved log2 delta = log2(positions) - inner_width
};

struct DeriveOptions {
  std::optional<std::uint64_t> kg_override;
  /// Wise-ness budget of each prefix level, in output bits; k_i = budget / b_i.
  /// Unset means 4 log^2 n.
  std::optional<double> wise_bits;
  /// Requested -log2 of delta_1 / delta_2. Unset means the values the analysis asks for.
  std::optional<double> delta1_bits;
  std::optional<double> delta2_bits;
};

struct FamilyParams {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  unsigned d = 1;
  double c = 2;
  double a = 1;  ///< heavy-load exponent, m <= n log^a n
  FamilyMode mode = FamilyMode::uniform_greedy;

  unsigned log2n = 0;
  unsigned k = 1;
  std::uint64_t k_g = 0;
  bool kg_overridden = false;
  std::vector<unsigned> level_bits;  ///< b_1 .. b_{k+1}
  unsigned group_bits = 0;           ///< width T of one choice's local output
  std::uint64_t group_size = 0;      ///< bins per choice range (n in symmetric modes)
  bool reduced = false;              ///< Go-Left with d not a power of two
  unsigned universe_bits = 1;        ///< ball ids are < 2^universe_bits
  unsigned g_width = 0;              ///< field width of g (0: no g)

  double wise_bits = 0;
  std::vector<LevelSpec> levels;  ///< k+1 entries

  double delta1_log2_target = 0;
  double delta2_log2_target = 0;

  // Tree shape the suffix wise-ness is sized for.
  std::uint64_t tree_height = 0;  ///< l
  std::uint64_t leaf_height = 0;  ///< b
  std::uint64_t suffix_wise_target = 0;

  [[nodiscard]] unsigned suffix_bits() const { return level_bits.back(); }
  [[nodiscard]] unsigned prefix_bits() const { return group_bits - suffix_bits(); }
  [[nodiscard]] double delta1_log2() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (unsigned i = 0; i < k; ++i) worst = std::max(worst, levels[i].bias_log2);
    return worst;
  }
  [[nodiscard]] double delta2_log2() const { return levels.back().bias_log2; }

  [[nodiscard]] std::uint64_t level_seed_bits() const {
    std::uint64_t s = 0;
    for (const auto& lv : levels) s += 2ULL * lv.inner_width;
    return s;
  }
  [[nodiscard]] std::uint64_t g_seed_bits() const { return k_g * g_width; }
  /// Random bits of one choice function.
  [[nodiscard]] std::uint64_t seed_bits() const { return level_seed_bits() + g_seed_bits(); }
  /// seed_bits / (log n log log n).
  [[nodiscard]] double kappa() const {
    const double L = log2n;
    const double denom = L * std::max(1.0, std::log2(L));
    return static_cast<double>(seed_bits()) / denom;
  }
  /// The 2^{b_{k+1}} vs log^3 n comparison the level rounding affects.
  [[nodiscard]] double ideal_suffix_domain() const { return std::pow(static_cast<double>(log2n), 3.0); }
};

namespace detail {

[[nodiscard]] inline bool is_pow2(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

[[nodiscard]] inline double log_base(double base, double x) { return std::log2(x) / std::log2(base); }

[[nodiscard]] inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

[[nodiscard]] inline std::uint64_t sat_pow(std::uint64_t base, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r = sat_mul(r, base);
  return r;
}

/// Inner field width for a source of `positions` bits and a bias target of 2^-bits.
[[nodiscard]] inline unsigned inner_width_for(double bits, std::uint64_t positions) {
  const double need = std::ceil(bits + std::log2(static_cast<double>(std::max<std::uint64_t>(positions, 1))));
  return static_cast<unsigned>(std::clamp(need, 1.0, 64.0));
}

/// Dual-BCH rows beyond this wise-ness cost more per evaluation than a desk
/// run can afford; larger targets are capped and the cap is visible in LevelSpec::wise.
inline constexpr std::uint64_t kMaxDualBchWise = std::uint64_t{1} << 13;

[[nodiscard]] inline LevelSpec make_level(unsigned bits, std::uint64_t wise, unsigned universe_bits,
                                          double bias_bits) {
  LevelSpec lv;
  lv.bits = bits;
  // More than |U|-wise is meaningless; the clamp keeps dual-BCH rows finite.
  lv.wise = std::clamp<std::uint64_t>(wise, 1, std::uint64_t{1} << std::min(universe_bits, 63U));
  lv.row_mode = KWiseBiasedSource::choose_mode(lv.wise, universe_bits);
  if (lv.row_mode == RowMode::dual_bch) lv.wise = std::min(lv.wise, kMaxDualBchWise);
  lv.positions = KWiseBiasedSource::positions_needed(lv.wise, universe_bits, bits, lv.row_mode);
  lv.inner_width = inner_width_for(bias_bits, lv.positions);
  lv.bias_log2 = std::log2(static_cast<double>(lv.positions)) - lv.inner_width;
  return lv;
}

}  // namespace detail

/// Parameters for n bins, m balls (ids 0..m-1), d choices and failure exponent c.
[[nodiscard]] inline FamilyParams derive_params(std::uint64_t n, std::uint64_t m, unsigned d, double c,
                                                FamilyMode mode, double a = 1, const DeriveOptions& opt = {}) {
  using detail::log_base;
  if (!detail::is_pow2(n) || n < 4) throw ParameterError("n must be a power of two >= 4");
  if (n > (std::uint64_t{1} << 32)) throw ParameterError("n above 2^32 is not supported");
  if (!(c > 0)) throw ParameterError("c must be positive");
  if (mode == FamilyMode::heavy_load) {
    if (d != 1) throw ParameterError("heavy-load mode is a one-choice scheme (d = 1)");
    if (!(a >= 1)) throw ParameterError("heavy-load exponent a must be >= 1");
  } else if (d < 2) {
    throw ParameterError("multiple-choice modes need d >= 2");
  }

  FamilyParams p;
  p.n = n;
  p.m = m;
  p.d = d;
  p.c = c;
  p.a = a;
  p.mode = mode;
  const unsigned L = static_cast<unsigned>(std::countr_zero(n));
  p.log2n = L;
  const double Ld = L;
  const double logL = std::log2(Ld);

  if (mode == FamilyMode::heavy_load) {
    const double cap = static_cast<double>(n) * std::pow(static_cast<double>(L), a);
    if (static_cast<double>(m) > cap) {
      throw ParameterError("heavy-load mode accepts m <= n log^a n");
    }
  } else if (m > 64 * n) {
    throw ParameterError("m must be at most 64 n in multiple-choice modes");
  }

  // Width of one choice's output.
  p.group_bits = L;
  p.group_size = n;
  if (mode == FamilyMode::always_go_left) {
    if (d > n) throw ParameterError("more groups than bins");
    p.group_size = n / d;
    if (detail::is_pow2(d)) {
      p.group_bits = L - static_cast<unsigned>(std::countr_zero(std::uint64_t{d}));
    } else {
      p.reduced = true;  // map a full L-bit value into [n/d] by range reduction
    }
  }

  // Number of prefix levels.
  const double denom = (mode == FamilyMode::heavy_load ? 2.0 * a : 3.0) * logL;
  const double raw_k = denom > 0 ? std::floor(std::log2(L / denom)) : 1.0;
  p.k = static_cast<unsigned>(std::max(1.0, std::isfinite(raw_k) ? raw_k : 1.0));

  std::uint64_t used = 0;
  for (unsigned i = 1; i <= p.k; ++i) {
    const unsigned b = static_cast<unsigned>((L + (1ULL << i) - 1) >> i);  // ceil(L / 2^i)
    p.level_bits.push_back(b);
    used += b;
  }
  if (used >= p.group_bits) {
    throw ParameterError("n = 2^" + std::to_string(L) + " too small to split into " + std::to_string(p.k) +
                         " levels plus a suffix");
  }
  p.level_bits.push_back(p.group_bits - static_cast<unsigned>(used));

  p.universe_bits = dist::bits_for_count(std::max<std::uint64_t>(m, 1));
  const double lm = std::log2(static_cast<double>(std::max<std::uint64_t>(m, 4)));
  const double dd = d;

  // Tree shape, g's wise-ness and the suffix wise-ness t.
  std::uint64_t kg = 0;
  std::uint64_t suffix_wise = 0;
  if (mode == FamilyMode::uniform_greedy) {
    const double inner = log_base(dd, lm) + log_base(dd, 2 + 2 * c) + 5 + 3 * c;
    kg = static_cast<std::uint64_t>(std::ceil(10 * c * inner));
    p.tree_height = static_cast<std::uint64_t>(std::ceil(inner));
    p.leaf_height = static_cast<std::uint64_t>(std::ceil(10 * dd * static_cast<double>(m) / n + 1));
    suffix_wise = detail::sat_mul(5 * p.leaf_height, detail::sat_pow(d, p.tree_height + 2));
  } else if (mode == FamilyMode::always_go_left) {
    const auto shape = asym::AsymShape::fit(d, std::min(30U, asym::max_exact_height(d)));
    const double target = 10 * (2 + 2 * c) * lm;
    std::uint64_t l = 0;
    while (shape.c0 * std::pow(shape.phi_d, static_cast<double>(l * d)) < target) ++l;
    p.tree_height = l;
    p.leaf_height = static_cast<std::uint64_t>(std::ceil(10 * dd * static_cast<double>(m) / n + 1));
    const auto c3 = static_cast<std::uint64_t>(std::ceil(3 * c));
    kg = static_cast<std::uint64_t>(std::ceil(20 * c * dd * static_cast<double>(l + p.leaf_height + 1 + c3)));
    const auto f = asym::asym_size_saturating(d, static_cast<unsigned>(l + c3 + 1), 1);
    suffix_wise = detail::sat_mul(detail::sat_mul(5 * p.leaf_height, d), f);
  } else {
    // The heavy-load suffix is a plain small-bias space over the whole universe.
    suffix_wise = std::numeric_limits<std::uint64_t>::max();
  }
  p.suffix_wise_target = suffix_wise;

  if (mode != FamilyMode::heavy_load) {
    p.k_g = kg;
    if (opt.kg_override) {
      if (*opt.kg_override < 1) throw ParameterError("k_g override must be >= 1");
      p.k_g = *opt.kg_override;
      p.kg_overridden = true;
    }
    p.g_width = std::max(p.universe_bits, p.group_bits);
  } else if (opt.kg_override) {
    throw ParameterError("heavy-load mode has no g to override");
  }

  // Bias targets: delta_1 = n^-(9 beta + c + 2) with beta = 40(c + 2) (heavy load:
  // n^-(6 beta + c + 2), beta = 8(c + 2)); delta_2 = (log n)^(-C log n), C = 6(c + 2)
  // (heavy load: (log n)^(-5 a b), b = 16 (c + 2)^2 log n).
  if (mode == FamilyMode::heavy_load) {
    const double beta = 8 * (c + 2);
    p.delta1_log2_target = -Ld * (6 * beta + c + 2);
    const double b = 16 * (c + 2) * (c + 2) * Ld;
    p.delta2_log2_target = -5 * a * b * logL;
  } else {
    const double beta = 40 * (c + 2);
    p.delta1_log2_target = -Ld * (9 * beta + c + 2);
    p.delta2_log2_target = -6 * (c + 2) * Ld * logL;
  }
  const double d1_bits = opt.delta1_bits.value_or(-p.delta1_log2_target);
  const double d2_bits = opt.delta2_bits.value_or(-p.delta2_log2_target);
  if (!(d1_bits > 0) || !(d2_bits > 0)) throw ParameterError("bias exponents must be positive");

  p.wise_bits = opt.wise_bits.value_or(4.0 * Ld * Ld);
  if (!(p.wise_bits >= 1)) throw ParameterError("wise-ness budget must be >= 1 bit");
  for (unsigned i = 0; i < p.k; ++i) {
    const auto wise = static_cast<std::uint64_t>(std::max(1.0, std::floor(p.wise_bits / p.level_bits[i])));
    p.levels.push_back(detail::make_level(p.level_bits[i], wise, p.universe_bits, d1_bits));
  }
  p.levels.push_back(detail::make_level(p.level_bits.back(), suffix_wise, p.universe_bits, d2_bits));
  return p;
}

// ---------------------------------------------------------------------------

/// Where choice j's local T-bit value lands among the n bins.
struct Placement {
  unsigned bits = 0;
  std::uint64_t size = 0;
  std::uint64_t offset = 0;
  bool reduced = false;

  [[nodiscard]] static Placement of(const FamilyParams& p, unsigned choice) {
    if (p.mode == FamilyMode::always_go_left && choice >= p.d) throw ConfigError("choice index out of range");
    return Placement{p.group_bits, p.group_size, p.mode == FamilyMode::always_go_left ? choice * p.group_size : 0,
                     p.reduced};
  }

  [[nodiscard]] std::uint64_t operator()(std::uint64_t local) const noexcept {
    if (!reduced) return offset + local;
    return offset + static_cast<std::uint64_t>((static_cast<gf2x::u128>(local) * size) >> bits);
  }
};

/// One choice function h^(j).
class ComposedHash {
 public:
  /// Sources built from a per-choice seed: level i uses derive_seed(seed, i), g uses derive_seed(seed, k + 1).
  ComposedHash(std::shared_ptr<const FamilyParams> params, unsigned choice, std::uint64_t seed)
      : params_(std::move(params)), choice_(choice), seed_(seed) {
    const FamilyParams& p = *params_;
    const auto code = FieldCtx::standard(p.universe_bits);
    for (unsigned i = 0; i < p.levels.size(); ++i) {
      const LevelSpec& lv = p.levels[i];
      const auto eps =
          dist::EpsBiasedSource::from_seed(FieldCtx::standard(lv.inner_width), lv.positions, derive_seed(seed, i));
      levels_.emplace_back(lv.wise, eps, code, lv.bits, lv.row_mode);
    }
    if (p.k_g > 0) {
      g_.emplace(KWiseSource::from_seed(FieldCtx::standard(p.g_width), static_cast<unsigned>(p.k_g), p.group_bits,
                                        derive_seed(seed, p.levels.size())));
    }
    init();
  }

  /// Explicit sources, for fixtures and reference checks.
  ComposedHash(std::shared_ptr<const FamilyParams> params, unsigned choice, std::vector<KWiseBiasedSource> levels,
               std::optional<KWiseSource> g)
      : params_(std::move(params)), choice_(choice), levels_(std::move(levels)), g_(std::move(g)) {
    const FamilyParams& p = *params_;
    if (levels_.size() != p.levels.size()) throw ConfigError("wrong number of level sources");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (levels_[i].out_bits() != p.level_bits[i]) throw ConfigError("level source width mismatch");
    }
    if (g_ && g_->out_bits() != p.group_bits) throw ConfigError("g width mismatch");
    init();
  }

  [[nodiscard]] const FamilyParams& params() const noexcept { return *params_; }
  [[nodiscard]] unsigned choice() const noexcept { return choice_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::vector<KWiseBiasedSource>& levels() const noexcept { return levels_; }
  [[nodiscard]] const std::optional<KWiseSource>& g() const noexcept { return g_; }

  /// h_1(u) o ... o h_{k+1}(u), h_1 most significant.
  [[nodiscard]] std::uint64_t concat(Ball u) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < levels_.size(); ++i) v = (v << params_->level_bits[i]) | levels_[i].eval(u);
    return v;
  }
  [[nodiscard]] std::uint64_t g_value(Ball u) const { return g_ ? g_->eval(u) : 0; }

  /// The T-bit value before placement into this choice's bin range.
  [[nodiscard]] std::uint64_t local(Ball u) const { return concat(u) ^ g_value(u); }

  /// local(u) with the suffix bits dropped.
  [[nodiscard]] std::uint64_t prefix(Ball u) const { return local(u) >> params_->suffix_bits(); }

  /// Global bin index.
  [[nodiscard]] std::uint64_t bin(Ball u) const { return place_(local(u)); }

  /// local() over a span of balls.
  void local_many(std::span<const Ball> balls, std::span<std::uint64_t> out) const {
    std::vector<std::uint64_t> part(balls.size());
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(balls.size()), 0);
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      levels_[i].eval_many(balls, part);
      const unsigned w = params_->level_bits[i];
      for (std::size_t b = 0; b < balls.size(); ++b) out[b] = (out[b] << w) | part[b];
    }
    if (g_) {
      g_->eval_many(balls, part);
      for (std::size_t b = 0; b < balls.size(); ++b) out[b] ^= part[b];
    }
  }

  [[nodiscard]] const Placement& placement() const noexcept { return place_; }

 private:
  void init() { place_ = Placement::of(*params_, choice_); }

  std::shared_ptr<const FamilyParams> params_;
  unsigned choice_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<KWiseBiasedSource> levels_;
  std::optional<KWiseSource> g_;
  Placement place_;
};

[[nodiscard]] inline std::uint64_t hash_eval(const ComposedHash& ch, Ball u) { return ch.bin(u); }
[[nodiscard]] inline std::uint64_t prefix_eval(const ComposedHash& ch, Ball u) { return ch.prefix(u); }

// ---------------------------------------------------------------------------

/// Which functions a choice set draws from.
enum class FamilyKind { paper, full_random, kwise };

[[nodiscard]] inline std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::paper: return "paper";
    case FamilyKind::full_random: return "full-random";
    case FamilyKind::kwise: return "kwise";
  }
  return "?";
}

/// Seed of choice j under a master seed.
[[nodiscard]] inline std::uint64_t choice_seed(std::uint64_t master, unsigned j) { return derive_seed(master, j); }

/// d choice functions with independent derived seeds. For the baseline kinds the
/// local T-bit value comes from a fully random or a k_g-wise source and is
/// placed exactly as the composed family would place it.
class ChoiceSet {
 public:
  ChoiceSet(std::shared_ptr<const FamilyParams> params, FamilyKind kind, std::uint64_t master)
      : params_(std::move(params)), kind_(kind), master_(master) {
    const FamilyParams& p = *params_;
    for (unsigned j = 0; j < p.d; ++j) {
      const std::uint64_t s = choice_seed(master, j);
      switch (kind) {
        case FamilyKind::paper:
          fns_.emplace_back(std::in_place_type<ComposedHash>, params_, j, s);
          break;
        case FamilyKind::full_random:
          fns_.emplace_back(std::in_place_type<dist::FullRandomSource>, s, p.group_bits);
          break;
        case FamilyKind::kwise: {
          const auto k = static_cast<unsigned>(std::max<std::uint64_t>(p.k_g, 1));
          const auto f = FieldCtx::standard(std::max(p.universe_bits, p.group_bits));
          fns_.emplace_back(std::in_place_type<KWiseSource>, KWiseSource::from_seed(f, k, p.group_bits, s));
          break;
        }
      }
      placers_.push_back(Placement::of(p, j));
    }
  }

  [[nodiscard]] const FamilyParams& params() const noexcept { return *params_; }
  [[nodiscard]] std::shared_ptr<const FamilyParams> params_ptr() const noexcept { return params_; }
  [[nodiscard]] FamilyKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_; }
  [[nodiscard]] unsigned d() const noexcept { return params_->d; }
  [[nodiscard]] std::uint64_t n() const noexcept { return params_->n; }

  [[nodiscard]] const ComposedHash& composed(unsigned j) const {
    if (const auto* h = std::get_if<ComposedHash>(&fns_.at(j))) return *h;
    throw PreconditionError("choice set is not built from the composed family");
  }

  /// Local T-bit value of choice j.
  [[nodiscard]] std::uint64_t local(unsigned j, Ball u) const {
    return std::visit(
        [u](const auto& f) -> std::uint64_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(f)>, ComposedHash>) {
            return f.local(u);
          } else {
            return f.eval(u);
          }
        },
        fns_[j]);
  }

  [[nodiscard]] std::uint64_t bin(unsigned j, Ball u) const { return placers_[j](local(j, u)); }
  [[nodiscard]] std::uint64_t prefix(unsigned j, Ball u) const { return local(j, u) >> params_->suffix_bits(); }

  /// local() of choice j over a span of balls.
  void local_many(unsigned j, std::span<const Ball> balls, std::span<std::uint64_t> out) const {
    std::visit(
        [&](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, ComposedHash>) {
            f.local_many(balls, out);
          } else if constexpr (std::is_same_v<F, KWiseSource>) {
            f.eval_many(balls, out);
          } else {
            for (std::size_t b = 0; b < balls.size(); ++b) out[b] = f.eval(balls[b]);
          }
        },
        fns_[j]);
  }

  /// Candidate bins of every ball, ball-major: out[b * d + j].
  [[nodiscard]] std::vector<std::uint32_t> candidates(std::span<const Ball> balls) const {
    const unsigned d = params_->d;
    std::vector<std::uint32_t> out(balls.size() * d);
    constexpr std::size_t kChunk = 4096;
    std::vector<std::uint64_t> local(kChunk);
    for (unsigned j = 0; j < d; ++j) {
      for (std::size_t start = 0; start < balls.size(); start += kChunk) {
        const auto part = balls.subspan(start, std::min(kChunk, balls.size() - start));
        local_many(j, part, local);
        for (std::size_t b = 0; b < part.size(); ++b) {
          out[(start + b) * d + j] = static_cast<std::uint32_t>(placers_[j](local[b]));
        }
      }
    }
    return out;
  }

 private:
  std::shared_ptr<const FamilyParams> params_;
  FamilyKind kind_;
  std::uint64_t master_;
  std::vector<std::variant<ComposedHash, dist::FullRandomSource, KWiseSource>> fns_;
  std::vector<Placement> placers_;
};

[[nodiscard]] inline ChoiceSet make_choice_set(const FamilyParams& params, std::uint64_t master,
                                               FamilyKind kind = FamilyKind::paper) {
  return ChoiceSet(std::make_shared<const FamilyParams>(params), kind, master);
}

}  // namespace derand::family
