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
 * @file analysis.hpp
 * @brief Predicted bounds, evenness checks, exact bias and trial aggregation.
 *
 * All logarithms are base 2.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "derand/asym.hpp"
#include "derand/dist.hpp"
#include "derand/error.hpp"
#include "derand/family.hpp"
#include "derand/schemes.hpp"

namespace derand::analysis {

/// log log n / log d; the additive constant is left to the caller's slack.
[[nodiscard]] inline double predicted_uniform(std::uint64_t n, unsigned d) {
  if (n < 4 || d < 2) throw PreconditionError("predicted_uniform needs n >= 4 and d >= 2");
  return std::log2(std::log2(static_cast<double>(n))) / std::log2(static_cast<double>(d));
}

/// log log n / (d log phi_d).
[[nodiscard]] inline double predicted_goleft(std::uint64_t n, unsigned d) {
  if (n < 4 || d < 2) throw PreconditionError("predicted_goleft needs n >= 4 and d >= 2");
  return std::log2(std::log2(static_cast<double>(n))) / (d * std::log2(asym::phi(d)));
}

/// (m/n)(1 + C sqrt(log n) sqrt(n/m)).
[[nodiscard]] inline double predicted_heavy(std::uint64_t n, std::uint64_t m, double C) {
  const double L = std::log2(static_cast<double>(n));
  if (n < 4 || static_cast<double>(m) < static_cast<double>(n) * L) {
    throw PreconditionError("predicted_heavy needs m >= n log n");
  }
  if (C < 0) throw PreconditionError("C must be non-negative");
  const double ratio = static_cast<double>(m) / static_cast<double>(n);
  return ratio * (1.0 + C * std::sqrt(L) * std::sqrt(1.0 / ratio));
}

/// Upper tail e^(-delta^2 mu / 3).
[[nodiscard]] inline double chernoff_tail(double mu, double delta) {
  if (!(delta > 0 && delta <= 1)) throw PreconditionError("chernoff_tail needs 0 < delta <= 1");
  if (mu < 0) throw PreconditionError("mu must be non-negative");
  return std::exp(-delta * delta * mu / 3.0);
}

/// One verdict. Serialized as {claim, bound, observed, slack, pass}.
struct Report {
  std::string claim;
  double bound = 0;
  double observed = 0;
  double slack = 1;
  bool pass = false;

  friend bool operator==(const Report&, const Report&) = default;
};

[[nodiscard]] inline bool all_pass(std::span<const Report> rs) {
  return std::all_of(rs.begin(), rs.end(), [](const Report& r) { return r.pass; });
}

namespace detail {

[[nodiscard]] inline std::uint64_t max_count(std::span<const std::uint64_t> values, unsigned bits) {
  if (bits > 32) throw BudgetExceeded("too many bins to count");
  std::vector<std::uint32_t> count(std::size_t{1} << bits, 0);
  std::uint32_t best = 0;
  for (auto v : values) best = std::max(best, ++count[v]);
  return best;
}

}  // namespace detail

/// Largest prefix-bin occupancy per choice against slack * m / 2^(prefix bits).
/// prefix(j, balls, out) fills out with the prefix of each ball under choice j.
template <typename PrefixFn>
[[nodiscard]] std::vector<Report> check_prefix_evenness(std::span<const Ball> balls, unsigned d, unsigned prefix_bits,
                                                        double slack, const PrefixFn& prefix) {
  std::vector<Report> out;
  std::vector<std::uint64_t> vals(balls.size());
  const double bound = slack * static_cast<double>(balls.size()) / std::ldexp(1.0, static_cast<int>(prefix_bits));
  for (unsigned j = 0; j < d; ++j) {
    prefix(j, balls, std::span<std::uint64_t>(vals));
    for (auto v : vals) {
      if (v >> prefix_bits) throw PreconditionError("prefix value out of range");
    }
    const auto worst = static_cast<double>(detail::max_count(vals, prefix_bits));
    out.push_back(Report{"prefix evenness, choice " + std::to_string(j), bound, worst, slack, worst <= bound});
  }
  return out;
}

/// Prefix evenness of a trace. Unless the placement rescales, the prefix is read
/// straight off the recorded candidate bins; rehash = true recomputes it from cs.
[[nodiscard]] inline std::vector<Report> check_prefix_evenness(const schemes::AllocationTrace& t,
                                                               const family::ChoiceSet& cs, double slack,
                                                               bool rehash = false) {
  const auto& p = cs.params();
  const unsigned shift = p.suffix_bits();
  if (t.d != cs.d() || t.n != cs.n()) throw PreconditionError("trace does not come from this choice set");
  if (rehash || p.reduced) {
    return check_prefix_evenness(t.balls, cs.d(), p.prefix_bits(), slack,
                                 [&](unsigned j, std::span<const Ball> balls, std::span<std::uint64_t> out) {
                                   cs.local_many(j, balls, out);
                                   for (auto& v : out) v >>= shift;
                                 });
  }
  return check_prefix_evenness(t.balls, cs.d(), p.prefix_bits(), slack,
                               [&](unsigned j, std::span<const Ball>, std::span<std::uint64_t> out) {
                                 const auto offset = family::Placement::of(p, j).offset;
                                 for (std::size_t i = 0; i < out.size(); ++i) {
                                   out[i] = (t.choices[i * t.d + j] - offset) >> shift;
                                 }
                               });
}

/// Default evenness slack: (log n)^-0.2, or 4(c+2) sqrt(log n) sqrt(n/m) for heavy load.
[[nodiscard]] inline double default_beta(const family::FamilyParams& p) {
  const double L = p.log2n;
  if (p.mode == family::FamilyMode::heavy_load) {
    return 4 * (p.c + 2) * std::sqrt(L) * std::sqrt(static_cast<double>(p.n) / static_cast<double>(p.m));
  }
  return std::pow(L, -0.2);
}

/// Growth factor allowed after i prefix levels.
[[nodiscard]] inline double level_factor(const family::FamilyParams& p, unsigned i, double beta) {
  double f = 1;
  for (unsigned j = 1; j <= i; ++j) {
    if (p.mode == family::FamilyMode::heavy_load) {
      const double r = static_cast<double>(p.k) + 2 - j;
      f *= 1 + beta / (r * r);
    } else {
      f *= 1 + beta;
    }
  }
  return f;
}

/// levels[i][b] is the output of level i+1 on ball b (prefix levels only). Level i
/// is checked against factor(i) * m / 2^(b_1 + ... + b_i); i = 0 is the trivial bound m.
[[nodiscard]] inline std::vector<Report> check_level_evenness(const std::vector<std::vector<std::uint64_t>>& levels,
                                                              std::size_t m, const family::FamilyParams& p,
                                                              double beta, unsigned choice = 0) {
  if (levels.size() > p.k) throw PreconditionError("more level outputs than prefix levels");
  std::vector<Report> out;
  const std::string tag = "level evenness, choice " + std::to_string(choice) + ", level ";
  out.push_back(Report{tag + "0", static_cast<double>(m), static_cast<double>(m), 1, true});
  std::vector<std::uint64_t> acc(m, 0);
  unsigned bits = 0;
  for (unsigned i = 1; i <= levels.size(); ++i) {
    const auto& lv = levels[i - 1];
    if (lv.size() != m) throw PreconditionError("level output size differs from m");
    const unsigned b = p.level_bits[i - 1];
    for (std::size_t x = 0; x < m; ++x) acc[x] = (acc[x] << b) | (lv[x] & dist::out_mask(b));
    bits += b;
    const double f = level_factor(p, i, beta);
    const double bound = f * static_cast<double>(m) / std::ldexp(1.0, static_cast<int>(bits));
    const auto worst = m == 0 ? 0.0 : static_cast<double>(detail::max_count(acc, bits));
    out.push_back(Report{tag + std::to_string(i), bound, worst, f, worst <= bound});
  }
  return out;
}

/// Level evenness of every choice, from the composed family itself (g is not applied).
[[nodiscard]] inline std::vector<Report> check_level_evenness(std::span<const Ball> balls,
                                                              const family::ChoiceSet& cs,
                                                              std::optional<double> beta = {}) {
  const auto& p = cs.params();
  const double b = beta.value_or(default_beta(p));
  std::vector<Report> out;
  for (unsigned j = 0; j < cs.d(); ++j) {
    const auto& h = cs.composed(j);
    std::vector<std::vector<std::uint64_t>> levels(p.k, std::vector<std::uint64_t>(balls.size()));
    for (unsigned i = 0; i < p.k; ++i) h.levels()[i].eval_many(balls, levels[i]);
    auto r = check_level_evenness(levels, balls.size(), p, b, j);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

/// max over nonzero characters a of |E[(-1)^<a, X>]|, by a Walsh-Hadamard transform
/// of the outcome histogram.
template <dist::SeedSpace S>
[[nodiscard]] double exact_bias(const S& space, std::uint64_t budget = dist::kDefaultBudget) {
  const auto hist = dist::outcome_histogram(space, budget);
  std::vector<std::int64_t> a(hist.begin(), hist.end());
  for (std::size_t h = 1; h < a.size(); h <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const auto x = a[j], y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
    }
  }
  std::uint64_t worst = 0;
  for (std::size_t i = 1; i < a.size(); ++i) worst = std::max<std::uint64_t>(worst, std::llabs(a[i]));
  return static_cast<double>(worst) / static_cast<double>(space.size());
}

/// What one trial produced.
struct TrialRow {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint32_t max_load = 0;
  double predicted_bound = 0;
  std::optional<std::uint64_t> collisions;  ///< of the max-height ball's pruned witness tree
  std::uint64_t histogram_digest = 0;
  std::optional<unsigned> witness_height;
  bool witness_ok = true;

  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

struct TrialStats {
  std::size_t trials = 0;
  double mean = 0;
  std::uint32_t min = 0;
  std::uint32_t max = 0;
  std::uint32_t p50 = 0;
  std::uint32_t p99 = 0;
  std::size_t witness_trees = 0;
  std::uint64_t max_collisions = 0;
  bool witnesses_ok = true;

  friend bool operator==(const TrialStats&, const TrialStats&) = default;
};

/// Nearest-rank percentile of sorted data.
[[nodiscard]] inline std::uint32_t percentile(std::span<const std::uint32_t> sorted, double q) {
  if (sorted.empty()) throw PreconditionError("percentile of nothing");
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

[[nodiscard]] inline TrialStats aggregate(std::span<const TrialRow> rows) {
  if (rows.empty()) throw PreconditionError("aggregate needs at least one trial");
  std::vector<std::uint32_t> loads;
  TrialStats s;
  s.trials = rows.size();
  std::uint64_t sum = 0;
  for (const auto& r : rows) {
    loads.push_back(r.max_load);
    sum += r.max_load;
    if (r.collisions) {
      ++s.witness_trees;
      s.max_collisions = std::max(s.max_collisions, *r.collisions);
    }
    s.witnesses_ok = s.witnesses_ok && r.witness_ok;
  }
  std::sort(loads.begin(), loads.end());
  s.mean = static_cast<double>(sum) / static_cast<double>(rows.size());
  s.min = loads.front();
  s.max = loads.back();
  s.p50 = percentile(loads, 0.50);
  s.p99 = percentile(loads, 0.99);
  return s;
}

/// FNV-1a over the (load, bins) pairs of a load histogram.
[[nodiscard]] inline std::uint64_t histogram_digest(const schemes::AllocationTrace& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (auto [load, bins] : schemes::load_histogram(t)) {
    mix(load);
    mix(bins);
  }
  return h;
}

/// Configuration of a batch of trials, with the quantities the analysis derives from it.
struct ExperimentPlan {
  schemes::Scheme scheme = schemes::Scheme::uniform_greedy;
  family::FamilyKind kind = family::FamilyKind::paper;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  unsigned d = 2;
  double c = 1;
  unsigned a = 1;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  family::DeriveOptions options;

  [[nodiscard]] family::FamilyMode mode() const {
    switch (scheme) {
      case schemes::Scheme::one_choice: return family::FamilyMode::heavy_load;
      case schemes::Scheme::always_go_left: return family::FamilyMode::always_go_left;
      default: return family::FamilyMode::uniform_greedy;
    }
  }
  [[nodiscard]] family::FamilyParams params() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    return family::derive_params(n, m, d, c, mode(), a, options);
  }
  /// Witness height l.
  [[nodiscard]] std::uint64_t l() const { return params().tree_height; }
  /// Leaf height threshold b.
  [[nodiscard]] std::uint64_t b() const { return params().leaf_height; }
  [[nodiscard]] double beta() const { return default_beta(params()); }
  /// The headline bound of the scheme, without additive constants.
  [[nodiscard]] double predicted(double heavy_C = 4) const {
    switch (scheme) {
      case schemes::Scheme::one_choice: {
        // same expression below m = n log n, where the heavy-load bound says nothing
        const double r = static_cast<double>(m) / static_cast<double>(n);
        return r + heavy_C * std::sqrt(std::log2(static_cast<double>(n)) * r);
      }
      case schemes::Scheme::always_go_left: return predicted_goleft(n, d);
      default: return predicted_uniform(n, d);
    }
  }
};

}  // namespace derand::analysis
