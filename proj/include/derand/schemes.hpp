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
 * @file schemes.hpp
 * @brief Sequential allocation: one-choice, Uniform-Greedy and Always-Go-Left.
 *
 * Every run produces an AllocationTrace: for each inserted ball its candidate
 * bins, the chosen slot, its height, and the ball that was on top of each
 * candidate bin just before insertion. Witness trees are read off the trace.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "derand/dist.hpp"
#include "derand/error.hpp"
#include "derand/family.hpp"

namespace derand::schemes {

enum class Scheme { one_choice, uniform_greedy, always_go_left };

[[nodiscard]] inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::one_choice: return "one-choice";
    case Scheme::uniform_greedy: return "uniform-greedy";
    case Scheme::always_go_left: return "always-go-left";
  }
  return "?";
}

/// Record index meaning "no ball" (empty bin).
inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

/// d equal groups of consecutive bins; bins past d * group_size (when d does not divide n) belong to none.
struct GroupLayout {
  unsigned d = 0;
  std::uint64_t n = 0;
  std::uint64_t group_size = 0;

  [[nodiscard]] static GroupLayout make(std::uint64_t n, unsigned d) {
    if (d < 2) throw PreconditionError("Always-Go-Left needs at least two groups");
    if (n < d) throw PreconditionError("fewer bins than groups");
    return GroupLayout{d, n, n / d};
  }
  [[nodiscard]] static GroupLayout of(const family::FamilyParams& p) {
    auto g = make(p.n, p.d);
    g.group_size = p.group_size;
    return g;
  }
  [[nodiscard]] std::uint64_t group_of(std::uint64_t bin) const noexcept { return bin / group_size; }
};

struct BinState {
  std::vector<std::uint32_t> loads;
  std::vector<std::uint32_t> top;  ///< record index of the top ball, kNone if empty

  friend bool operator==(const BinState&, const BinState&) = default;
};

/// Structure-of-arrays trace; record i is the i-th inserted ball.
struct AllocationTrace {
  Scheme scheme = Scheme::uniform_greedy;
  std::uint64_t n = 0;
  unsigned d = 1;
  std::vector<Ball> balls;
  std::vector<std::uint32_t> choices;  ///< d per record
  std::vector<std::uint8_t> slot;      ///< index of the chosen candidate
  std::vector<std::uint32_t> heights;  ///< 1-based
  std::vector<std::uint32_t> witness;  ///< d per record: top ball of each candidate before insertion
  BinState final_state;

  [[nodiscard]] std::size_t size() const noexcept { return balls.size(); }
  [[nodiscard]] std::span<const std::uint32_t> choices_of(std::size_t i) const {
    return {choices.data() + i * d, d};
  }
  [[nodiscard]] std::span<const std::uint32_t> witness_of(std::size_t i) const {
    return {witness.data() + i * d, d};
  }
  [[nodiscard]] std::uint32_t chosen(std::size_t i) const { return choices[i * d + slot[i]]; }
  /// Ball id behind witness pointer j of record i.
  [[nodiscard]] std::optional<Ball> witness_ball(std::size_t i, unsigned j) const {
    const auto w = witness[i * d + j];
    if (w == kNone) return std::nullopt;
    return balls[w];
  }

  friend bool operator==(const AllocationTrace&, const AllocationTrace&) = default;
};

namespace detail {

inline void require_distinct(std::span<const Ball> balls) {
  bool ascending = true;
  for (std::size_t i = 1; i < balls.size() && ascending; ++i) ascending = balls[i - 1] < balls[i];
  if (ascending) return;
  std::unordered_set<Ball> seen;
  seen.reserve(balls.size());
  for (Ball b : balls) {
    if (!seen.insert(b).second) throw PreconditionError("ball " + std::to_string(b) + " inserted twice");
  }
}

}  // namespace detail

/// Runs the scheme over precomputed candidates (d per ball, ball-major). Ties go
/// to the lowest candidate index; for Always-Go-Left candidate j must lie in group j,
/// so that rule is exactly "smallest group".
[[nodiscard]] inline AllocationTrace allocate_from_choices(Scheme scheme, std::span<const Ball> balls, unsigned d,
                                                           std::uint64_t n, std::vector<std::uint32_t> choices,
                                                           const std::optional<GroupLayout>& layout = {}) {
  if (d < 1) throw PreconditionError("d must be >= 1");
  if (scheme == Scheme::one_choice && d != 1) throw PreconditionError("one-choice allocation takes d = 1");
  if (scheme == Scheme::uniform_greedy && d < 2) throw PreconditionError("Uniform-Greedy needs d >= 2");
  if (scheme == Scheme::always_go_left) {
    if (!layout) throw PreconditionError("Always-Go-Left needs a group layout");
    if (layout->d != d || layout->n != n) throw PreconditionError("group layout does not match d and n");
  }
  if (choices.size() != balls.size() * d) throw PreconditionError("need d candidates per ball");
  if (n > kNone) throw PreconditionError("too many bins");
  if (balls.size() >= kNone) throw PreconditionError("too many balls");
  detail::require_distinct(balls);

  AllocationTrace t;
  t.scheme = scheme;
  t.n = n;
  t.d = d;
  t.balls.assign(balls.begin(), balls.end());
  t.choices = std::move(choices);
  t.slot.resize(balls.size());
  t.heights.resize(balls.size());
  t.witness.resize(balls.size() * d);
  auto& loads = t.final_state.loads;
  auto& top = t.final_state.top;
  loads.assign(n, 0);
  top.assign(n, kNone);

  for (std::size_t i = 0; i < balls.size(); ++i) {
    const std::uint32_t* cand = t.choices.data() + i * d;
    std::uint32_t* wit = t.witness.data() + i * d;
    unsigned best = 0;
    for (unsigned j = 0; j < d; ++j) {
      if (cand[j] >= n) throw std::logic_error("candidate bin out of range");
      if (scheme == Scheme::always_go_left && layout->group_of(cand[j]) != j) {
        throw std::logic_error("choice " + std::to_string(j) + " of ball " + std::to_string(balls[i]) +
                               " left its group");
      }
      wit[j] = top[cand[j]];
      if (loads[cand[j]] < loads[cand[best]]) best = j;
    }
    const std::uint32_t bin = cand[best];
    t.slot[i] = static_cast<std::uint8_t>(best);
    t.heights[i] = ++loads[bin];
    top[bin] = static_cast<std::uint32_t>(i);
  }
  return t;
}

[[nodiscard]] inline AllocationTrace allocate_one_choice(std::span<const Ball> balls, const family::ChoiceSet& cs) {
  if (cs.d() != 1) throw PreconditionError("one-choice allocation takes a single choice function");
  return allocate_from_choices(Scheme::one_choice, balls, 1, cs.n(), cs.candidates(balls));
}

/// One-choice allocation with any ball -> bin function.
template <typename Hash>
  requires std::invocable<const Hash&, Ball>
[[nodiscard]] AllocationTrace allocate_one_choice(std::span<const Ball> balls, std::uint64_t n, const Hash& h) {
  std::vector<std::uint32_t> cand(balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) cand[i] = static_cast<std::uint32_t>(h(balls[i]));
  return allocate_from_choices(Scheme::one_choice, balls, 1, n, std::move(cand));
}

[[nodiscard]] inline AllocationTrace allocate_uniform_greedy(std::span<const Ball> balls,
                                                             const family::ChoiceSet& cs) {
  if (cs.d() < 2) throw PreconditionError("Uniform-Greedy needs d >= 2");
  return allocate_from_choices(Scheme::uniform_greedy, balls, cs.d(), cs.n(), cs.candidates(balls));
}

[[nodiscard]] inline AllocationTrace allocate_always_go_left(std::span<const Ball> balls,
                                                             const family::ChoiceSet& cs,
                                                             const GroupLayout& layout) {
  return allocate_from_choices(Scheme::always_go_left, balls, cs.d(), cs.n(), cs.candidates(balls), layout);
}

[[nodiscard]] inline std::uint32_t max_load(const AllocationTrace& t) {
  const auto& l = t.final_state.loads;
  return l.empty() ? 0 : *std::max_element(l.begin(), l.end());
}

/// load -> number of bins with that load.
[[nodiscard]] inline std::map<std::uint32_t, std::uint64_t> load_histogram(const AllocationTrace& t) {
  std::map<std::uint32_t, std::uint64_t> h;
  for (auto l : t.final_state.loads) ++h[l];
  return h;
}

/// Rebuilds the final bin state from the per-ball records alone.
[[nodiscard]] inline BinState replay(const AllocationTrace& t) {
  BinState s;
  s.loads.assign(t.n, 0);
  s.top.assign(t.n, kNone);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto bin = t.chosen(i);
    ++s.loads[bin];
    s.top[bin] = static_cast<std::uint32_t>(i);
  }
  return s;
}

/// Checks every per-record invariant against a replay; returns a description of the first violation.
[[nodiscard]] inline std::optional<std::string> check_trace(const AllocationTrace& t) {
  std::vector<std::uint32_t> loads(t.n, 0);
  std::vector<std::uint32_t> top(t.n, kNone);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto cand = t.choices_of(i);
    const auto wit = t.witness_of(i);
    for (unsigned j = 0; j < t.d; ++j) {
      if (wit[j] != top[cand[j]]) return "record " + std::to_string(i) + ": witness pointer mismatch";
    }
    const auto bin = t.chosen(i);
    if (t.heights[i] != loads[bin] + 1) return "record " + std::to_string(i) + ": height mismatch";
    for (unsigned j = 0; j < t.d; ++j) {
      if (loads[cand[j]] < loads[bin]) return "record " + std::to_string(i) + ": not least loaded";
      if (loads[cand[j]] == loads[bin] && j < t.slot[i]) return "record " + std::to_string(i) + ": tie rule";
    }
    ++loads[bin];
    top[bin] = static_cast<std::uint32_t>(i);
  }
  if (loads != t.final_state.loads || top != t.final_state.top) return std::string("final state mismatch");
  return std::nullopt;
}

}  // namespace derand::schemes
