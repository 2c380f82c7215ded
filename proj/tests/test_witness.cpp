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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "derand/witness.hpp"

namespace {

using derand::Ball;
namespace fam = derand::family;
namespace sch = derand::schemes;
namespace wit = derand::witness;
using sch::Scheme;
using wit::TreeKind;

std::vector<Ball> ids(Ball from, Ball to) {
  std::vector<Ball> v(to - from + 1);
  std::iota(v.begin(), v.end(), from);
  return v;
}

sch::AllocationTrace hand_ug() {
  const auto balls = ids(1, 4);
  return sch::allocate_from_choices(Scheme::uniform_greedy, balls, 2, 4, {0, 1, 0, 1, 0, 1, 0, 1});
}

sch::AllocationTrace hand_gl() {
  const auto balls = ids(1, 4);
  return sch::allocate_from_choices(Scheme::always_go_left, balls, 2, 4, {0, 2, 0, 2, 0, 2, 0, 2},
                                    sch::GroupLayout::make(4, 2));
}

TEST(Build, HeightZeroIsSingleNode) {
  const auto w = wit::build_witness_tree(hand_ug(), 2, 0);
  ASSERT_EQ(w.nodes.size(), 1U);
  EXPECT_EQ(w.root().ball, 2U);
  EXPECT_EQ(wit::tree_height(w), 0U);
  EXPECT_TRUE(wit::verify_edges(w, hand_ug()));
  EXPECT_EQ(wit::prune(w).collisions, 0U);
}

TEST(Build, HandTrace) {
  const auto t = hand_ug();
  const auto w = wit::build_witness_tree(t, 4, 1);
  ASSERT_EQ(w.nodes.size(), 3U);
  EXPECT_EQ(w.nodes[1].ball, 3U);
  EXPECT_EQ(w.nodes[2].ball, 2U);
  EXPECT_FALSE(wit::check_against_trace(w, t).has_value());
  EXPECT_TRUE(wit::verify_edges(w, t));
  EXPECT_THROW((void)wit::build_witness_tree(t, 4, 2), derand::PreconditionError);
  EXPECT_THROW((void)wit::build_witness_tree(t, 9, 0), derand::PreconditionError);
  EXPECT_THROW((void)wit::build_witness_tree(t, 4, 1, TreeKind::asymmetric), derand::PreconditionError);
}

TEST(Build, AsymmetricHandTrace) {
  const auto t = hand_gl();
  // ball 4 sits in bin 2 (second group); its left child keeps the full height
  const auto w = wit::build_witness_tree(t, 4, 1);
  EXPECT_EQ(w.kind, TreeKind::asymmetric);
  std::vector<Ball> balls;
  std::vector<unsigned> rem;
  for (const auto& n : w.nodes) {
    balls.push_back(n.ball);
    rem.push_back(n.remaining);
  }
  EXPECT_EQ(balls, (std::vector<Ball>{4, 3, 2, 1, 2}));
  EXPECT_EQ(rem, (std::vector<unsigned>{1, 1, 0, 0, 0}));
  EXPECT_EQ(wit::tree_height(w), 1U);
  EXPECT_TRUE(wit::verify_edges(w, t));

  const auto p = wit::prune(w);
  EXPECT_EQ(p.collisions, 1U);
  EXPECT_EQ(p.nodes.size(), 4U);
  EXPECT_EQ(wit::tree_height(p), 1U);
  EXPECT_TRUE(wit::verify_edges(p, t));
}

TEST(Prune, DuplicateChildrenGiveOneCollision) {
  const std::vector<Ball> balls{1, 2};
  const auto t = sch::allocate_from_choices(Scheme::uniform_greedy, balls, 2, 4, {0, 1, 0, 0});
  const auto w = wit::build_witness_tree(t, 2, 1);
  ASSERT_EQ(w.nodes.size(), 3U);
  const auto p = wit::prune(w);
  EXPECT_EQ(p.collisions, 1U);
  ASSERT_EQ(p.nodes.size(), 2U);
  EXPECT_EQ(p.edges[0].to, p.edges[1].to);
  EXPECT_FALSE(p.edges[0].collision);
  EXPECT_TRUE(p.edges[1].collision);
  EXPECT_EQ(wit::tree_height(p), 1U);
}

TEST(Prune, DistinctTreeUnchanged) {
  const auto t = hand_ug();
  const auto w = wit::build_witness_tree(t, 4, 1);
  const auto p = wit::prune(w);
  EXPECT_EQ(p.collisions, 0U);
  ASSERT_EQ(p.nodes.size(), w.nodes.size());
  for (std::size_t i = 0; i < w.nodes.size(); ++i) EXPECT_EQ(p.nodes[i].ball, w.nodes[i].ball);
  EXPECT_EQ(p.edges.size(), w.nodes.size() - 1);
}

// Quadratic dedup written without the BFS layout: children found by scanning parents.
struct Dedup {
  std::set<Ball> balls;
  std::set<std::tuple<Ball, Ball, unsigned, bool>> edges;
  std::size_t collisions = 0;
};

Dedup dedup_oracle(const wit::WitnessTree& w) {
  const std::size_t n = w.nodes.size();
  std::vector<std::size_t> surv(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = i;
    for (std::size_t k = 0; k < n; ++k) {
      if (w.nodes[k].ball != w.nodes[i].ball) continue;
      if (w.nodes[k].remaining < w.nodes[best].remaining ||
          (w.nodes[k].remaining == w.nodes[best].remaining && k < best)) {
        best = k;
      }
    }
    surv[i] = best;
  }
  Dedup out;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{surv[0]};
  seen[surv[0]] = true;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    out.balls.insert(w.nodes[u].ball);
    for (std::size_t c = 0; c < n; ++c) {
      if (w.nodes[c].parent != u) continue;
      const auto s = surv[c];
      out.edges.emplace(w.nodes[u].ball, w.nodes[s].ball, w.nodes[c].slot, s != c);
      if (s != c) ++out.collisions;
      if (!seen[s]) {
        seen[s] = true;
        stack.push_back(s);
      }
    }
  }
  return out;
}

TEST(Prune, MatchesDedupOracleOnRandomTraces) {
  std::mt19937_64 rng(11);
  std::size_t trees = 0, with_collisions = 0;
  while (trees < 10000) {
    const unsigned d = 2 + rng() % 2;
    const std::uint64_t group = 2 + rng() % 3;
    const std::uint64_t n = group * d;
    const std::size_t m = 4 + rng() % 40;
    const auto balls = ids(1, m);
    std::vector<std::uint32_t> ch(m * d);
    for (std::size_t i = 0; i < m; ++i) {
      for (unsigned j = 0; j < d; ++j) ch[i * d + j] = static_cast<std::uint32_t>(j * group + rng() % group);
    }
    const bool left = rng() & 1;
    const auto t = left ? sch::allocate_from_choices(Scheme::always_go_left, balls, d, n, ch,
                                                     sch::GroupLayout::make(n, d))
                        : sch::allocate_from_choices(Scheme::uniform_greedy, balls, d, n, ch);
    const std::size_t root = rng() % m;
    if (t.heights[root] < 2) continue;
    const unsigned cap = d == 2 ? 6 : 4;
    const unsigned l = std::min<unsigned>(t.heights[root] - 1, 1 + rng() % cap);
    const auto w = wit::build_witness_tree(t, balls[root], l);
    ++trees;
    ASSERT_FALSE(wit::check_against_trace(w, t).has_value());
    for (const auto& nd : w.nodes) {
      for (unsigned j = 0; j < nd.child_count; ++j) ASSERT_LT(w.nodes[nd.first_child + j].ball, nd.ball);
    }
    if (left) {
      std::size_t leaves = 0;
      for (const auto& nd : w.nodes) leaves += nd.child_count == 0;
      ASSERT_EQ(leaves, wit::asym_size(d, l, w.root().group + 1));
    } else {
      ASSERT_EQ(w.nodes.size(), (std::pow(d, l + 1) - 1) / (d - 1));
    }
    const auto p = wit::prune(w);
    const auto o = dedup_oracle(w);
    std::set<Ball> pb;
    std::set<std::tuple<Ball, Ball, unsigned, bool>> pe;
    for (const auto& nd : p.nodes) pb.insert(nd.ball);
    for (const auto& e : p.edges) pe.emplace(p.nodes[e.from].ball, p.nodes[e.to].ball, e.slot, e.collision);
    ASSERT_EQ(pb.size(), p.nodes.size());
    ASSERT_EQ(pb, o.balls);
    ASSERT_EQ(pe, o.edges);
    ASSERT_EQ(p.collisions, o.collisions);
    ASSERT_EQ(wit::tree_height(w), l);
    ASSERT_EQ(wit::tree_height(p), l);
    ASSERT_TRUE(wit::verify_edges(w, t));
    ASSERT_TRUE(wit::verify_edges(p, t));
    with_collisions += p.collisions > 0;
  }
  EXPECT_GT(with_collisions, trees / 4);
}

TEST(Verify, BuiltTreesPassAndMutantsFail) {
  for (auto mode : {fam::FamilyMode::uniform_greedy, fam::FamilyMode::always_go_left}) {
    const auto p = fam::derive_params(1024, 1024, 2, 1, mode);
    const auto cs = fam::make_choice_set(p, 2024);
    const auto balls = ids(0, 1023);
    const auto t = mode == fam::FamilyMode::uniform_greedy
                       ? sch::allocate_uniform_greedy(balls, cs)
                       : sch::allocate_always_go_left(balls, cs, sch::GroupLayout::of(p));
    const auto top = std::max_element(t.heights.begin(), t.heights.end()) - t.heights.begin();
    ASSERT_GE(t.heights[top], 3U);
    const auto w = wit::build_witness_tree(t, t.balls[top], t.heights[top] - 1);
    EXPECT_TRUE(wit::verify_edges(w, cs));
    EXPECT_TRUE(wit::verify_edges(wit::prune(w), cs));

    std::mt19937_64 rng(5);
    int caught = 0;
    const int trials = 300;
    for (int i = 0; i < trials; ++i) {
      auto m = w;
      auto& victim = m.nodes[1 + rng() % (m.nodes.size() - 1)];
      Ball b;
      do b = rng() % 1024; while (b == victim.ball);
      victim.ball = b;
      caught += !wit::verify_edges(m, cs);
    }
    EXPECT_GE(caught, trials * 95 / 100) << fam::to_string(mode);
  }
}

TEST(Summary, MaxWitness) {
  const auto t = hand_ug();
  const auto s = wit::summarize_max_witness(t, 1, [&](unsigned j, Ball u) {
    return t.choices_of(wit::find_record(t, u))[j];
  });
  EXPECT_EQ(s.ball, 3U);
  EXPECT_EQ(s.ball_height, 2U);
  EXPECT_EQ(s.tree_height, 1U);
  EXPECT_EQ(s.nodes, 3U);
  EXPECT_TRUE(s.height_preserved);
  EXPECT_TRUE(s.edges_ok);
  const auto low = wit::summarize_max_witness(t, 2, [](unsigned, Ball) { return 0; });
  EXPECT_FALSE(low.tree_height.has_value());
}

TEST(Asym, Values) {
  EXPECT_EQ(wit::asym_size(2, 0, 1), 1U);
  EXPECT_EQ(wit::asym_size(2, 1, 1), 2U);
  EXPECT_EQ(wit::asym_size(2, 1, 2), 3U);
  EXPECT_EQ(wit::asym_size(2, 2, 1), 5U);
  EXPECT_NEAR(wit::phi(2), (1 + std::sqrt(5.0)) / 2, 1e-12);
}

}  // namespace
