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
 * @file witness.hpp
 * @brief Witness trees read off an allocation trace, their pruning, and edge checks.
 */

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "derand/asym.hpp"
#include "derand/error.hpp"
#include "derand/family.hpp"
#include "derand/schemes.hpp"

namespace derand::witness {

using asym::AsymShape;
using asym::asym_size;
using asym::phi;

using schemes::AllocationTrace;

enum class TreeKind { symmetric, asymmetric };

[[nodiscard]] inline std::string to_string(TreeKind k) {
  return k == TreeKind::symmetric ? "symmetric" : "asymmetric";
}

/// Nodes are stored in BFS order; the children of a node are contiguous.
struct WitnessNode {
  std::uint32_t record = 0;  ///< index of the ball in the trace
  Ball ball = 0;
  std::uint32_t parent = schemes::kNone;
  unsigned slot = 0;       ///< which candidate of the parent this node came from
  unsigned depth = 0;
  unsigned remaining = 0;  ///< height of the subtree this node roots
  unsigned group = 0;      ///< asymmetric trees: group the ball sits in
  std::uint32_t first_child = 0;
  unsigned child_count = 0;

  friend bool operator==(const WitnessNode&, const WitnessNode&) = default;
};

struct WitnessTree {
  TreeKind kind = TreeKind::symmetric;
  unsigned d = 0;
  unsigned height = 0;
  std::vector<WitnessNode> nodes;

  [[nodiscard]] const WitnessNode& root() const { return nodes.front(); }
  friend bool operator==(const WitnessTree&, const WitnessTree&) = default;
};

struct PrunedNode {
  std::uint32_t source = 0;  ///< index of the surviving copy in the unpruned tree
  std::uint32_t record = 0;
  Ball ball = 0;
  unsigned remaining = 0;
  unsigned group = 0;

  friend bool operator==(const PrunedNode&, const PrunedNode&) = default;
};

struct PrunedEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  unsigned slot = 0;
  bool collision = false;

  friend bool operator==(const PrunedEdge&, const PrunedEdge&) = default;
};

struct PrunedWitnessTree {
  TreeKind kind = TreeKind::symmetric;
  unsigned d = 0;
  std::vector<PrunedNode> nodes;  ///< nodes[0] is the root
  std::vector<PrunedEdge> edges;
  std::size_t collisions = 0;

  friend bool operator==(const PrunedWitnessTree&, const PrunedWitnessTree&) = default;
};

inline constexpr std::size_t kDefaultNodeBudget = std::size_t{1} << 22;

[[nodiscard]] inline std::uint32_t find_record(const AllocationTrace& t, Ball b) {
  const auto it = std::find(t.balls.begin(), t.balls.end(), b);
  if (it == t.balls.end()) throw PreconditionError("ball " + std::to_string(b) + " is not in the trace");
  return static_cast<std::uint32_t>(it - t.balls.begin());
}

[[nodiscard]] inline TreeKind default_kind(const AllocationTrace& t) {
  return t.scheme == schemes::Scheme::always_go_left ? TreeKind::asymmetric : TreeKind::symmetric;
}

/// Witness tree of height l rooted at ball b. Child j of a node is the ball that
/// was on top of the node's j-th candidate bin when the node's ball was inserted.
/// In the asymmetric variant the child in group j has height l - [j >= i] when
/// its parent sits in group i.
[[nodiscard]] inline WitnessTree build_witness_tree(const AllocationTrace& t, Ball b, unsigned l, TreeKind kind,
                                                    std::size_t budget = kDefaultNodeBudget) {
  if (kind == TreeKind::asymmetric && t.scheme != schemes::Scheme::always_go_left) {
    throw PreconditionError("asymmetric witness trees need an Always-Go-Left trace");
  }
  const auto root = find_record(t, b);
  if (t.heights[root] < l + 1) {
    throw PreconditionError("ball " + std::to_string(b) + " has height " + std::to_string(t.heights[root]) +
                            ", need at least " + std::to_string(l + 1));
  }
  WitnessTree w;
  w.kind = kind;
  w.d = t.d;
  w.height = l;
  w.nodes.push_back(WitnessNode{root, b, schemes::kNone, 0, 0, l, t.slot[root], 0, 0});
  for (std::size_t q = 0; q < w.nodes.size(); ++q) {
    const WitnessNode u = w.nodes[q];
    if (u.remaining == 0) continue;
    const auto wit = t.witness_of(u.record);
    w.nodes[q].first_child = static_cast<std::uint32_t>(w.nodes.size());
    w.nodes[q].child_count = t.d;
    for (unsigned j = 0; j < t.d; ++j) {
      if (wit[j] == schemes::kNone) {
        throw PreconditionError("node for ball " + std::to_string(u.ball) + " at depth " + std::to_string(u.depth) +
                                " has no witness in candidate " + std::to_string(j));
      }
      unsigned r = u.remaining - 1;
      if (kind == TreeKind::asymmetric && j < u.group) r = u.remaining;
      if (w.nodes.size() >= budget) throw BudgetExceeded("witness tree exceeds " + std::to_string(budget) + " nodes");
      w.nodes.push_back(WitnessNode{wit[j], t.balls[wit[j]], static_cast<std::uint32_t>(q), j, u.depth + 1, r,
                                    kind == TreeKind::asymmetric ? j : 0u, 0, 0});
    }
  }
  return w;
}

[[nodiscard]] inline WitnessTree build_witness_tree(const AllocationTrace& t, Ball b, unsigned l) {
  return build_witness_tree(t, b, l, default_kind(t));
}

/// Length of the shortest root-to-leaf path.
[[nodiscard]] inline unsigned tree_height(const WitnessTree& w) {
  unsigned best = std::numeric_limits<unsigned>::max();
  for (const auto& n : w.nodes) {
    if (n.child_count == 0) best = std::min(best, n.depth);
  }
  return best;
}

/// Merges copies of the same ball. The survivor is the copy on the lowest level
/// (smallest remaining height), the first in BFS order among equals. Edges into
/// the other copies are redirected to the survivor and marked as collisions;
/// whatever is no longer reachable from the root is dropped.
[[nodiscard]] inline PrunedWitnessTree prune(const WitnessTree& w) {
  std::unordered_map<Ball, std::uint32_t> survivor;
  survivor.reserve(w.nodes.size());
  for (std::uint32_t i = 0; i < w.nodes.size(); ++i) {
    auto [it, fresh] = survivor.try_emplace(w.nodes[i].ball, i);
    if (!fresh && w.nodes[i].remaining < w.nodes[it->second].remaining) it->second = i;
  }
  PrunedWitnessTree p;
  p.kind = w.kind;
  p.d = w.d;
  if (w.nodes.empty()) return p;
  std::unordered_map<std::uint32_t, std::uint32_t> index;  // tree node -> pruned node
  auto visit = [&](std::uint32_t src) {
    auto [it, fresh] = index.try_emplace(src, static_cast<std::uint32_t>(p.nodes.size()));
    if (fresh) {
      const auto& n = w.nodes[src];
      p.nodes.push_back(PrunedNode{src, n.record, n.ball, n.remaining, n.group});
    }
    return it->second;
  };
  visit(survivor.at(w.nodes[0].ball));
  for (std::size_t q = 0; q < p.nodes.size(); ++q) {
    const auto& u = w.nodes[p.nodes[q].source];
    for (unsigned j = 0; j < u.child_count; ++j) {
      const std::uint32_t c = u.first_child + j;
      const std::uint32_t s = survivor.at(w.nodes[c].ball);
      const std::uint32_t to = visit(s);
      p.edges.push_back(PrunedEdge{static_cast<std::uint32_t>(q), to, j, s != c});
      if (s != c) ++p.collisions;
    }
  }
  return p;
}

/// Height of a pruned tree measured in levels: an edge spans as many levels as the
/// remaining height drops along it, so a collision into a lower copy counts the
/// levels it skips. Nodes without out-edges are leaves.
[[nodiscard]] inline unsigned tree_height(const PrunedWitnessTree& p) {
  if (p.nodes.empty()) return 0;
  std::vector<std::vector<std::uint32_t>> out(p.nodes.size());
  for (const auto& e : p.edges) out[e.from].push_back(e.to);
  constexpr unsigned kUnset = std::numeric_limits<unsigned>::max();
  std::vector<unsigned> h(p.nodes.size(), kUnset);
  // Edges never increase the remaining height, and edges between equal heights only
  // go to earlier-inserted balls, so sorting by (remaining, record) is a topological order.
  std::vector<std::uint32_t> order(p.nodes.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (p.nodes[a].remaining != p.nodes[b].remaining) return p.nodes[a].remaining < p.nodes[b].remaining;
    return p.nodes[a].record < p.nodes[b].record;
  });
  for (auto u : order) {
    if (out[u].empty()) {
      h[u] = 0;
      continue;
    }
    unsigned best = kUnset;
    for (auto v : out[u]) {
      if (h[v] == kUnset) throw std::logic_error("pruned tree edge climbs in height");
      best = std::min(best, h[v] + (p.nodes[u].remaining - p.nodes[v].remaining));
    }
    h[u] = best;
  }
  return h[0];
}

namespace detail {

template <typename Bins>
bool edge_ok(TreeKind kind, unsigned d, unsigned slot, Ball u, Ball v, const Bins& bins) {
  const auto hu = bins(slot, u);
  if (kind == TreeKind::asymmetric) return hu == bins(slot, v);
  for (unsigned i = 0; i < d; ++i) {
    if (bins(i, v) == hu) return true;
  }
  return false;
}

}  // namespace detail

/// Checks every edge against a bin function (choice, ball) -> bin: in symmetric trees
/// the parent's bin for the edge's slot must be one of the child's candidates, in
/// asymmetric trees the two balls must agree on that slot.
template <typename Bins>
  requires std::invocable<const Bins&, unsigned, Ball>
[[nodiscard]] bool verify_edges(const WitnessTree& w, const Bins& bins) {
  for (const auto& u : w.nodes) {
    for (unsigned j = 0; j < u.child_count; ++j) {
      const auto& v = w.nodes[u.first_child + j];
      if (!detail::edge_ok(w.kind, w.d, v.slot, u.ball, v.ball, bins)) return false;
    }
  }
  return true;
}

template <typename Bins>
  requires std::invocable<const Bins&, unsigned, Ball>
[[nodiscard]] bool verify_edges(const PrunedWitnessTree& p, const Bins& bins) {
  for (const auto& e : p.edges) {
    if (!detail::edge_ok(p.kind, p.d, e.slot, p.nodes[e.from].ball, p.nodes[e.to].ball, bins)) return false;
  }
  return true;
}

template <typename Tree>
[[nodiscard]] bool verify_edges(const Tree& t, const family::ChoiceSet& cs) {
  return verify_edges(t, [&cs](unsigned j, Ball u) { return cs.bin(j, u); });
}

/// Same check using the candidates recorded in a trace instead of re-hashing.
template <typename Tree>
[[nodiscard]] bool verify_edges(const Tree& t, const AllocationTrace& trace) {
  std::unordered_map<Ball, std::uint32_t> rec;
  rec.reserve(trace.size());
  for (std::uint32_t i = 0; i < trace.size(); ++i) rec.emplace(trace.balls[i], i);
  return verify_edges(t, [&](unsigned j, Ball u) -> std::uint64_t {
    const auto it = rec.find(u);
    if (it == rec.end()) return std::numeric_limits<std::uint64_t>::max() - j;
    return trace.choices_of(it->second)[j];
  });
}

/// Structural check of a tree against its source trace; describes the first problem found.
[[nodiscard]] inline std::optional<std::string> check_against_trace(const WitnessTree& w, const AllocationTrace& t) {
  for (std::size_t q = 0; q < w.nodes.size(); ++q) {
    const auto& u = w.nodes[q];
    if (t.balls.at(u.record) != u.ball) return "node " + std::to_string(q) + ": ball does not match record";
    if (u.remaining > 0 && u.child_count != w.d) return "node " + std::to_string(q) + ": missing children";
    for (unsigned j = 0; j < u.child_count; ++j) {
      const auto& v = w.nodes[u.first_child + j];
      if (v.record >= u.record) return "node " + std::to_string(q) + ": child inserted later";
      if (t.witness_of(u.record)[j] != v.record) return "node " + std::to_string(q) + ": child is not the witness";
    }
  }
  return std::nullopt;
}

/// What a trial reports about its highest ball.
struct WitnessSummary {
  Ball ball = 0;
  unsigned ball_height = 0;
  std::optional<unsigned> tree_height;  ///< unset when the ball is too low to root a tree
  std::size_t nodes = 0;
  std::size_t collisions = 0;
  bool height_preserved = true;
  bool edges_ok = true;
};

/// Builds the tree of height (h - leaf_height) under the first ball of maximum height h.
template <typename Bins>
[[nodiscard]] WitnessSummary summarize_max_witness(const AllocationTrace& t, unsigned leaf_height, const Bins& bins) {
  WitnessSummary s;
  if (t.size() == 0) return s;
  const auto top = std::max_element(t.heights.begin(), t.heights.end()) - t.heights.begin();
  s.ball = t.balls[top];
  s.ball_height = t.heights[top];
  if (s.ball_height < leaf_height + 1) return s;
  const unsigned l = s.ball_height - leaf_height;
  const auto w = build_witness_tree(t, s.ball, l);
  const auto p = prune(w);
  s.tree_height = l;
  s.nodes = w.nodes.size();
  s.collisions = p.collisions;
  s.height_preserved = tree_height(w) == l && tree_height(p) == l;
  s.edges_ok = verify_edges(w, bins) && verify_edges(p, bins);
  return s;
}

[[nodiscard]] inline WitnessSummary summarize_max_witness(const AllocationTrace& t, unsigned leaf_height,
                                                          const family::ChoiceSet& cs) {
  return summarize_max_witness(t, leaf_height, [&cs](unsigned j, Ball u) { return cs.bin(j, u); });
}

}  // namespace derand::witness
