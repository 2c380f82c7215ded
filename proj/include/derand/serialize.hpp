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
 * @file serialize.hpp
 * @brief JSON forms of parameters, reports, trial rows, traces and witness trees.
 */

#pragma once

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "derand/analysis.hpp"
#include "derand/family.hpp"
#include "derand/schemes.hpp"
#include "derand/seed.hpp"
#include "derand/witness.hpp"

namespace derand {

using json = nlohmann::json;

namespace family {

inline void to_json(json& j, const LevelSpec& lv) {
  j = json{{"bits", lv.bits},
           {"wise", lv.wise},
           {"row_mode", dist::to_string(lv.row_mode)},
           {"inner_width", lv.inner_width},
           {"positions", lv.positions},
           {"bias_log2", lv.bias_log2}};
}

inline void to_json(json& j, const FamilyParams& p) {
  j = json{{"n", p.n},
           {"m", p.m},
           {"d", p.d},
           {"c", p.c},
           {"a", p.a},
           {"mode", to_string(p.mode)},
           {"log2n", p.log2n},
           {"k", p.k},
           {"k_g", p.k_g},
           {"kg_overridden", p.kg_overridden},
           {"level_bits", p.level_bits},
           {"group_bits", p.group_bits},
           {"group_size", p.group_size},
           {"reduced", p.reduced},
           {"universe_bits", p.universe_bits},
           {"g_width", p.g_width},
           {"wise_bits", p.wise_bits},
           {"levels", p.levels},
           {"delta1_log2_target", p.delta1_log2_target},
           {"delta2_log2_target", p.delta2_log2_target},
           {"delta1_log2", p.delta1_log2()},
           {"delta2_log2", p.delta2_log2()},
           {"tree_height", p.tree_height},
           {"leaf_height", p.leaf_height},
           {"suffix_wise_target", p.suffix_wise_target},
           {"seed_bits",
            {{"levels", p.level_seed_bits()}, {"g", p.g_seed_bits()}, {"per_choice", p.seed_bits()}}},
           {"kappa", p.kappa()},
           {"suffix_domain", std::uint64_t{1} << p.suffix_bits()},
           {"ideal_suffix_domain", p.ideal_suffix_domain()}};
}

}  // namespace family

namespace analysis {

inline void to_json(json& j, const Report& r) {
  j = json{{"claim", r.claim}, {"bound", r.bound}, {"observed", r.observed}, {"slack", r.slack}, {"pass", r.pass}};
}

inline void from_json(const json& j, Report& r) {
  j.at("claim").get_to(r.claim);
  j.at("bound").get_to(r.bound);
  j.at("observed").get_to(r.observed);
  j.at("slack").get_to(r.slack);
  j.at("pass").get_to(r.pass);
}

inline void to_json(json& j, const TrialRow& r) {
  j = json{{"trial", r.trial},
           {"seed", hex::format_seed(r.seed)},
           {"max_load", r.max_load},
           {"predicted_bound", r.predicted_bound},
           {"collisions_of_max_witness", r.collisions ? json(*r.collisions) : json(nullptr)},
           {"witness_height", r.witness_height ? json(*r.witness_height) : json(nullptr)},
           {"witness_ok", r.witness_ok},
           {"histogram_digest", hex::format_seed(r.histogram_digest)}};
}

inline void from_json(const json& j, TrialRow& r) {
  j.at("trial").get_to(r.trial);
  r.seed = hex::parse_seed(j.at("seed").get<std::string>());
  j.at("max_load").get_to(r.max_load);
  j.at("predicted_bound").get_to(r.predicted_bound);
  const auto& c = j.at("collisions_of_max_witness");
  r.collisions = c.is_null() ? std::nullopt : std::optional<std::uint64_t>(c.get<std::uint64_t>());
  const auto& h = j.at("witness_height");
  r.witness_height = h.is_null() ? std::nullopt : std::optional<unsigned>(h.get<unsigned>());
  j.at("witness_ok").get_to(r.witness_ok);
  r.histogram_digest = hex::parse_seed(j.at("histogram_digest").get<std::string>());
}

inline void to_json(json& j, const TrialStats& s) {
  j = json{{"trials", s.trials},     {"mean", s.mean},
           {"min", s.min},           {"max", s.max},
           {"p50", s.p50},           {"p99", s.p99},
           {"witness_trees", s.witness_trees}, {"max_collisions", s.max_collisions},
           {"witnesses_ok", s.witnesses_ok}};
}

inline void from_json(const json& j, TrialStats& s) {
  j.at("trials").get_to(s.trials);
  j.at("mean").get_to(s.mean);
  j.at("min").get_to(s.min);
  j.at("max").get_to(s.max);
  j.at("p50").get_to(s.p50);
  j.at("p99").get_to(s.p99);
  j.at("witness_trees").get_to(s.witness_trees);
  j.at("max_collisions").get_to(s.max_collisions);
  j.at("witnesses_ok").get_to(s.witnesses_ok);
}

}  // namespace analysis

namespace schemes {

[[nodiscard]] inline Scheme scheme_from_string(const std::string& s) {
  for (auto x : {Scheme::one_choice, Scheme::uniform_greedy, Scheme::always_go_left}) {
    if (to_string(x) == s) return x;
  }
  throw ConfigError("unknown scheme '" + s + "'");
}

/// JSON lines: a header object, then one object per ball in insertion order.
inline void write_trace(std::ostream& os, const AllocationTrace& t) {
  os << json{{"scheme", to_string(t.scheme)}, {"n", t.n}, {"d", t.d}, {"m", t.size()}}.dump() << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    json wit = json::array();
    for (unsigned j = 0; j < t.d; ++j) {
      const auto w = t.witness_ball(i, j);
      wit.push_back(w ? json(*w) : json(nullptr));
    }
    const auto ch = t.choices_of(i);
    os << json{{"ball", t.balls[i]},
               {"choices", std::vector<std::uint32_t>(ch.begin(), ch.end())},
               {"chosen", t.chosen(i)},
               {"height", t.heights[i]},
               {"witness", wit}}
              .dump()
       << '\n';
  }
}

/// Reads write_trace output back; the final bin state is rebuilt by replay.
[[nodiscard]] inline AllocationTrace read_trace(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty trace");
  const auto head = json::parse(line);
  AllocationTrace t;
  t.scheme = scheme_from_string(head.at("scheme").get<std::string>());
  t.n = head.at("n").get<std::uint64_t>();
  t.d = head.at("d").get<unsigned>();
  const auto m = head.at("m").get<std::size_t>();
  std::unordered_map<Ball, std::uint32_t> rec;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(is, line)) throw ConfigError("trace ends after " + std::to_string(i) + " records");
    const auto r = json::parse(line);
    const Ball b = r.at("ball").get<Ball>();
    rec.emplace(b, static_cast<std::uint32_t>(i));
    t.balls.push_back(b);
    const auto ch = r.at("choices").get<std::vector<std::uint32_t>>();
    if (ch.size() != t.d) throw ConfigError("record " + std::to_string(i) + " has the wrong number of choices");
    const auto chosen = r.at("chosen").get<std::uint32_t>();
    const auto slot = std::find(ch.begin(), ch.end(), chosen);
    if (slot == ch.end()) throw ConfigError("record " + std::to_string(i) + ": chosen bin is not a candidate");
    t.choices.insert(t.choices.end(), ch.begin(), ch.end());
    t.slot.push_back(static_cast<std::uint8_t>(slot - ch.begin()));
    t.heights.push_back(r.at("height").get<std::uint32_t>());
    for (const auto& w : r.at("witness")) {
      if (w.is_null()) {
        t.witness.push_back(kNone);
      } else {
        const auto it = rec.find(w.get<Ball>());
        if (it == rec.end()) throw ConfigError("record " + std::to_string(i) + " points at an unknown ball");
        t.witness.push_back(it->second);
      }
    }
  }
  t.final_state = replay(t);
  return t;
}

}  // namespace schemes

namespace witness {

inline void to_json(json& j, const WitnessTree& w) {
  json nodes = json::array(), edges = json::array();
  for (std::size_t i = 0; i < w.nodes.size(); ++i) {
    const auto& n = w.nodes[i];
    nodes.push_back({{"id", i}, {"ball", n.ball}, {"depth", n.depth}, {"remaining", n.remaining}, {"group", n.group}});
    for (unsigned c = 0; c < n.child_count; ++c) edges.push_back({{"from", i}, {"to", n.first_child + c}, {"slot", c}});
  }
  j = json{{"kind", to_string(w.kind)}, {"d", w.d}, {"height", w.height}, {"nodes", nodes}, {"edges", edges},
           {"collision_edges", json::array()}};
}

inline void to_json(json& j, const PrunedWitnessTree& p) {
  json nodes = json::array(), edges = json::array(), coll = json::array();
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const auto& n = p.nodes[i];
    nodes.push_back({{"id", i}, {"ball", n.ball}, {"remaining", n.remaining}, {"group", n.group}});
  }
  for (const auto& e : p.edges) {
    (e.collision ? coll : edges).push_back({{"from", e.from}, {"to", e.to}, {"slot", e.slot}});
  }
  j = json{{"kind", to_string(p.kind)}, {"d", p.d}, {"height", tree_height(p)}, {"nodes", nodes},
           {"edges", edges}, {"collision_edges", coll}, {"collisions", p.collisions}};
}

}  // namespace witness

}  // namespace derand
