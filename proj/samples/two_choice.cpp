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

// Throws n balls into n bins with two choices, once with the composed family and
// once with fully random choices, and prints the load histograms side by side.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "derand/analysis.hpp"
#include "derand/family.hpp"
#include "derand/schemes.hpp"
#include "derand/witness.hpp"

using namespace derand;

int main(int argc, char** argv) {
  const unsigned log_n = argc > 1 ? static_cast<unsigned>(std::atoi(argv[1])) : 16;
  const std::uint64_t n = std::uint64_t{1} << log_n;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 0) : 1;

  std::vector<Ball> balls(n);
  std::iota(balls.begin(), balls.end(), Ball{0});

  for (auto mode : {family::FamilyMode::uniform_greedy, family::FamilyMode::always_go_left}) {
    // the default k_g is sized for the proof; 64 is plenty in practice
    const auto p = family::derive_params(n, n, 2, 1, mode, 1, {.kg_override = 64});
    std::printf("%s, n = 2^%u: k = %u, levels =", family::to_string(mode).c_str(), log_n, p.k);
    for (auto b : p.level_bits) std::printf(" %u", b);
    std::printf(", %llu seed bits per choice\n", static_cast<unsigned long long>(p.seed_bits()));

    for (auto kind : {family::FamilyKind::paper, family::FamilyKind::full_random}) {
      const auto cs = family::make_choice_set(p, seed, kind);
      const auto t = mode == family::FamilyMode::uniform_greedy
                         ? schemes::allocate_uniform_greedy(balls, cs)
                         : schemes::allocate_always_go_left(balls, cs, schemes::GroupLayout::of(p));
      std::printf("  %-12s max load %u, bins by load:", family::to_string(kind).c_str(), schemes::max_load(t));
      for (auto [load, bins] : schemes::load_histogram(t)) {
        std::printf(" %u:%llu", load, static_cast<unsigned long long>(bins));
      }
      const auto w = witness::summarize_max_witness(t, 1, cs);
      if (w.tree_height) {
        std::printf("\n  %-12s witness tree under ball %llu: height %u, %zu nodes, %zu collisions, edges %s",
                    "", static_cast<unsigned long long>(w.ball), *w.tree_height, w.nodes, w.collisions,
                    w.edges_ok ? "ok" : "BROKEN");
      }
      std::printf("\n");
    }
  }
  std::printf("predicted: uniform-greedy %.3f, always-go-left %.3f (plus constants)\n",
              analysis::predicted_uniform(n, 2), analysis::predicted_goleft(n, 2));
  return 0;
}
