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
 * @file experiment.hpp
 * @brief Runs batches of allocation trials and collects rows, checks and aggregates.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "derand/analysis.hpp"
#include "derand/family.hpp"
#include "derand/schemes.hpp"
#include "derand/serialize.hpp"
#include "derand/witness.hpp"

namespace derand::experiment {

using analysis::ExperimentPlan;
using analysis::Report;
using analysis::TrialRow;

enum class Check { max_load, prefix, level, witness };

[[nodiscard]] inline std::string to_string(Check c) {
  switch (c) {
    case Check::max_load: return "max-load";
    case Check::prefix: return "prefix";
    case Check::level: return "level";
    case Check::witness: return "witness";
  }
  return "?";
}

[[nodiscard]] inline Check check_from_string(const std::string& s) {
  for (auto c : {Check::max_load, Check::prefix, Check::level, Check::witness}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown check '" + s + "'");
}

struct RunConfig {
  ExperimentPlan plan;
  double slack = 1.5;          ///< evenness slack
  double load_slack = 4;       ///< additive slack on the predicted max load
  double heavy_C = 4;          ///< C in the heavy-load bound
  unsigned witness_leaf = 4;   ///< witness tree height = max height - witness_leaf
  std::set<Check> checks;
  unsigned threads = 0;        ///< 0: DERAND_THREADS or the hardware count
};

/// Rejects combinations that cannot run, before any work is done.
inline void validate(const RunConfig& cfg) {
  const auto& p = cfg.plan;
  if (p.trials > (std::uint64_t{1} << 32)) throw ConfigError("too many trials");
  if (p.scheme == schemes::Scheme::one_choice && p.d != 1) throw ConfigError("one-choice runs take --d 1");
  if (p.scheme != schemes::Scheme::one_choice && p.d < 2) throw ConfigError("two-choice schemes need --d >= 2");
  if (p.d > 255) throw ConfigError("d is limited to 255");
  if (!(cfg.slack > 0)) throw ConfigError("slack must be positive");
  if (p.kind != family::FamilyKind::paper && (cfg.checks.count(Check::prefix) || cfg.checks.count(Check::level))) {
    throw ConfigError("evenness checks need --family paper");
  }
  (void)p.params();  // throws on bad n, m, d, c, a or overrides
}

[[nodiscard]] inline unsigned thread_count(unsigned requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("DERAND_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

struct TrialResult {
  TrialRow row;
  std::vector<Report> reports;
};

/// The bound the max-load check uses.
[[nodiscard]] inline double load_limit(const RunConfig& cfg) {
  const auto& p = cfg.plan;
  if (p.scheme == schemes::Scheme::one_choice) return p.predicted(cfg.heavy_C);
  return std::ceil(p.predicted()) + cfg.load_slack;
}

[[nodiscard]] inline TrialResult run_trial(const RunConfig& cfg, const std::shared_ptr<const family::FamilyParams>& params,
                                           std::uint64_t trial) {
  const auto& plan = cfg.plan;
  TrialResult r;
  r.row.trial = trial;
  r.row.seed = plan.seed + trial;
  const family::ChoiceSet cs(params, plan.kind, r.row.seed);
  std::vector<Ball> balls(plan.m);
  std::iota(balls.begin(), balls.end(), Ball{0});

  schemes::AllocationTrace t;
  switch (plan.scheme) {
    case schemes::Scheme::one_choice: t = schemes::allocate_one_choice(balls, cs); break;
    case schemes::Scheme::uniform_greedy: t = schemes::allocate_uniform_greedy(balls, cs); break;
    case schemes::Scheme::always_go_left:
      t = schemes::allocate_always_go_left(balls, cs, schemes::GroupLayout::of(*params));
      break;
  }
  r.row.max_load = schemes::max_load(t);
  r.row.predicted_bound = plan.predicted(cfg.heavy_C);
  r.row.histogram_digest = analysis::histogram_digest(t);

  const auto w = witness::summarize_max_witness(t, cfg.witness_leaf, cs);
  if (w.tree_height) {
    r.row.collisions = w.collisions;
    r.row.witness_height = w.tree_height;
    r.row.witness_ok = w.height_preserved && w.edges_ok;
  }

  const std::string tag = " [trial " + std::to_string(trial) + "]";
  if (cfg.checks.count(Check::max_load)) {
    const double lim = load_limit(cfg);
    r.reports.push_back(Report{"max load" + tag, lim, static_cast<double>(r.row.max_load),
                               plan.scheme == schemes::Scheme::one_choice ? cfg.heavy_C : cfg.load_slack,
                               r.row.max_load <= lim});
  }
  if (cfg.checks.count(Check::witness)) {
    r.reports.push_back(Report{"witness soundness" + tag, 1, r.row.witness_ok ? 1.0 : 0.0, 0, r.row.witness_ok});
  }
  if (cfg.checks.count(Check::prefix)) {
    for (auto rep : analysis::check_prefix_evenness(t, cs, cfg.slack)) {
      rep.claim += tag;
      r.reports.push_back(std::move(rep));
    }
  }
  if (cfg.checks.count(Check::level)) {
    for (auto rep : analysis::check_level_evenness(t.balls, cs)) {
      rep.claim += tag;
      r.reports.push_back(std::move(rep));
    }
  }
  return r;
}

struct RunResult {
  RunConfig config;
  family::FamilyParams params;
  std::vector<TrialRow> rows;     ///< sorted by trial
  std::vector<Report> reports;    ///< per-trial reports in trial order
  std::optional<analysis::TrialStats> stats;

  [[nodiscard]] bool pass() const { return analysis::all_pass(reports); }
};

/// Runs every trial, in parallel when allowed. Trial t uses seed plan.seed + t, so
/// the rows do not depend on the thread count.
[[nodiscard]] inline RunResult run(const RunConfig& cfg) {
  validate(cfg);
  RunResult res;
  res.config = cfg;
  res.params = cfg.plan.params();
  const auto params = std::make_shared<const family::FamilyParams>(res.params);
  const auto trials = cfg.plan.trials;
  std::vector<TrialResult> out(trials);
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(thread_count(cfg.threads), trials));
  if (workers <= 1) {
    for (std::uint64_t t = 0; t < trials; ++t) out[t] = run_trial(cfg, params, t);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t t; (t = next++) < trials;) {
          try {
            out[t] = run_trial(cfg, params, t);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!err) err = std::current_exception();
            next = trials;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  for (auto& r : out) {
    res.rows.push_back(r.row);
    res.reports.insert(res.reports.end(), r.reports.begin(), r.reports.end());
  }
  if (!res.rows.empty()) res.stats = analysis::aggregate(res.rows);
  return res;
}

inline constexpr const char* kCsvHeader =
    "scheme,family,n,m,d,trial,seed,max_load,predicted_bound,collisions_of_max_witness";

inline void emit_csv(std::ostream& os, const RunResult& r) {
  const auto& p = r.config.plan;
  os << kCsvHeader << '\n';
  char bound[64];
  for (const auto& row : r.rows) {
    std::snprintf(bound, sizeof bound, "%.6f", row.predicted_bound);
    os << schemes::to_string(p.scheme) << ',' << family::to_string(p.kind) << ',' << p.n << ',' << p.m << ','
       << p.d << ',' << row.trial << ',' << hex::format_seed(row.seed) << ',' << row.max_load << ',' << bound << ',';
    if (row.collisions) os << *row.collisions;
    os << '\n';
  }
}

[[nodiscard]] inline json config_json(const RunConfig& cfg) {
  const auto& p = cfg.plan;
  json checks = json::array();
  for (auto c : cfg.checks) checks.push_back(to_string(c));
  json j{{"scheme", schemes::to_string(p.scheme)},
         {"family", family::to_string(p.kind)},
         {"n", p.n},
         {"m", p.m},
         {"d", p.d},
         {"c", p.c},
         {"a", p.a},
         {"trials", p.trials},
         {"seed", hex::format_seed(p.seed)},
         {"slack", cfg.slack},
         {"load_slack", cfg.load_slack},
         {"heavy_C", cfg.heavy_C},
         {"witness_leaf", cfg.witness_leaf},
         {"checks", checks}};
  if (p.options.kg_override) j["kg_override"] = *p.options.kg_override;
  if (p.options.wise_bits) j["wise_bits"] = *p.options.wise_bits;
  if (p.options.delta1_bits) j["delta1_bits"] = *p.options.delta1_bits;
  if (p.options.delta2_bits) j["delta2_bits"] = *p.options.delta2_bits;
  return j;
}

[[nodiscard]] inline json report_json(const RunResult& r) {
  const auto& p = r.config.plan;
  json predicted{{"bound", p.predicted(r.config.heavy_C)},
                 {"load_limit", load_limit(r.config)},
                 {"witness_l", r.params.tree_height},
                 {"witness_b", r.params.leaf_height},
                 {"beta", analysis::default_beta(r.params)}};
  if (p.scheme != schemes::Scheme::one_choice) {
    predicted["uniform_greedy"] = analysis::predicted_uniform(p.n, p.d);
    predicted["always_go_left"] = analysis::predicted_goleft(p.n, p.d);
  }
  json j{{"config", config_json(r.config)},
         {"params", r.params},
         {"predicted", predicted},
         {"stats", r.stats ? json(*r.stats) : json(nullptr)},
         {"rows", r.rows},
         {"reports", r.reports},
         {"pass", r.pass()}};
  if (r.config.checks.count(Check::prefix)) {
    j["notes"] = json::array({"evenness slack " + std::to_string(r.config.slack) +
                              " stands in for the asymptotic 1.01; bound uses the achieved prefix domain"});
  }
  return j;
}

}  // namespace derand::experiment
