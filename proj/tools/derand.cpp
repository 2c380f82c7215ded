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

// derand: run balanced-allocation trials with hash families built from small-bias
// and k-wise independent sources, and report loads and checks.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "derand/experiment.hpp"

namespace {

using namespace derand;

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

/// Smallest a with m <= n log^a n.
unsigned default_a(std::uint64_t n, std::uint64_t m) {
  const double L = std::log2(static_cast<double>(n));
  unsigned a = 1;
  while (static_cast<double>(n) * std::pow(L, a) < static_cast<double>(m) && a < 64) ++a;
  return a;
}

std::uint64_t parse_master_seed(const std::string& s) {
  if (s.starts_with("0x") || s.starts_with("0X")) return hex::parse_seed(s);
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("bad seed '" + s + "'");
  return v;
}

bool write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  f << body;
  f.close();
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced allocation with derandomized hash families"};
  app.allow_windows_style_options(false);

  std::string scheme = "uniform-greedy", fam_name = "paper", format = "csv", out, seed_text = "0";
  std::uint64_t n = 1 << 16, m = 0, trials = 1;
  std::optional<unsigned> d, a;
  double c = 1;
  std::optional<std::uint64_t> kg_override;
  std::optional<double> wise_bits, delta1_bits, delta2_bits;
  experiment::RunConfig cfg;
  std::vector<std::string> checks;
  bool params_only = false;

  app.add_option("--scheme", scheme, "one-choice | uniform-greedy | always-go-left")
      ->check(CLI::IsMember({"one-choice", "uniform-greedy", "always-go-left"}));
  app.add_option("--family", fam_name, "paper | full-random | kwise")
      ->check(CLI::IsMember({"paper", "full-random", "kwise"}));
  app.add_option("--n", n, "number of bins (power of two)");
  app.add_option("--m", m, "number of balls (default n)");
  app.add_option("--d", d, "choices per ball (default 2, or 1 for one-choice)");
  app.add_option("--c", c, "failure exponent c");
  app.add_option("--a", a, "heavy-load exponent, m <= n log^a n (default: smallest that fits)");
  app.add_option("--trials", trials, "number of trials");
  app.add_option("--seed", seed_text, "master seed, decimal or 0x-hex");
  app.add_option("--out", out, "output path (default stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--kg-override", kg_override, "independence of g");
  app.add_option("--slack", cfg.slack, "evenness slack factor");
  app.add_option("--load-slack", cfg.load_slack, "additive slack for the max-load check");
  app.add_option("--heavy-c", cfg.heavy_C, "C in the heavy-load bound");
  app.add_option("--check", checks, "max-load | prefix | level | witness (repeatable)")
      ->check(CLI::IsMember({"max-load", "prefix", "level", "witness"}));
  app.add_option("--wise-bits", wise_bits, "wise-ness budget of the prefix levels, in bits");
  app.add_option("--delta1-bits", delta1_bits, "-log2 of the prefix-level bias");
  app.add_option("--delta2-bits", delta2_bits, "-log2 of the suffix-level bias");
  app.add_option("--witness-leaf-height", cfg.witness_leaf, "witness tree height = max height minus this");
  app.add_option("--threads", cfg.threads, "worker threads (default DERAND_THREADS or all cores)");
  app.add_flag("--params-only", params_only, "print the derived parameters and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    auto& plan = cfg.plan;
    plan.scheme = schemes::scheme_from_string(scheme);
    plan.kind = fam_name == "paper" ? family::FamilyKind::paper
                : fam_name == "full-random" ? family::FamilyKind::full_random
                                            : family::FamilyKind::kwise;
    plan.n = n;
    plan.m = m ? m : n;
    plan.d = d.value_or(plan.scheme == schemes::Scheme::one_choice ? 1 : 2);
    plan.c = c;
    plan.a = a.value_or(plan.scheme == schemes::Scheme::one_choice && n >= 4 ? default_a(n, plan.m) : 1);
    plan.trials = trials;
    plan.seed = parse_master_seed(seed_text);
    plan.options.kg_override = kg_override;
    plan.options.wise_bits = wise_bits;
    plan.options.delta1_bits = delta1_bits;
    plan.options.delta2_bits = delta2_bits;
    for (const auto& s : checks) cfg.checks.insert(experiment::check_from_string(s));
    experiment::validate(cfg);
    if (params_only) {
      std::cout << json(plan.params()).dump(2) << '\n';
      return kPass;
    }
  } catch (const Error& e) {
    std::cerr << "derand: " << e.what() << '\n';
    return kUsage;
  }

  experiment::RunResult res;
  try {
    res = experiment::run(cfg);
  } catch (const Error& e) {
    std::cerr << "derand: " << e.what() << '\n';
    return kUsage;
  }

  std::ostringstream csv;
  experiment::emit_csv(csv, res);
  const std::string report = experiment::report_json(res).dump(2) + "\n";
  if (out.empty()) {
    std::cout << (format == "csv" ? csv.str() : report);
  } else if (format == "csv") {
    if (!write_file(out, csv.str()) || !write_file(out + ".json", report)) {
      std::cerr << "derand: cannot write " << out << '\n';
      return kIo;
    }
  } else if (!write_file(out, report)) {
    std::cerr << "derand: cannot write " << out << '\n';
    return kIo;
  }
  for (const auto& r : res.reports) {
    if (!r.pass) std::cerr << "FAIL " << r.claim << ": observed " << r.observed << " > bound " << r.bound << '\n';
  }
  return res.pass() ? kPass : kCheckFailed;
}
