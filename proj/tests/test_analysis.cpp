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
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "derand/analysis.hpp"
#include "derand/serialize.hpp"

namespace {

using derand::Ball;
namespace an = derand::analysis;
namespace dist = derand::dist;
namespace fam = derand::family;
namespace sch = derand::schemes;
using derand::gf2x::FieldCtx;

std::vector<Ball> ids(Ball from, Ball to) {
  std::vector<Ball> v(to - from + 1);
  std::iota(v.begin(), v.end(), from);
  return v;
}

TEST(Predicted, Uniform) {
  EXPECT_DOUBLE_EQ(an::predicted_uniform(1 << 16, 4), 2.0);
  EXPECT_DOUBLE_EQ(an::predicted_uniform(1 << 16, 2), 4.0);
  EXPECT_NEAR(an::predicted_uniform(1 << 20, 2), 4.321928094887362, 1e-12);
  EXPECT_THROW((void)an::predicted_uniform(2, 2), derand::PreconditionError);
  EXPECT_THROW((void)an::predicted_uniform(16, 1), derand::PreconditionError);
}

TEST(Predicted, GoLeft) {
  // 4 / (2 log2 of the golden ratio), evaluated separately
  EXPECT_NEAR(an::predicted_goleft(1 << 16, 2), 2.8808401808251127, 1e-9);
  EXPECT_NEAR(an::predicted_goleft(1 << 16, 3), 4.0 / (3 * std::log2(1.839286755214161)), 1e-9);
  for (unsigned d = 2; d <= 8; ++d) {
    for (unsigned e = 4; e <= 40; ++e) {
      EXPECT_LT(an::predicted_goleft(1ULL << e, d), an::predicted_uniform(1ULL << e, d)) << d << " " << e;
    }
  }
}

TEST(Predicted, Heavy) {
  EXPECT_DOUBLE_EQ(an::predicted_heavy(1 << 16, 1 << 24, 4), 512.0);
  EXPECT_DOUBLE_EQ(an::predicted_heavy(1 << 16, 1 << 24, 0), 256.0);
  for (double C : {0.5, 1.0, 3.0}) EXPECT_GE(an::predicted_heavy(1 << 10, 1 << 20, C), 1024.0);
  EXPECT_THROW((void)an::predicted_heavy(1 << 16, 1 << 16, 4), derand::PreconditionError);
}

TEST(Chernoff, Values) {
  EXPECT_NEAR(an::chernoff_tail(10, 1e-9), 1.0, 1e-12);
  EXPECT_NEAR(an::chernoff_tail(3 / 0.25, 0.5), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(an::chernoff_tail(256, 1) / 8.71373224681498e-38, 1.0, 1e-12);
  double prev = 2;
  for (double mu = 1; mu < 100; mu *= 1.5) {
    const double v = an::chernoff_tail(mu, 0.3);
    EXPECT_LT(v, prev);
    prev = v;
  }
  prev = 2;
  for (double dl = 0.05; dl <= 1; dl += 0.05) {
    const double v = an::chernoff_tail(20, dl);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_THROW((void)an::chernoff_tail(1, 0), derand::PreconditionError);
  EXPECT_THROW((void)an::chernoff_tail(1, 1.5), derand::PreconditionError);
}

TEST(ExactBias, Oracles) {
  EXPECT_EQ(an::exact_bias(dist::UniformSeedSpace(3, 3)), 0.0);
  EXPECT_EQ(an::exact_bias(dist::ConstantSeedSpace(5, 0b10110)), 1.0);
  const auto f6 = FieldCtx::standard(6);
  const double b = an::exact_bias(dist::EpsBiasedSeedSpace(f6, {0, 1, 2, 3, 4, 5, 6, 7}));
  EXPECT_LE(b, 0.125);
  EXPECT_GT(b, 0.0);
  EXPECT_THROW((void)an::exact_bias(dist::EpsBiasedSeedSpace(f6, {0, 1, 2}), 100), derand::BudgetExceeded);
}

TEST(ExactBias, KWiseOnFewCoordinatesIsUnbiased) {
  const auto f4 = FieldCtx::standard(4);
  for (unsigned k = 1; k <= 3; ++k) {
    std::vector<Ball> balls;
    for (Ball u = 0; u < k; ++u) balls.push_back(3 * u + 1);
    EXPECT_EQ(an::exact_bias(dist::KWiseSeedSpace(f4, k, 4, balls)), 0.0) << k;
  }
  // k + 1 coordinates of a k-wise source are not independent in general
  EXPECT_GT(an::exact_bias(dist::KWiseSeedSpace(f4, 1, 4, {1, 2})), 0.0);
}

TEST(PrefixEvenness, EmptyAndDegenerate) {
  const std::vector<Ball> none;
  auto zero = [](unsigned, std::span<const Ball>, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
  };
  const auto e = an::check_prefix_evenness(none, 2, 6, 1.5, zero);
  ASSERT_EQ(e.size(), 2U);
  EXPECT_EQ(e[0].observed, 0.0);
  EXPECT_TRUE(an::all_pass(e));
  const auto balls = ids(0, 1023);
  const auto r = an::check_prefix_evenness(balls, 2, 6, 1.5, zero);
  EXPECT_FALSE(an::all_pass(r));
  EXPECT_EQ(r[0].observed, 1024.0);
  EXPECT_DOUBLE_EQ(r[0].bound, 1.5 * 1024 / 64);
}

TEST(PrefixEvenness, TraceRouteMatchesRehash) {
  const auto balls = ids(0, 4095);
  for (auto mode : {fam::FamilyMode::uniform_greedy, fam::FamilyMode::always_go_left}) {
    const auto p = fam::derive_params(4096, 4096, 2, 1, mode, 1, {.kg_override = 8});
    const auto cs = fam::make_choice_set(p, 17);
    const auto t = mode == fam::FamilyMode::uniform_greedy
                       ? sch::allocate_uniform_greedy(balls, cs)
                       : sch::allocate_always_go_left(balls, cs, sch::GroupLayout::of(p));
    const auto a = an::check_prefix_evenness(t, cs, 1.5);
    const auto b = an::check_prefix_evenness(t, cs, 1.5, true);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, an::check_prefix_evenness(t, cs, 1.5));
  }
  const auto p3 = fam::derive_params(4096, 4096, 3, 1, fam::FamilyMode::always_go_left, 1, {.kg_override = 8});
  ASSERT_TRUE(p3.reduced);
  const auto cs3 = fam::make_choice_set(p3, 17);
  const auto t3 = sch::allocate_always_go_left(balls, cs3, sch::GroupLayout::of(p3));
  EXPECT_EQ(an::check_prefix_evenness(t3, cs3, 1.5).size(), 3U);
}

TEST(LevelEvenness, BaseCaseAndRandomOutputs) {
  const std::uint64_t n = 1 << 20;
  const auto p = fam::derive_params(n, n, 2, 1, fam::FamilyMode::uniform_greedy, 1, {.kg_override = 4});
  ASSERT_EQ(p.k, 1U);
  std::mt19937_64 rng(1);
  std::vector<std::vector<std::uint64_t>> lv(1, std::vector<std::uint64_t>(n));
  for (auto& v : lv[0]) v = rng() & 1023;
  const double beta = std::pow(20.0, -0.2);
  const auto r = an::check_level_evenness(lv, n, p, beta);
  ASSERT_EQ(r.size(), 2U);
  EXPECT_EQ(r[0].bound, static_cast<double>(n));
  EXPECT_TRUE(r[0].pass);
  EXPECT_DOUBLE_EQ(r[1].bound, (1 + beta) * 1024);
  EXPECT_TRUE(r[1].pass);
  EXPECT_DOUBLE_EQ(an::default_beta(p), beta);
}

TEST(LevelEvenness, ComposedFamilyAndPurity) {
  const auto balls = ids(0, (1 << 16) - 1);
  const auto p = fam::derive_params(1 << 16, 1 << 16, 2, 1, fam::FamilyMode::uniform_greedy, 1, {.kg_override = 4});
  const auto cs = fam::make_choice_set(p, 3);
  const auto a = an::check_level_evenness(balls, cs);
  EXPECT_TRUE(an::all_pass(a));
  EXPECT_EQ(a, an::check_level_evenness(balls, fam::make_choice_set(p, 3)));
}

TEST(LevelEvenness, HeavyLoad) {
  const std::uint64_t n = 1 << 16, m = 1 << 24;
  const auto p = fam::derive_params(n, m, 1, 1, fam::FamilyMode::heavy_load, 2);
  const double beta = an::default_beta(p);
  EXPECT_DOUBLE_EQ(beta, 4 * 3 * 4 * std::sqrt(1.0 / 256));
  const double k = p.k;
  EXPECT_DOUBLE_EQ(an::level_factor(p, 1, beta), 1 + beta / ((k + 1) * (k + 1)));
  const auto cs = fam::make_choice_set(p, 5);
  const auto r = an::check_level_evenness(ids(0, m - 1), cs);
  EXPECT_TRUE(an::all_pass(r));
}

an::TrialRow row(std::uint64_t t, std::uint32_t load) {
  an::TrialRow r;
  r.trial = t;
  r.seed = 100 + t;
  r.max_load = load;
  r.predicted_bound = 4.3;
  if (t % 2) r.collisions = t;
  return r;
}

TEST(Aggregate, Basics) {
  const std::vector<an::TrialRow> one{row(0, 5)};
  const auto s = an::aggregate(one);
  EXPECT_EQ(s.mean, 5.0);
  EXPECT_EQ(s.min, 5U);
  EXPECT_EQ(s.max, 5U);

  std::vector<an::TrialRow> rows;
  for (std::uint32_t t = 0; t < 37; ++t) rows.push_back(row(t, 3 + (t * 7) % 5));
  const auto base = an::aggregate(rows);
  std::mt19937 rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(rows.begin(), rows.end(), rng);
    EXPECT_EQ(an::aggregate(rows), base);
  }
  EXPECT_EQ(base.min, 3U);
  EXPECT_EQ(base.max, 7U);
  EXPECT_EQ(base.witness_trees, 18U);
  EXPECT_EQ(base.max_collisions, 35U);
  EXPECT_THROW((void)an::aggregate(std::vector<an::TrialRow>{}), derand::PreconditionError);

  const std::vector<std::uint32_t> sorted{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(an::percentile(sorted, 0.5), 5U);
  EXPECT_EQ(an::percentile(sorted, 0.99), 10U);
}

TEST(Aggregate, HandTrace) {
  const auto balls = ids(1, 4);
  const auto t = sch::allocate_from_choices(sch::Scheme::uniform_greedy, balls, 2, 4, {0, 1, 0, 1, 0, 1, 0, 1});
  an::TrialRow r;
  r.max_load = sch::max_load(t);
  const std::vector<an::TrialRow> rows{r};
  EXPECT_EQ(an::aggregate(rows).mean, 2.0);
}

TEST(Json, RoundTrips) {
  const an::Report rep{"prefix evenness, choice 0", 1536, 1120, 1.5, true};
  const derand::json j = rep;
  EXPECT_EQ(j.size(), 5U);
  EXPECT_EQ(derand::json::parse(j.dump()).get<an::Report>(), rep);

  for (auto r : {row(0, 4), row(3, 6)}) {
    r.witness_height = r.collisions ? std::optional<unsigned>(2) : std::nullopt;
    r.histogram_digest = 0xfeedface12345678ULL;
    EXPECT_EQ(derand::json::parse(derand::json(r).dump()).get<an::TrialRow>(), r);
  }
  std::vector<an::TrialRow> rows{row(0, 4), row(1, 5)};
  const auto s = an::aggregate(rows);
  EXPECT_EQ(derand::json::parse(derand::json(s).dump()).get<an::TrialStats>(), s);
}

TEST(Plan, DerivedValues) {
  an::ExperimentPlan plan;
  plan.scheme = sch::Scheme::uniform_greedy;
  plan.n = plan.m = 1 << 20;
  plan.d = 2;
  plan.c = 2;
  const double inner = std::log2(20.0) + std::log2(6.0) + 5 + 6;
  EXPECT_EQ(plan.l(), static_cast<std::uint64_t>(std::ceil(inner)));
  EXPECT_EQ(plan.b(), 21U);
  EXPECT_DOUBLE_EQ(plan.beta(), std::pow(20.0, -0.2));
  plan.trials = 0;
  EXPECT_THROW((void)plan.params(), derand::ConfigError);
  plan.trials = 1;
  plan.scheme = sch::Scheme::one_choice;
  plan.d = 1;
  plan.n = 1 << 16;
  plan.m = 1 << 24;
  plan.a = 2;
  EXPECT_DOUBLE_EQ(plan.predicted(), 512.0);
}

}  // namespace
