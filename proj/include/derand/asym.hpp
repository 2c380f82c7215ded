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
 * @file asym.hpp
 * @brief Growth of asymmetric witness trees: the f(l, i) table and phi_d.
 *
 * f(0, i) = 1 and f(l, i) = sum_{j<i} f(l, j) + sum_{j>=i} f(l-1, j), for
 * 1 <= i <= d. phi_d is the root in (1, 2) of x^d = 1 + x + ... + x^(d-1).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "derand/error.hpp"

namespace derand::asym {

/// x^d - (1 + x + ... + x^(d-1)).
[[nodiscard]] inline double phi_residual(unsigned d, double x) noexcept {
  double sum = 0;
  double p = 1;
  for (unsigned i = 0; i < d; ++i) {
    sum += p;
    p *= x;
  }
  return p - sum;
}

/// phi_d by bisection on (1, 2); the residual is -(d-1) at 1 and +1 at 2 and
/// increasing in between.
[[nodiscard]] inline double phi(unsigned d) {
  if (d < 2) throw PreconditionError("phi_d needs d >= 2");
  double lo = 1.0;
  double hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi_residual(d, mid) < 0 ? lo : hi) = mid;
  }
  return std::abs(phi_residual(d, lo)) <= std::abs(phi_residual(d, hi)) ? lo : hi;
}

/// Rows f(0, .) .. f(max_l, .) of the recurrence; row l has entries i = 1..d at [i-1].
/// Entries that would overflow 64 bits saturate at UINT64_MAX when `saturate`
/// is set and raise ParameterError otherwise.
[[nodiscard]] inline std::vector<std::vector<std::uint64_t>> asym_table(unsigned d, unsigned max_l,
                                                                        bool saturate = false) {
  if (d < 2) throw PreconditionError("asymmetric trees need d >= 2");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  auto add = [&](std::uint64_t a, std::uint64_t b) {
    if (a > kMax - b) {
      if (!saturate) throw ParameterError("f(l, i) exceeds 64 bits");
      return kMax;
    }
    return a + b;
  };
  std::vector<std::vector<std::uint64_t>> f(max_l + 1, std::vector<std::uint64_t>(d, 1));
  for (unsigned l = 1; l <= max_l; ++l) {
    // Suffix sums of the previous row give sum_{j>=i} f(l-1, j).
    std::vector<std::uint64_t> tail(d + 1, 0);
    for (unsigned j = d; j-- > 0;) tail[j] = add(tail[j + 1], f[l - 1][j]);
    std::uint64_t head = 0;
    for (unsigned i = 0; i < d; ++i) {
      f[l][i] = add(head, tail[i]);
      if (i + 1 < d) head = add(head, f[l][i]);
    }
  }
  return f;
}

/// f(l, i), 1 <= i <= d.
[[nodiscard]] inline std::uint64_t asym_size(unsigned d, unsigned l, unsigned i) {
  if (i < 1 || i > d) throw PreconditionError("asym_size needs 1 <= i <= d");
  return asym_table(d, l)[l][i - 1];
}

/// Saturating f(l, i) for parameter sizing.
[[nodiscard]] inline std::uint64_t asym_size_saturating(unsigned d, unsigned l, unsigned i) {
  if (i < 1 || i > d) throw PreconditionError("asym_size needs 1 <= i <= d");
  return asym_table(d, l, true)[l][i - 1];
}

/// f tabulated together with the empirical envelope
/// c0 * phi^((l-1)d+i) <= f(l, i) <= c1 * phi^((l-1)d+i) over 1 <= l <= max_l.
struct AsymShape {
  unsigned d = 2;
  unsigned max_l = 0;
  double phi_d = 0;
  double c0 = 0;
  double c1 = 0;
  std::vector<std::vector<std::uint64_t>> f;

  [[nodiscard]] std::uint64_t at(unsigned l, unsigned i) const { return f.at(l).at(i - 1); }

  [[nodiscard]] static AsymShape fit(unsigned d, unsigned max_l) {
    if (max_l < 1) throw PreconditionError("AsymShape::fit needs max_l >= 1");
    AsymShape s;
    s.d = d;
    s.max_l = max_l;
    s.phi_d = phi(d);
    s.f = asym_table(d, max_l);
    s.c0 = std::numeric_limits<double>::infinity();
    s.c1 = 0;
    for (unsigned l = 1; l <= max_l; ++l) {
      for (unsigned i = 1; i <= d; ++i) {
        const double e = static_cast<double>((l - 1) * d + i);
        const double ratio = static_cast<double>(s.f[l][i - 1]) / std::pow(s.phi_d, e);
        s.c0 = std::min(s.c0, ratio);
        s.c1 = std::max(s.c1, ratio);
      }
    }
    return s;
  }
};

/// Largest l for which every f(l, i) fits in 64 bits.
[[nodiscard]] inline unsigned max_exact_height(unsigned d) {
  const auto f = asym_table(d, 4096, true);
  for (unsigned l = 0; l < f.size(); ++l) {
    if (f[l][d - 1] == std::numeric_limits<std::uint64_t>::max()) return l - 1;
  }
  return static_cast<unsigned>(f.size() - 1);
}

}  // namespace derand::asym
