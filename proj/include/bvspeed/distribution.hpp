// Copyright 2026 The bvspeed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bvspeed/bitstring.hpp"
#include "bvspeed/bv.hpp"
#include "bvspeed/device.hpp"
#include "bvspeed/errors.hpp"

namespace bvspeed {

/// Probability vector over n-bit outcomes indexed by Bitstring::value().
struct Distribution {
  int num_bits = 0;
  std::vector<double> p;

  explicit Distribution(int n = 0) : num_bits(n), p(std::size_t{1} << n, 0.0) {
    if (n < 0 || n > 30) throw CapacityError("dense distribution limited to 30 bits");
  }

  double operator[](const Bitstring& x) const { return p.at(static_cast<std::size_t>(x.value())); }
  double sum() const {
    double s = 0;
    for (double x : p) s += x;
    return s;
  }
};

inline double total_variation(const Distribution& a, const Distribution& b) {
  if (a.num_bits != b.num_bits) throw ConfigError("total_variation: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.p.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
  return s / 2;
}

/// Marginal over the first m bits.
inline Distribution marginal_prefix(const Distribution& d, int m) {
  if (m > d.num_bits) throw ConfigError("marginal_prefix: m exceeds width");
  Distribution out(m);
  const int drop = d.num_bits - m;
  for (std::size_t i = 0; i < d.p.size(); ++i) out.p[i >> drop] += d.p[i];
  return out;
}

/// Applies independent per-bit confusion; confusion[i] belongs to bit i (MSB first).
inline void apply_confusion(Distribution& d, const std::vector<ReadoutConfusion>& confusion) {
  for (int i = 0; i < d.num_bits; ++i) {
    const auto& c = confusion[static_cast<std::size_t>(i)];
    if (c.p1_given0 == 0 && c.p0_given1 == 0) continue;
    const std::size_t mask = std::size_t{1} << (d.num_bits - 1 - i);
    for (std::size_t x = 0; x < d.p.size(); ++x) {
      if (x & mask) continue;
      const double p0 = d.p[x];
      const double p1 = d.p[x | mask];
      d.p[x] = p0 * (1 - c.p1_given0) + p1 * c.p0_given1;
      d.p[x | mask] = p0 * c.p1_given0 + p1 * (1 - c.p0_given1);
    }
  }
}

/// Empirical distribution of a shot table.
inline Distribution empirical(const ShotTable& t) {
  Distribution d(t.oracle.n());
  if (t.total_shots == 0) return d;
  for (const auto& [x, c] : t.counts) d.p[static_cast<std::size_t>(x.value())] += static_cast<double>(c) / static_cast<double>(t.total_shots);
  return d;
}

}  // namespace bvspeed
