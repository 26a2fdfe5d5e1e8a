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
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bvspeed/bitstring.hpp"
#include "bvspeed/device.hpp"
#include "bvspeed/gates.hpp"
#include "bvspeed/rng.hpp"

namespace bvspeed {

struct KrausChannel {
  std::vector<Eigen::MatrixXcd> operators;
  int arity = 1;

  /// Frobenius norm of sum K^dagger K - I.
  double completeness_error() const {
    const int d = 1 << arity;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& k : operators) s += k.adjoint() * k;
    return (s - Eigen::MatrixXcd::Identity(d, d)).norm();
  }
};

/// Amplitude-damping and pure-dephasing probabilities for an idle of t seconds.
struct IdleParams {
  double gamma = 0.0;  ///< 1 - exp(-t/T1)
  double p_z = 0.0;    ///< phase-flip probability, (1 - exp(-t/T_phi)) / 2

  bool trivial() const { return gamma == 0.0 && p_z == 0.0; }
};

/// T1, T2 in seconds (+inf allowed).
inline IdleParams idle_params(double t1, double t2, double t) {
  if (!(t1 > 0) || !(t2 > 0)) throw ConfigError("idle channel: T1 and T2 must be positive");
  if (t2 > 2 * t1 * (1 + 1e-12)) throw ConfigError("idle channel: T2 exceeds 2*T1");
  if (t < 0) throw ConfigError("idle channel: negative duration");
  IdleParams p;
  if (t == 0) return p;
  p.gamma = std::isinf(t1) ? 0.0 : -std::expm1(-t / t1);
  const double rate_phi = 1.0 / t2 - 0.5 / t1;  // 1/T_phi
  p.p_z = rate_phi > 0 ? -0.5 * std::expm1(-t * rate_phi) : 0.0;
  return p;
}

/// Amplitude damping followed by dephasing, as four Kraus operators (one for t = 0).
inline KrausChannel idle_channel(double t1, double t2, double t) {
  const IdleParams p = idle_params(t1, t2, t);
  KrausChannel ch;
  if (p.trivial()) {
    ch.operators.push_back(Eigen::MatrixXcd::Identity(2, 2));
    return ch;
  }
  Mat2 a0;
  a0 << 1, 0, 0, std::sqrt(1 - p.gamma);
  Mat2 a1;
  a1 << 0, std::sqrt(p.gamma), 0, 0;
  for (const Mat2& a : {a0, a1}) {
    ch.operators.push_back(std::sqrt(1 - p.p_z) * a);
    ch.operators.push_back(std::sqrt(p.p_z) * gates::z() * a);
  }
  return ch;
}

/// Uniform Pauli channel; p is the total probability of a non-identity Pauli.
inline KrausChannel depolarizing(double p, int arity) {
  if (!(p >= 0 && p <= 1)) throw ConfigError("depolarizing: p must be in [0,1]");
  if (arity != 1 && arity != 2) throw ConfigError("depolarizing: arity must be 1 or 2");
  const Mat2 paulis[4] = {gates::identity(), gates::x(), gates::y(), gates::z()};
  KrausChannel ch;
  ch.arity = arity;
  if (arity == 1) {
    ch.operators.push_back(std::sqrt(1 - p) * Eigen::MatrixXcd(paulis[0]));
    for (int i = 1; i < 4; ++i) ch.operators.push_back(std::sqrt(p / 3) * Eigen::MatrixXcd(paulis[i]));
    return ch;
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Eigen::MatrixXcd kron(4, 4);
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) kron.block(2 * r, 2 * c, 2, 2) = paulis[i](r, c) * paulis[j];
      }
      const double w = (i == 0 && j == 0) ? 1 - p : p / 15;
      ch.operators.push_back(std::sqrt(w) * kron);
    }
  }
  return ch;
}

/// Independent per-bit flips; confusion[i] applies to bit i.
inline Bitstring readout_sample(const Bitstring& true_bits, std::span<const ReadoutConfusion> confusion,
                                std::mt19937_64& rng) {
  Bitstring out = true_bits;
  for (std::size_t i = 0; i < true_bits.size(); ++i) {
    const bool bit = true_bits[i];
    const double p_flip = bit ? confusion[i].p0_given1 : confusion[i].p1_given0;
    if (p_flip > 0 && uniform01(rng) < p_flip) out = out.with_bit(i, !bit);
  }
  return out;
}

/// Quasi-static detunings in rad/s, one per qubit, fixed for a trajectory.
inline std::vector<double> sample_static_fields(const NoiseConfig& config, int num_qubits, std::mt19937_64& rng) {
  std::vector<double> d(static_cast<std::size_t>(num_qubits), 0.0);
  if (!config.detuning_on()) return d;
  for (auto& x : d) x = config.detuning_sigma * standard_normal(rng);
  return d;
}

}  // namespace bvspeed
