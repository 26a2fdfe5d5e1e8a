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
#include <complex>
#include <cstdint>
#include <vector>

#include "bvspeed/errors.hpp"
#include "bvspeed/gates.hpp"

namespace bvspeed {

namespace kernel {

inline void apply1(std::vector<cd>& v, std::size_t size, int pos, const Mat2& u) {
  const std::size_t stride = std::size_t{1} << pos;
  const cd u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t hi = 0; hi < size; hi += 2 * stride) {
    for (std::size_t i = hi; i < hi + stride; ++i) {
      const cd a = v[i];
      const cd b = v[i + stride];
      v[i] = u00 * a + u01 * b;
      v[i + stride] = u10 * a + u11 * b;
    }
  }
}

inline void apply_diag1(std::vector<cd>& v, std::size_t size, int pos, cd d0, cd d1) {
  const std::size_t mask = std::size_t{1} << pos;
  for (std::size_t i = 0; i < size; ++i) v[i] *= (i & mask) ? d1 : d0;
}

inline void apply_cnot(std::vector<cd>& v, std::size_t size, int c, int t) {
  const std::size_t cm = std::size_t{1} << c;
  const std::size_t tm = std::size_t{1} << t;
  for (std::size_t i = 0; i < size; ++i) {
    if ((i & cm) && !(i & tm)) std::swap(v[i], v[i | tm]);
  }
}

inline void apply_zz(std::vector<cd>& v, std::size_t size, int p0, int p1, double theta) {
  const cd same = std::exp(cd(0, -theta / 2));
  const cd diff = std::exp(cd(0, theta / 2));
  const std::size_t m0 = std::size_t{1} << p0;
  const std::size_t m1 = std::size_t{1} << p1;
  for (std::size_t i = 0; i < size; ++i) v[i] *= (((i & m0) != 0) == ((i & m1) != 0)) ? same : diff;
}

/// Pauli index 0..3 = I, X, Y, Z.
inline void apply_pauli(std::vector<cd>& v, std::size_t size, int pos, int pauli) {
  switch (pauli) {
    case 1: apply1(v, size, pos, gates::x()); break;
    case 2: apply1(v, size, pos, gates::y()); break;
    case 3: apply_diag1(v, size, pos, 1.0, -1.0); break;
    default: break;
  }
}

}  // namespace kernel

/**
 * State vector whose register grows and shrinks: physical qubits are added in
 * |0> when first needed and removed by a computational-basis measurement.
 * Bit b of an amplitude index belongs to the b-th live qubit.
 */
class StateVector {
 public:
  explicit StateVector(int num_slots) : pos_of_(static_cast<std::size_t>(num_slots), -1) { amp_.assign(1, cd(1, 0)); }

  void reserve_qubits(int n) { amp_.reserve(std::size_t{1} << n); }

  int live_count() const { return static_cast<int>(live_.size()); }
  bool live(int q) const { return pos_of_[static_cast<std::size_t>(q)] >= 0; }
  int pos(int q) const { return pos_of_[static_cast<std::size_t>(q)]; }
  std::size_t size() const { return amp_.size(); }
  const std::vector<cd>& amplitudes() const { return amp_; }
  const std::vector<int>& live_qubits() const { return live_; }

  void activate(int q) {
    if (live(q)) return;
    pos_of_[static_cast<std::size_t>(q)] = live_count();
    live_.push_back(q);
    amp_.resize(amp_.size() * 2, cd(0, 0));
  }

  void apply1(int q, const Mat2& u) { kernel::apply1(amp_, amp_.size(), pos(q), u); }
  void apply_diag1(int q, cd d0, cd d1) { kernel::apply_diag1(amp_, amp_.size(), pos(q), d0, d1); }
  void apply_cnot(int c, int t) { kernel::apply_cnot(amp_, amp_.size(), pos(c), pos(t)); }
  void apply_zz(int a, int b, double theta) { kernel::apply_zz(amp_, amp_.size(), pos(a), pos(b), theta); }
  void apply_pauli(int q, int p) { kernel::apply_pauli(amp_, amp_.size(), pos(q), p); }

  double prob1(int q) const {
    const std::size_t mask = std::size_t{1} << pos(q);
    double p = 0;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & mask) p += std::norm(amp_[i]);
    }
    return p;
  }

  double norm2() const {
    double s = 0;
    for (const auto& a : amp_) s += std::norm(a);
    return s;
  }

  void scale(double f) {
    for (auto& a : amp_) a *= f;
  }

  /// Amplitude-damping jump |1> -> |0> on q, unnormalized.
  void lower(int q) {
    const std::size_t stride = std::size_t{1} << pos(q);
    for (std::size_t hi = 0; hi < amp_.size(); hi += 2 * stride) {
      for (std::size_t i = hi; i < hi + stride; ++i) {
        amp_[i] = amp_[i + stride];
        amp_[i + stride] = 0;
      }
    }
  }

  /// Projects q onto `outcome`, renormalizes and removes it from the register.
  void collapse_and_remove(int q, int outcome, double p_outcome) {
    const int p = pos(q);
    const std::size_t low = (std::size_t{1} << p) - 1;
    const std::size_t half = amp_.size() / 2;
    const double f = p_outcome > 0 ? 1.0 / std::sqrt(p_outcome) : 0.0;
    const std::size_t bit = static_cast<std::size_t>(outcome) << p;
    for (std::size_t j = 0; j < half; ++j) {
      const std::size_t i = (j & low) | ((j & ~low) << 1) | bit;
      amp_[j] = amp_[i] * f;
    }
    amp_.resize(half);
    live_.erase(live_.begin() + p);
    pos_of_[static_cast<std::size_t>(q)] = -1;
    for (std::size_t k = static_cast<std::size_t>(p); k < live_.size(); ++k) pos_of_[static_cast<std::size_t>(live_[k])] = static_cast<int>(k);
  }

  void reset() {
    for (int q : live_) pos_of_[static_cast<std::size_t>(q)] = -1;
    live_.clear();
    amp_.assign(1, cd(1, 0));
  }

 private:
  std::vector<cd> amp_;
  std::vector<int> live_;
  std::vector<int> pos_of_;
};

/**
 * Density operator on a fixed list of qubits, stored as the vector |rho>> with
 * row bits above column bits, so U rho U^dagger is (U ⊗ conj U)|rho>>.
 */
class DensityMatrix {
 public:
  DensityMatrix(int num_slots, const std::vector<int>& qubits) : pos_of_(static_cast<std::size_t>(num_slots), -1), n_(static_cast<int>(qubits.size())) {
    for (std::size_t i = 0; i < qubits.size(); ++i) pos_of_[static_cast<std::size_t>(qubits[i])] = static_cast<int>(i);
    v_.assign(std::size_t{1} << (2 * n_), cd(0, 0));
    v_[0] = 1;
  }

  int num_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  int pos(int q) const { return pos_of_[static_cast<std::size_t>(q)]; }
  cd at(std::size_t r, std::size_t c) const { return v_[(r << n_) | c]; }

  void apply1(int q, const Mat2& u) {
    kernel::apply1(v_, v_.size(), pos(q) + n_, u);
    kernel::apply1(v_, v_.size(), pos(q), u.conjugate());
  }
  void apply_diag1(int q, cd d0, cd d1) {
    kernel::apply_diag1(v_, v_.size(), pos(q) + n_, d0, d1);
    kernel::apply_diag1(v_, v_.size(), pos(q), std::conj(d0), std::conj(d1));
  }
  void apply_cnot(int c, int t) {
    kernel::apply_cnot(v_, v_.size(), pos(c) + n_, pos(t) + n_);
    kernel::apply_cnot(v_, v_.size(), pos(c), pos(t));
  }
  void apply_zz(int a, int b, double theta) {
    kernel::apply_zz(v_, v_.size(), pos(a) + n_, pos(b) + n_, theta);
    kernel::apply_zz(v_, v_.size(), pos(a), pos(b), -theta);
  }

  /// Amplitude damping with gamma, then phase flip with probability p_z.
  void relax(int q, double gamma, double p_z) {
    const std::size_t rm = std::size_t{1} << (pos(q) + n_);
    const std::size_t cmk = std::size_t{1} << pos(q);
    const double keep = std::sqrt(1 - gamma) * (1 - 2 * p_z);
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if ((i & rm) || (i & cmk)) continue;
      cd& r00 = v_[i];
      cd& r01 = v_[i | cmk];
      cd& r10 = v_[i | rm];
      cd& r11 = v_[i | rm | cmk];
      r00 += gamma * r11;
      r11 *= (1 - gamma);
      r01 *= keep;
      r10 *= keep;
    }
  }

  /// Uniform Pauli channel over `qs` (1 or 2 qubits) with total error p:
  /// rho -> (1 - l) rho + l Tr_qs(rho) ⊗ I/d, l = p d^2 / (d^2 - 1).
  void depolarize(const std::vector<int>& qs, double p) {
    const std::size_t d = std::size_t{1} << qs.size();
    const double lambda = p * static_cast<double>(d * d) / static_cast<double>(d * d - 1);
    std::size_t rmask = 0, cmask = 0;
    std::vector<std::size_t> rbits, cbits;
    for (int q : qs) {
      rbits.push_back(std::size_t{1} << (pos(q) + n_));
      cbits.push_back(std::size_t{1} << pos(q));
      rmask |= rbits.back();
      cmask |= cbits.back();
    }
    auto offset = [&](const std::vector<std::size_t>& bits, std::size_t x) {
      std::size_t o = 0;
      for (std::size_t j = 0; j < bits.size(); ++j) {
        if (x & (std::size_t{1} << j)) o |= bits[j];
      }
      return o;
    };
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (i & (rmask | cmask)) continue;
      cd tr = 0;
      for (std::size_t x = 0; x < d; ++x) tr += v_[i | offset(rbits, x) | offset(cbits, x)];
      for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = 0; y < d; ++y) {
          cd& e = v_[i | offset(rbits, x) | offset(cbits, y)];
          e *= (1 - lambda);
          if (x == y) e += lambda * tr / static_cast<double>(d);
        }
      }
    }
  }

  double trace() const {
    double t = 0;
    for (std::size_t r = 0; r < dim(); ++r) t += at(r, r).real();
    return t;
  }

  std::vector<double> diagonal() const {
    std::vector<double> out(dim());
    for (std::size_t r = 0; r < dim(); ++r) out[r] = at(r, r).real();
    return out;
  }

  Eigen::MatrixXcd matrix() const {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
    for (std::size_t r = 0; r < dim(); ++r) {
      for (std::size_t c = 0; c < dim(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = at(r, c);
    }
    return m;
  }

 private:
  std::vector<int> pos_of_;
  int n_;
  std::vector<cd> v_;
};

}  // namespace bvspeed
