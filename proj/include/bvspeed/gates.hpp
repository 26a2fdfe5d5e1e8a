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

#include <Eigen/Dense>

namespace bvspeed {

using cd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

namespace gates {

inline Mat2 identity() { return Mat2::Identity(); }

inline Mat2 h() {
  const double s = 1.0 / std::sqrt(2.0);
  Mat2 m;
  m << s, s, s, -s;
  return m;
}

inline Mat2 x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Mat2 y() {
  Mat2 m;
  m << 0, cd(0, -1), cd(0, 1), 0;
  return m;
}

inline Mat2 z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

/// exp(-i theta/2 (cos(phi) X + sin(phi) Y)); theta = pi is the ideal pulse.
inline Mat2 phased_rotation(double phi, double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  Mat2 m;
  m << c, cd(0, -1) * s * std::exp(cd(0, -phi)), cd(0, -1) * s * std::exp(cd(0, phi)), c;
  return m;
}

/// exp(-i theta Z / 2).
inline Mat2 rz(double theta) {
  Mat2 m;
  m << std::exp(cd(0, -theta / 2)), 0, 0, std::exp(cd(0, theta / 2));
  return m;
}

/// CNOT in the basis |c t> with c the more significant bit.
inline Mat4 cnot() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 1) = 1;
  m(2, 3) = m(3, 2) = 1;
  return m;
}

/// Diagonal of exp(-i theta Z⊗Z / 2) over |00>,|01>,|10>,|11>.
inline Eigen::Vector4cd zz_diagonal(double theta) {
  const cd same = std::exp(cd(0, -theta / 2));
  const cd diff = std::exp(cd(0, theta / 2));
  return Eigen::Vector4cd(same, diff, diff, same);
}

}  // namespace gates
}  // namespace bvspeed
