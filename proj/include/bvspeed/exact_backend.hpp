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
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bvspeed/distribution.hpp"
#include "bvspeed/program.hpp"
#include "bvspeed/state.hpp"

namespace bvspeed {

struct ExactOptions {
  int density_cap = 7;                ///< qubits for the density-operator path
  int pure_cap = 21;                  ///< qubits for the noise-free state-vector path
  int gh_nodes = 21;                  ///< Gauss-Hermite nodes per detuned qubit
  std::size_t max_grid_points = 9261; ///< product-grid size limit (21^3)
};

/// Nodes and weights for E[f(Z)], Z ~ N(0,1), by Golub-Welsch.
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite_normal(int nodes) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int k = 1; k < nodes; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<double> x(static_cast<std::size_t>(nodes)), w(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    x[static_cast<std::size_t>(i)] = std::sqrt(2.0) * es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    w[static_cast<std::size_t>(i)] = v0 * v0;
  }
  return {x, w};
}

namespace detail {

inline std::vector<double> measured_distribution(const std::vector<double>& diag, const NoisyProgram& prog,
                                                 const std::vector<int>& pos_of_active) {
  const int m = static_cast<int>(prog.measured.size());
  std::vector<double> out(std::size_t{1} << m, 0.0);
  for (std::size_t r = 0; r < diag.size(); ++r) {
    if (diag[r] == 0) continue;
    std::size_t x = 0;
    for (int i = 0; i < m; ++i) {
      const int pos = pos_of_active[static_cast<std::size_t>(prog.measured[static_cast<std::size_t>(i)])];
      if (pos >= 0 && ((r >> pos) & 1U)) x |= std::size_t{1} << (m - 1 - i);
    }
    out[x] += diag[r];
  }
  return out;
}

template <class State>
void run_exact(State& s, const NoisyProgram& prog, const std::vector<double>& delta) {
  using Op = Instruction::Op;
  for (const auto& in : prog.instructions) {
    switch (in.op) {
      case Op::Unitary1: s.apply1(in.q0, in.u); break;
      case Op::Cnot: s.apply_cnot(in.q0, in.q1); break;
      case Op::Detune: {
        const double th = delta[static_cast<std::size_t>(in.q0)] * in.a;
        if (th != 0) s.apply_diag1(in.q0, std::exp(cd(0, -th / 2)), std::exp(cd(0, th / 2)));
        break;
      }
      case Op::ZZ: s.apply_zz(in.q0, in.q1, in.a); break;
      case Op::Depol1:
      case Op::Depol2:
      case Op::Relax:
        if constexpr (requires { s.relax(0, 0.0, 0.0); }) {
          if (in.op == Op::Relax) {
            s.relax(in.q0, in.a, in.b);
          } else if (in.op == Op::Depol1) {
            s.depolarize({in.q0}, in.a);
          } else {
            s.depolarize({in.q0, in.q1}, in.a);
          }
        } else {
          throw ConfigError("stochastic channel in a pure-state simulation");
        }
        break;
    }
  }
}

}  // namespace detail

/**
 * Exact output distribution of the measured bits. Uses a density operator when
 * the program has stochastic channels and a state vector otherwise; static
 * detuning is averaged on a Gauss-Hermite product grid over detuned qubits.
 */
inline Distribution simulate_exact(const NoisyProgram& prog, const ExactOptions& opt = {}) {
  const int m = static_cast<int>(prog.measured.size());
  const bool stochastic = prog.has_stochastic();
  const int active = static_cast<int>(prog.active.size());
  if (stochastic && active > opt.density_cap) {
    throw CapacityError("exact backend: " + std::to_string(active) + " active qubits exceed density cap " +
                        std::to_string(opt.density_cap));
  }
  if (!stochastic && active > opt.pure_cap) {
    throw CapacityError("exact backend: " + std::to_string(active) + " active qubits exceed state-vector cap " +
                        std::to_string(opt.pure_cap));
  }
  const std::vector<int> detuned = prog.detuning_sigma > 0 ? prog.detuned_qubits() : std::vector<int>{};
  std::size_t grid = 1;
  for (std::size_t i = 0; i < detuned.size(); ++i) {
    grid *= static_cast<std::size_t>(opt.gh_nodes);
    if (grid > opt.max_grid_points) {
      throw CapacityError("exact backend: " + std::to_string(detuned.size()) + " detuned qubits exceed the quadrature grid limit");
    }
  }
  auto [nodes, weights] = gauss_hermite_normal(opt.gh_nodes);

  std::vector<int> pos_of(static_cast<std::size_t>(prog.num_qubits), -1);
  for (std::size_t i = 0; i < prog.active.size(); ++i) pos_of[static_cast<std::size_t>(prog.active[i])] = static_cast<int>(i);

  Distribution out(m);
  std::vector<double> delta(static_cast<std::size_t>(prog.num_qubits), 0.0);
  for (std::size_t g = 0; g < grid; ++g) {
    double w = 1.0;
    std::size_t rem = g;
    for (int q : detuned) {
      const std::size_t idx = rem % static_cast<std::size_t>(opt.gh_nodes);
      rem /= static_cast<std::size_t>(opt.gh_nodes);
      delta[static_cast<std::size_t>(q)] = prog.detuning_sigma * nodes[idx];
      w *= weights[idx];
    }
    std::vector<double> diag;
    if (stochastic) {
      DensityMatrix rho(prog.num_qubits, prog.active);
      detail::run_exact(rho, prog, delta);
      diag = rho.diagonal();
    } else {
      StateVector psi(prog.num_qubits);
      for (int q : prog.active) psi.activate(q);
      detail::run_exact(psi, prog, delta);
      diag.resize(psi.size());
      for (std::size_t i = 0; i < psi.size(); ++i) diag[i] = std::norm(psi.amplitudes()[i]);
    }
    const auto part = detail::measured_distribution(diag, prog, pos_of);
    for (std::size_t x = 0; x < part.size(); ++x) out.p[x] += w * part[x];
  }
  apply_confusion(out, prog.confusion);
  return out;
}

inline Distribution simulate_exact(const TimedCircuit& c, const DeviceModel& device, const NoiseConfig& noise,
                                   const ExactOptions& opt = {}) {
  return simulate_exact(compile_program(c, device, noise), opt);
}

}  // namespace bvspeed
