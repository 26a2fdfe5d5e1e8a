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

#include <optional>

#include "bvspeed/dd.hpp"
#include "bvspeed/exact_backend.hpp"
#include "bvspeed/routing.hpp"

namespace bvspeed {

struct ReductionOptions {
  Setup setup = Setup::Standard;
  std::optional<DDSequence> dd;
  DDOptions dd_options;
  ExactOptions exact;
  double threshold = 1e-9;
};

struct ReductionReport {
  double max_tvd = 0.0;
  bool pass = false;
  Distribution reduced;  ///< BV-n marginalized to m bits
  Distribution direct;   ///< BV-m
};

/// Routed (and optionally DD-dressed) circuit for b = 1^k 0^(n-k).
inline TimedCircuit reduction_circuit(int n, int k, const DeviceModel& device, const ReductionOptions& opt) {
  OracleSpec spec(Bitstring::ones_then_zeros(static_cast<std::size_t>(n), static_cast<std::size_t>(k)));
  RouteOptions ro;
  ro.setup = opt.setup;
  TimedCircuit c = route_bv(spec, device, ro).circuit;
  if (opt.dd) {
    DDOptions d = opt.dd_options;
    if (d.pulse_duration <= 0) d.pulse_duration = device.durations.pulse();
    c = schedule_dd(c, *opt.dd, d).circuit;
  }
  return c;
}

/// Exact TVD between BV-n traced down to m qubits and BV-m, both for 1^k 0^(.-k).
inline ReductionReport check_reduction_equivalence(int n, int m, int k, const DeviceModel& device,
                                                   const NoiseConfig& noise, const ReductionOptions& opt = {}) {
  if (!(k <= m && m < n)) throw ConfigError("reduction check needs k <= m < n");
  const Distribution big = simulate_exact(reduction_circuit(n, k, device, opt), device, noise, opt.exact);
  ReductionReport r{0.0, false, marginal_prefix(big, m),
                    simulate_exact(reduction_circuit(m, k, device, opt), device, noise, opt.exact)};
  r.max_tvd = total_variation(r.reduced, r.direct);
  r.pass = r.max_tvd < opt.threshold;
  return r;
}

}  // namespace bvspeed
