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

// Device profiles and experiment configs are JSON documents with a versioned
// header key. Profile:
//
//   {"bvspeed-profile": 1, "name": "montreal-like", "layout": "heavy-hex-27",
//    "blacklist": [], "dt_ns": [2, 9],
//    "durations_dt": {"gate_1q": 180, "gate_2q": 1935, "readout": 23400},
//    "t1_us": 113.2, "t2_us": 99.72, "p1q": 0.0004, "p2q": 0.0135,
//    "readout_error": 0.0259,
//    "duration_model": {"slope_us": 0.40, "intercept_us": 5.28},
//    "noise": {"detuning_sigma": 0, "zz_rate": 0, "flip_angle_eps": 0}}
//
// t1_us/t2_us take a number, a per-qubit array, or null (no decay).
// readout_error takes a number or {"p1_given0": .., "p0_given1": ..}.
// The config schema is documented in README.md.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvspeed/analysis.hpp"
#include "bvspeed/dd.hpp"
#include "bvspeed/device.hpp"
#include "bvspeed/routing.hpp"

#ifndef BVSPEED_PROFILE_DIR
#define BVSPEED_PROFILE_DIR "profiles"
#endif

namespace bvspeed {

using json = nlohmann::json;

inline constexpr int kProfileVersion = 1;
inline constexpr int kConfigVersion = 1;

struct DeviceProfile {
  std::string name;
  std::string layout;
  DeviceModel device;
  DurationModel duration;
  NoiseConfig noise;
};

namespace detail {

inline json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void check_header(const json& j, const char* key, int version, const std::string& source) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(source + ": missing \"" + std::string(key) + "\" header");
  if (!j.at(key).is_number_integer() || j.at(key).get<int>() != version) {
    throw ConfigError(source + ": unsupported " + std::string(key) + " version (expected " + std::to_string(version) + ")");
  }
}

/// Rejects keys outside `allowed`, so typos fail loudly.
inline void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ConfigError(where + ": unknown key \"" + k + "\"");
    }
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": bad value for \"" + std::string(key) + "\"");
  }
}

inline std::vector<double> per_qubit(const json& j, const char* key, int nq, const std::string& where) {
  const double inf = std::numeric_limits<double>::infinity();
  if (!j.contains(key)) throw ConfigError(where + ": missing \"" + std::string(key) + "\"");
  const json& v = j.at(key);
  if (v.is_null()) return std::vector<double>(static_cast<std::size_t>(nq), inf);
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(nq), v.get<double>());
  if (v.is_array() && v.size() == static_cast<std::size_t>(nq)) {
    std::vector<double> out;
    for (const auto& x : v) out.push_back(x.is_null() ? inf : x.get<double>());
    return out;
  }
  throw ConfigError(where + ": \"" + std::string(key) + "\" must be null, a number or " + std::to_string(nq) + " values");
}

inline NoiseConfig apply_noise_overrides(NoiseConfig n, const json& j, const std::string& where) {
  check_keys(j, {"detuning_sigma", "zz_rate", "flip_angle_eps", "decoherence", "depolarizing", "readout", "detuning", "zz",
                 "flip_angle"},
             where);
  n.detuning_sigma = get_or(j, "detuning_sigma", n.detuning_sigma, where);
  n.zz_rate = get_or(j, "zz_rate", n.zz_rate, where);
  n.flip_angle_eps = get_or(j, "flip_angle_eps", n.flip_angle_eps, where);
  n.decoherence = get_or(j, "decoherence", n.decoherence, where);
  n.depolarizing = get_or(j, "depolarizing", n.depolarizing, where);
  n.readout = get_or(j, "readout", n.readout, where);
  n.detuning = get_or(j, "detuning", n.detuning, where);
  n.zz = get_or(j, "zz", n.zz, where);
  n.flip_angle = get_or(j, "flip_angle", n.flip_angle, where);
  n.validate();
  return n;
}

inline json noise_to_json(const NoiseConfig& n) {
  return {{"detuning_sigma", n.detuning_sigma}, {"zz_rate", n.zz_rate},       {"flip_angle_eps", n.flip_angle_eps},
          {"decoherence", n.decoherence},       {"depolarizing", n.depolarizing}, {"readout", n.readout},
          {"detuning", n.detuning},             {"zz", n.zz},                 {"flip_angle", n.flip_angle}};
}

}  // namespace detail

/// Builds a profile; `layout_override` replaces the profile's layout when non-empty.
inline DeviceProfile profile_from_json(const json& j, const std::string& source, const std::string& layout_override = "") {
  detail::check_header(j, "bvspeed-profile", kProfileVersion, source);
  detail::check_keys(j, {"bvspeed-profile", "name", "description", "layout", "blacklist", "dt_ns", "durations_dt", "t1_us",
                         "t2_us", "p1q", "p2q", "readout_error", "duration_model", "noise"},
                     source);
  DeviceProfile p;
  p.name = detail::get_or<std::string>(j, "name", "", source);
  if (p.name.empty()) throw ConfigError(source + ": profile needs a name");
  p.layout = layout_override.empty() ? detail::get_or<std::string>(j, "layout", "heavy-hex-27", source) : layout_override;
  const auto blacklist = detail::get_or<std::set<int>>(j, "blacklist", {}, source);
  CouplingGraph g = parse_layout(p.layout, 27).with_blacklist(blacklist);
  const int nq = g.num_physical();

  DeviceModel& d = p.device;
  d.name = p.name;
  d.graph = g;
  d.t1_us = detail::per_qubit(j, "t1_us", nq, source);
  d.t2_us = detail::per_qubit(j, "t2_us", nq, source);
  if (j.contains("dt_ns")) {
    const auto dt = detail::get_or<std::vector<std::int64_t>>(j, "dt_ns", {}, source);
    if (dt.size() != 2) throw ConfigError(source + ": dt_ns must be [numerator, denominator]");
    d.dt = TimeStep{dt[0], dt[1]};
  }
  const json dur = j.value("durations_dt", json::object());
  detail::check_keys(dur, {"gate_1q", "gate_2q", "readout", "dd_pulse"}, source + " durations_dt");
  d.durations.gate_1q = detail::get_or<Tick>(dur, "gate_1q", 1, source);
  d.durations.gate_2q = detail::get_or<Tick>(dur, "gate_2q", 1, source);
  d.durations.readout = detail::get_or<Tick>(dur, "readout", 0, source);
  d.durations.dd_pulse = detail::get_or<Tick>(dur, "dd_pulse", 0, source);
  d.p1q = detail::get_or(j, "p1q", 0.0, source);
  d.p2q = detail::get_or(j, "p2q", 0.0, source);
  ReadoutConfusion ro;
  if (j.contains("readout_error")) {
    const json& r = j.at("readout_error");
    if (r.is_number()) {
      ro.p1_given0 = ro.p0_given1 = r.get<double>();
    } else {
      detail::check_keys(r, {"p1_given0", "p0_given1"}, source + " readout_error");
      ro.p1_given0 = detail::get_or(r, "p1_given0", 0.0, source);
      ro.p0_given1 = detail::get_or(r, "p0_given1", 0.0, source);
    }
  }
  d.readout.assign(static_cast<std::size_t>(nq), ro);
  d.validate();

  const json dm = j.value("duration_model", json::object());
  detail::check_keys(dm, {"slope_us", "intercept_us"}, source + " duration_model");
  p.duration.c = 1.0;
  p.duration.tau_2q = detail::get_or(dm, "slope_us", 0.0, source) * 1e-6;
  p.duration.tau_0 = detail::get_or(dm, "intercept_us", 0.0, source) * 1e-6;
  if (!duration_model_increasing(p.duration, 64)) throw ConfigError(source + ": duration model must increase with n");

  p.noise = detail::apply_noise_overrides(NoiseConfig{}, j.value("noise", json::object()), source + " noise");
  return p;
}

/// Profile directory: $BVSPEED_PROFILE_DIR, else the build-time default.
inline std::string profile_dir() {
  if (const char* env = std::getenv("BVSPEED_PROFILE_DIR"); env && *env) return env;
  return BVSPEED_PROFILE_DIR;
}

/// Resolves a bare name to <profile_dir>/<name>.json; anything with a '/' or
/// a .json suffix is a path, relative to `base_dir` when not absolute.
inline std::string resolve_profile_path(const std::string& ref, const std::string& base_dir = "") {
  namespace fs = std::filesystem;
  const bool is_path = ref.find('/') != std::string::npos || fs::path(ref).extension() == ".json";
  if (!is_path) return (fs::path(profile_dir()) / (ref + ".json")).string();
  fs::path p(ref);
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  return p.string();
}

inline DeviceProfile load_profile(const std::string& ref, const std::string& layout_override = "",
                                  const std::string& base_dir = "") {
  const std::string path = resolve_profile_path(ref, base_dir);
  return profile_from_json(detail::parse_json_file(path), path, layout_override);
}

enum class OracleMode { Representative, All };

struct DDSettings {
  std::string sequence = "none";
  Tick pulse_duration = 0;  ///< 0: the profile's pulse length
  DDFallback fallback = DDFallback::Ladder;
};

struct ExperimentConfig {
  int n_lo = 3;
  int n_hi = 10;
  OracleMode oracles = OracleMode::Representative;
  std::string profile = "montreal";
  std::string layout;  ///< empty: the profile's layout
  json noise = json::object();  ///< overrides on top of the profile noise
  Setup setup = Setup::Reduced;
  DDSettings dd;
  std::uint64_t shots = 32000;
  std::uint64_t seed = 1;
  int max_live_qubits = 21;
  AnalysisConfig analysis;
  double classical_a_us = 1.0;  ///< classical solver time per bit
  std::string label;            ///< series name in reports and plot data
  std::string out = "run";
  std::string base_dir;         ///< directory of the config file, for relative paths

  std::string series() const {
    if (!label.empty()) return label;
    return profile + (dd.sequence == "none" ? "" : "+" + dd.sequence);
  }

  void validate() const {
    if (n_lo < 1 || n_hi < n_lo) throw ConfigError("config: n_range must satisfy 1 <= lo <= hi");
    if (n_hi > 63) throw ConfigError("config: n above 63 is not supported");
    if (dd.sequence != "none" && !parse_dd_sequence(dd.sequence)) {
      throw ConfigError("config: unknown DD sequence '" + dd.sequence + "'");
    }
    if (dd.pulse_duration < 0) throw ConfigError("config: negative DD pulse duration");
    if (shots == 0) throw ConfigError("config: shots must be positive");
    if (max_live_qubits < 1) throw ConfigError("config: max_live_qubits must be positive");
    if (!(classical_a_us > 0)) throw ConfigError("config: classical_a_us must be positive");
    if (out.empty()) throw ConfigError("config: empty output directory");
    analysis.validate();
  }
};

inline ExperimentConfig config_from_json(const json& j, const std::string& source) {
  detail::check_header(j, "bvspeed-config", kConfigVersion, source);
  detail::check_keys(j, {"bvspeed-config", "n_range", "oracles", "profile", "layout", "noise", "setup", "dd", "shots", "seed",
                         "max_live_qubits", "analysis", "label", "out"},
                     source);
  ExperimentConfig c;
  if (j.contains("n_range")) {
    const auto r = detail::get_or<std::vector<int>>(j, "n_range", {}, source);
    if (r.size() != 2) throw ConfigError(source + ": n_range must be [lo, hi]");
    c.n_lo = r[0];
    c.n_hi = r[1];
  }
  const auto mode = detail::get_or<std::string>(j, "oracles", "representative", source);
  if (mode == "representative") {
    c.oracles = OracleMode::Representative;
  } else if (mode == "all") {
    c.oracles = OracleMode::All;
  } else {
    throw ConfigError(source + ": oracles must be \"representative\" or \"all\"");
  }
  c.profile = detail::get_or<std::string>(j, "profile", c.profile, source);
  c.layout = detail::get_or<std::string>(j, "layout", "", source);
  c.noise = j.value("noise", json::object());
  const auto setup = detail::get_or<std::string>(j, "setup", "reduced", source);
  if (setup == "reduced") {
    c.setup = Setup::Reduced;
  } else if (setup == "standard") {
    c.setup = Setup::Standard;
  } else {
    throw ConfigError(source + ": setup must be \"reduced\" or \"standard\"");
  }
  if (j.contains("dd")) {
    const json& d = j.at("dd");
    detail::check_keys(d, {"sequence", "pulse_duration", "fallback"}, source + " dd");
    c.dd.sequence = detail::get_or<std::string>(d, "sequence", "none", source);
    c.dd.pulse_duration = detail::get_or<Tick>(d, "pulse_duration", 0, source);
    const auto fb = detail::get_or<std::string>(d, "fallback", "ladder", source);
    if (fb != "ladder" && fb != "idle") throw ConfigError(source + ": dd fallback must be \"ladder\" or \"idle\"");
    c.dd.fallback = fb == "ladder" ? DDFallback::Ladder : DDFallback::Idle;
  }
  c.shots = detail::get_or<std::uint64_t>(j, "shots", c.shots, source);
  c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed, source);
  c.max_live_qubits = detail::get_or(j, "max_live_qubits", c.max_live_qubits, source);
  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    detail::check_keys(a, {"p_d", "bootstrap_B", "tts_ci_sigma", "lambda_ci_sigma", "n_min", "weighted", "classical_a_us"},
                       source + " analysis");
    c.analysis.p_d = detail::get_or(a, "p_d", c.analysis.p_d, source);
    c.analysis.bootstrap_B = detail::get_or(a, "bootstrap_B", c.analysis.bootstrap_B, source);
    c.analysis.tts_ci_sigma = detail::get_or(a, "tts_ci_sigma", c.analysis.tts_ci_sigma, source);
    c.analysis.lambda_ci_sigma = detail::get_or(a, "lambda_ci_sigma", c.analysis.lambda_ci_sigma, source);
    c.analysis.n_min = detail::get_or(a, "n_min", c.analysis.n_min, source);
    c.analysis.weighted = detail::get_or(a, "weighted", c.analysis.weighted, source);
    c.classical_a_us = detail::get_or(a, "classical_a_us", c.classical_a_us, source);
  }
  c.label = detail::get_or<std::string>(j, "label", "", source);
  c.out = detail::get_or<std::string>(j, "out", c.out, source);
  c.validate();
  return c;
}

/// Snapshot written into manifests; round-trips through config_from_json.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["bvspeed-config"] = kConfigVersion;
  j["n_range"] = {c.n_lo, c.n_hi};
  j["oracles"] = c.oracles == OracleMode::All ? "all" : "representative";
  j["profile"] = c.profile;
  if (!c.layout.empty()) j["layout"] = c.layout;
  j["noise"] = c.noise;
  j["setup"] = c.setup == Setup::Standard ? "standard" : "reduced";
  j["dd"] = {{"sequence", c.dd.sequence},
             {"pulse_duration", c.dd.pulse_duration},
             {"fallback", c.dd.fallback == DDFallback::Ladder ? "ladder" : "idle"}};
  j["shots"] = c.shots;
  j["seed"] = c.seed;
  j["max_live_qubits"] = c.max_live_qubits;
  j["analysis"] = {{"p_d", c.analysis.p_d},
                   {"bootstrap_B", c.analysis.bootstrap_B},
                   {"tts_ci_sigma", c.analysis.tts_ci_sigma},
                   {"lambda_ci_sigma", c.analysis.lambda_ci_sigma},
                   {"n_min", c.analysis.n_min},
                   {"weighted", c.analysis.weighted},
                   {"classical_a_us", c.classical_a_us}};
  if (!c.label.empty()) j["label"] = c.label;
  j["out"] = c.out;
  return j;
}

inline ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig c = config_from_json(detail::parse_json_file(path), path);
  c.base_dir = std::filesystem::path(path).parent_path().string();
  return c;
}

/// Config plus its resolved profile and DD sequence.
struct Experiment {
  ExperimentConfig config;
  DeviceProfile profile;
  std::optional<DDSequence> dd;

  explicit Experiment(ExperimentConfig c) : config(std::move(c)) {
    config.validate();
    // Profile paths are pinned so that manifest snapshots resolve from anywhere.
    const std::string path = resolve_profile_path(config.profile, config.base_dir);
    if (path.find('/') != std::string::npos && config.profile.find('/') != std::string::npos) {
      config.profile = std::filesystem::absolute(path).lexically_normal().string();
    }
    profile = load_profile(config.profile, config.layout, config.base_dir);
    profile.noise = detail::apply_noise_overrides(profile.noise, config.noise, "config noise");
    dd = parse_dd_sequence(config.dd.sequence);
  }

  const DeviceModel& device() const { return profile.device; }

  std::vector<OracleSpec> oracles(int n) const {
    return config.oracles == OracleMode::All ? all_oracles(n) : representative_oracles(n);
  }

  /// Routed circuit, DD-dressed when a sequence is configured. Trailing idles of
  /// measured qubits are filled too, since readout waits for the last gate.
  RoutedCircuit circuit(const OracleSpec& spec) const {
    RouteOptions ro;
    ro.setup = config.setup;
    RoutedCircuit r = route_bv(spec, device(), ro);
    if (dd) {
      DDOptions o;
      o.pulse_duration = config.dd.pulse_duration > 0 ? config.dd.pulse_duration : device().durations.pulse();
      o.fallback = config.dd.fallback;
      o.gaps = GapOptions{false, true};
      r.circuit = schedule_dd(r.circuit, *dd, o).circuit;
    }
    return r;
  }
};

}  // namespace bvspeed
