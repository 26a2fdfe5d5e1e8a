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

// The five CLI commands as library calls. Each writes into a run directory and
// appends to its manifest; analyze also writes report.json and plot files.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "bvspeed/circuit_io.hpp"
#include "bvspeed/manifest.hpp"
#include "bvspeed/shot_table_io.hpp"
#include "bvspeed/trajectory_backend.hpp"

namespace bvspeed {

struct CommandSummary {
  int files = 0;
  std::vector<std::string> failures;  ///< per-instance infeasibility messages
};

namespace detail {

[[noreturn]] inline void throw_failures(const std::vector<std::string>& failures) {
  std::string msg = std::to_string(failures.size()) + " instance(s) infeasible:";
  for (const auto& f : failures) msg += "\n  " + f;
  throw InfeasibleError(msg);
}

}  // namespace detail

/// Writes routed (and DD-dressed) circuits for every (n, oracle) in scope.
/// Infeasible instances are skipped and reported together at the end.
inline CommandSummary cmd_generate(const Experiment& ex) {
  Manifest m(ex.config.out);
  const int run = m.begin_run("generate", config_to_json(ex.config));
  CommandSummary s;
  for (int n = ex.config.n_lo; n <= ex.config.n_hi; ++n) {
    for (const auto& spec : ex.oracles(n)) {
      try {
        const RoutedCircuit r = ex.circuit(spec);
        json& e = m.add_file("circuit", spec.b, artifact_path("circuit", spec.b), circuit_to_string(r.circuit), "generate", run);
        e["cnot_count"] = r.cnot_count;
        e["duration_dt"] = circuit_duration(r.circuit);
        ++s.files;
      } catch (const InfeasibleError& err) {
        s.failures.push_back("n=" + std::to_string(n) + " b=" + spec.b.to_string() + ": " + err.what());
      }
    }
  }
  m.save();
  if (!s.failures.empty()) detail::throw_failures(s.failures);
  return s;
}

/// Counts for one oracle. Shot i uses only stream (seed, Simulation, oracle_id(b), i).
inline ShotTable simulate_oracle(const Experiment& ex, const OracleSpec& spec, RoutedCircuit* routed = nullptr) {
  RoutedCircuit r = ex.circuit(spec);
  TrajectoryPlan plan;
  plan.shots = ex.config.shots;
  plan.master_seed = ex.config.seed;
  plan.oracle_id = oracle_id(spec);
  plan.max_live_qubits = ex.config.max_live_qubits;
  ShotTable t = simulate_shots(r.circuit, ex.device(), ex.profile.noise, spec, plan);
  if (routed) *routed = std::move(r);
  return t;
}

inline CommandSummary cmd_simulate(const Experiment& ex) {
  Manifest m(ex.config.out);
  const int run = m.begin_run("simulate", config_to_json(ex.config));
  CommandSummary s;
  for (int n = ex.config.n_lo; n <= ex.config.n_hi; ++n) {
    for (const auto& spec : ex.oracles(n)) {
      RoutedCircuit r;
      ShotTable t;
      try {
        t = simulate_oracle(ex, spec, &r);
      } catch (const InfeasibleError& err) {
        s.failures.push_back("n=" + std::to_string(n) + " b=" + spec.b.to_string() + ": " + err.what());
        continue;
      } catch (const CapacityError&) {
        m.save();
        throw;
      }
      json& e = m.add_file("counts", spec.b, artifact_path("counts", spec.b), shot_table_to_string(t), "simulate", run);
      e["cnot_count"] = r.cnot_count;
      ++s.files;
    }
  }
  m.save();
  if (!s.failures.empty()) detail::throw_failures(s.failures);
  return s;
}

/// Validates count files and registers byte-identical copies in <out_dir>.
/// Nothing is written unless every file validates.
inline CommandSummary cmd_ingest(const std::string& out_dir, const std::vector<std::string>& paths,
                                 const std::optional<ExperimentConfig>& config = std::nullopt) {
  if (paths.empty()) throw ConfigError("ingest: no input files");
  std::vector<std::pair<ShotTable, std::string>> loaded;
  for (const auto& p : paths) {
    std::string bytes = read_file(p);
    loaded.emplace_back(shot_table_from_string(bytes, p), std::move(bytes));
  }
  Manifest m(out_dir);
  const int run = m.begin_run("ingest", config ? config_to_json(*config) : json(nullptr));
  CommandSummary s;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const ShotTable& t = loaded[i].first;
    json& e = m.add_file("counts", t.oracle.b, artifact_path("counts", t.oracle.b), loaded[i].second, "ingest", run);
    e["origin"] = std::filesystem::absolute(paths[i]).lexically_normal().string();
    ++s.files;
  }
  m.save();
  return s;
}

namespace detail {

inline json point_json(const TTSPoint& p) {
  return {{"n", p.n},         {"tts_mean", p.tts_mean}, {"ci_low", p.ci_low},
          {"ci_high", p.ci_high}, {"sigma", p.sigma},     {"num_oracles", p.num_oracles},
          {"terminated", p.terminated}};
}

inline json fit_json(const FitResult& f) {
  json w = json::array();
  for (const auto& x : f.windows) w.push_back({{"l", x.l}, {"u", x.u}, {"slope", x.slope}, {"intercept", x.intercept}});
  return {{"lambda", f.lambda},
          {"ci_low", f.ci_low},
          {"ci_high", f.ci_high},
          {"sigma", f.sigma},
          {"bootstrap_mean", f.bootstrap_mean},
          {"bootstrap_samples", f.bootstrap_samples},
          {"l_max", f.l_max},
          {"u", f.u},
          {"windows", w}};
}

/// Local exponents lambda_h for every h where a window fits.
inline json local_curve(const std::vector<TTSPoint>& points, int u, const AnalysisConfig& cfg) {
  json out = json::array();
  for (int h = 1; h <= u; ++h) {
    try {
      out.push_back({{"h", h}, {"lambda", local_lambda(points, h, cfg)}});
    } catch (const InfeasibleError&) {
    }
  }
  return out;
}

}  // namespace detail

/**
 * Analysis of the current count tables in a run directory. Only (n, oracle)
 * pairs in the config's scope are used, and all of them must be present.
 * The result depends only on the tables, the config and its seed.
 */
inline json analyze_run(const std::string& dir, const std::optional<ExperimentConfig>& override_config = std::nullopt) {
  Manifest m(dir);
  m.verify();
  ExperimentConfig cfg;
  if (override_config) {
    cfg = *override_config;
  } else if (auto snap = m.latest_config()) {
    cfg = config_from_json(*snap, m.file());
  } else {
    throw ConfigError("analyze: " + m.file() + " has no config snapshot; pass --config");
  }
  cfg.validate();
  const Experiment ex(cfg);

  std::map<std::string, json> entries;
  for (const auto& e : m.current("counts")) entries[e.at("oracle").get<std::string>()] = e;
  std::vector<std::string> missing;
  std::vector<SizeCounts> sizes;
  std::vector<std::vector<ShotTable>> by_size;
  for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
    std::vector<ShotTable> tables;
    for (const auto& spec : ex.oracles(n)) {
      auto it = entries.find(spec.b.to_string());
      if (it == entries.end()) {
        missing.push_back(spec.b.to_string());
        continue;
      }
      tables.push_back(load_shot_table(m.resolve(it->second.at("path").get<std::string>())));
    }
    if (!missing.empty()) continue;
    sizes.push_back(size_counts(n, tables));
    by_size.push_back(std::move(tables));
  }
  if (!missing.empty()) {
    std::string msg = "analyze: " + std::to_string(missing.size()) + " table(s) missing:";
    for (const auto& b : missing) msg += " " + b;
    throw ConfigError(msg);
  }

  const AnalysisConfig& ac = cfg.analysis;
  const CurveBootstrap curve = bootstrap_curve(sizes, ex.profile.duration, ac, cfg.seed);
  const int u = last_finite_n(curve.points);

  json report;
  report["bvspeed-report"] = 1;
  report["series"] = cfg.series();
  report["profile"] = ex.profile.name;
  report["layout"] = ex.profile.layout;
  report["dd"] = cfg.dd.sequence;
  report["setup"] = cfg.setup == Setup::Standard ? "standard" : "reduced";
  report["oracles"] = cfg.oracles == OracleMode::All ? "all" : "representative";
  report["n_range"] = {cfg.n_lo, cfg.n_hi};
  report["seed"] = cfg.seed;
  report["analysis"] = config_to_json(cfg)["analysis"];
  report["duration_model"] = {{"slope_us", ex.profile.duration.slope() * 1e6},
                              {"intercept_us", ex.profile.duration.tau_0 * 1e6}};

  json tts = json::array();
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    json p = detail::point_json(curve.points[i]);
    const TTSPoint direct = point_tts(sizes[i], ex.profile.duration, ac.p_d);
    p["tts_observed"] = direct.tts_mean;
    double ps = 0;
    for (const auto& o : sizes[i].oracles) ps += o.p();
    p["mean_p_s"] = ps / static_cast<double>(sizes[i].oracles.size());
    tts.push_back(p);
  }
  report["tts"] = tts;
  report["u"] = u;
  try {
    report["fit"] = detail::fit_json(fit_with_bootstrap(curve, u, ac));
  } catch (const InfeasibleError& e) {
    report["fit"] = {{"error", e.what()}};
  }
  report["local_lambda"] = detail::local_curve(curve.points, u, ac);

  const DurationModel cm = classical_model(cfg.classical_a_us * 1e-6);
  const auto classical = classical_points(cfg.n_lo, cfg.n_hi, cm, ac.p_d);
  json cl = {{"a_us", cfg.classical_a_us}, {"points", json::array()}};
  for (const auto& p : classical) cl["points"].push_back(detail::point_json(p));
  try {
    cl["fit"] = detail::fit_json(worst_case_lambda(classical, cfg.n_hi, ac));
  } catch (const InfeasibleError& e) {
    cl["fit"] = {{"error", e.what()}};
  }
  cl["local_lambda"] = detail::local_curve(classical, cfg.n_hi, ac);
  report["classical"] = cl;

  const SpeedupCurve sp = speedup_ratio(curve.points, classical);
  report["speedup"] = {{"n", sp.n}, {"ratio", sp.ratio}, {"exponent", sp.exponent}};

  json mats = json::array();
  for (const auto& tables : by_size) {
    const SuccessMatrix sm = success_matrix(tables);
    json ps = json::object();
    for (std::size_t i = 0; i < sm.oracles.size(); ++i) ps[sm.oracles[i].to_string()] = sm.p_s[i];
    mats.push_back({{"n", sm.n},
                    {"bqp", sm.bqp},
                    {"min_p_s", *std::min_element(sm.p_s.begin(), sm.p_s.end())},
                    {"p_s", ps}});
  }
  report["success_matrices"] = mats;
  return report;
}

inline std::string report_to_string(const json& report) { return report.dump(2) + "\n"; }

/// Columnar plot data: TTS points (finite rows only) and local exponents.
inline std::string plot_tts_tsv(const json& report) {
  std::ostringstream os;
  os << "series\tn\ttts\tci_low\tci_high\n";
  auto rows = [&](const std::string& series, const json& points) {
    for (const auto& p : points) {
      if (p.at("terminated").get<bool>()) continue;
      os << series << '\t' << p.at("n").get<int>() << '\t' << text::format_double(p.at("tts_mean").get<double>()) << '\t'
         << text::format_double(p.at("ci_low").get<double>()) << '\t'
         << text::format_double(p.at("ci_high").get<double>()) << '\n';
    }
  };
  rows(report.at("series").get<std::string>(), report.at("tts"));
  rows("classical", report.at("classical").at("points"));
  return os.str();
}

inline std::string plot_lambda_tsv(const json& report) {
  std::ostringstream os;
  os << "series\th\tlambda\n";
  auto rows = [&](const std::string& series, const json& curve) {
    for (const auto& p : curve) {
      os << series << '\t' << p.at("h").get<int>() << '\t' << text::format_double(p.at("lambda").get<double>()) << '\n';
    }
  };
  rows(report.at("series").get<std::string>(), report.at("local_lambda"));
  rows("classical", report.at("classical").at("local_lambda"));
  return os.str();
}

/// Writes plot_tts.tsv and plot_lambda.tsv for a report into `dir`.
inline void write_plot_data(const json& report, const std::string& dir) {
  write_file((std::filesystem::path(dir) / "plot_tts.tsv").string(), plot_tts_tsv(report));
  write_file((std::filesystem::path(dir) / "plot_lambda.tsv").string(), plot_lambda_tsv(report));
}

/// analyze: report.json plus plot files in the run directory.
inline json cmd_analyze(const std::string& dir, const std::optional<ExperimentConfig>& config = std::nullopt) {
  json report = analyze_run(dir, config);
  write_file((std::filesystem::path(dir) / "report.json").string(), report_to_string(report));
  write_plot_data(report, dir);
  return report;
}

/// plot-data: regenerates plot files from <dir>/report.json into `out_dir`.
inline void cmd_plot_data(const std::string& dir, const std::string& out_dir) {
  const std::string path = (std::filesystem::path(dir) / "report.json").string();
  json report = detail::parse_json_file(path);
  detail::check_header(report, "bvspeed-report", 1, path);
  write_plot_data(report, out_dir);
}

}  // namespace bvspeed
