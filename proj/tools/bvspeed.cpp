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


// bvspeed: generate | simulate | ingest | analyze | plot-data.
//
// Exit codes: 0 success, 2 config or format error, 3 infeasible instance,
// 4 simulator capacity exceeded, 1 anything else.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bvspeed/pipeline.hpp"

namespace {

using namespace bvspeed;

struct Overrides {
  std::string profile, layout, dd, dd_fallback, oracles, setup, label;
  std::vector<int> n_range;
  std::optional<Tick> dd_pulse;
  std::optional<std::uint64_t> shots;
};

void add_experiment_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--profile", o.profile, "Device profile name or path");
  cmd->add_option("--layout", o.layout, "chain[:N] | heavy-hex-27 | full:N | file:<path>");
  cmd->add_option("--dd", o.dd, "none | xy4 | ur4 | ur14 | ur18 | ur:<n>");
  cmd->add_option("--dd-pulse-duration", o.dd_pulse, "DD pulse length in dt");
  cmd->add_option("--dd-fallback", o.dd_fallback, "ladder | idle")->check(CLI::IsMember({"ladder", "idle"}));
  cmd->add_option("--n-range", o.n_range, "Smallest and largest n")->expected(2);
  cmd->add_option("--oracles", o.oracles, "representative | all")->check(CLI::IsMember({"representative", "all"}));
  cmd->add_option("--setup", o.setup, "reduced | standard")->check(CLI::IsMember({"reduced", "standard"}));
  cmd->add_option("--shots", o.shots, "Shots per oracle");
  cmd->add_option("--label", o.label, "Series name in reports");
}

ExperimentConfig make_config(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out,
                             const Overrides& o) {
  ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  if (seed) c.seed = *seed;
  if (!out.empty()) c.out = out;
  if (!o.profile.empty()) {
    c.profile = o.profile;
    c.base_dir.clear();
  }
  if (!o.layout.empty()) c.layout = o.layout;
  if (!o.dd.empty()) c.dd.sequence = o.dd;
  if (o.dd_pulse) c.dd.pulse_duration = *o.dd_pulse;
  if (!o.dd_fallback.empty()) c.dd.fallback = o.dd_fallback == "idle" ? DDFallback::Idle : DDFallback::Ladder;
  if (o.n_range.size() == 2) {
    c.n_lo = o.n_range[0];
    c.n_hi = o.n_range[1];
  }
  if (!o.oracles.empty()) c.oracles = o.oracles == "all" ? OracleMode::All : OracleMode::Representative;
  if (!o.setup.empty()) c.setup = o.setup == "standard" ? Setup::Standard : Setup::Reduced;
  if (o.shots) c.shots = *o.shots;
  if (!o.label.empty()) c.label = o.label;
  c.validate();
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"Single-shot Bernstein-Vazirani scaling experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out, "Run directory");

  Overrides ov;
  auto* gen = app.add_subcommand("generate", "Write routed circuits and a manifest");
  add_experiment_flags(gen, ov);
  auto* sim = app.add_subcommand("simulate", "Simulate shot tables");
  add_experiment_flags(sim, ov);
  auto* ing = app.add_subcommand("ingest", "Register external count files");
  std::vector<std::string> files;
  std::string schema = "bvspeed-counts-1";
  ing->add_option("files", files, "Count files")->required()->check(CLI::ExistingFile);
  ing->add_option("--schema", schema, "Count-file schema")->check(CLI::IsMember({"bvspeed-counts-1"}));
  auto* ana = app.add_subcommand("analyze", "TTS table, exponent fits and plot data for a run");
  add_experiment_flags(ana, ov);
  auto* plot = app.add_subcommand("plot-data", "Rewrite plot files from a run's report.json");
  std::string plot_to;
  plot->add_option("--to", plot_to, "Destination directory (default: the run directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*gen || *sim) {
    const Experiment ex(make_config(config_path, seed, out, ov));
    const CommandSummary s = *gen ? cmd_generate(ex) : cmd_simulate(ex);
    std::cout << (*gen ? "generate: " : "simulate: ") << s.files << " file(s) in " << ex.config.out << "\n";
  } else if (*ing) {
    if (out.empty()) throw ConfigError("ingest: --out is required");
    std::optional<ExperimentConfig> cfg;
    if (!config_path.empty()) cfg = make_config(config_path, seed, out, ov);
    const CommandSummary s = cmd_ingest(out, files, cfg);
    std::cout << "ingest: " << s.files << " table(s) registered in " << out << "\n";
  } else if (*ana) {
    std::optional<ExperimentConfig> cfg;
    const bool overridden = !config_path.empty() || seed || !ov.profile.empty() || !ov.layout.empty() || !ov.dd.empty() ||
                            !ov.n_range.empty() || !ov.oracles.empty() || !ov.label.empty();
    std::string dir = out;
    if (overridden) {
      cfg = make_config(config_path, seed, out, ov);
      if (dir.empty()) dir = cfg->out;
    }
    if (dir.empty()) throw ConfigError("analyze: --out (run directory) is required");
    const json report = cmd_analyze(dir, cfg);
    const json& fit = report.at("fit");
    std::cout << "analyze: u=" << report.at("u").get<int>();
    if (fit.contains("lambda")) {
      std::cout << " lambda=" << text::format_double(fit.at("lambda").get<double>()) << " ci=["
                << text::format_double(fit.at("ci_low").get<double>()) << ", "
                << text::format_double(fit.at("ci_high").get<double>()) << "]";
    }
    std::cout << "\n";
  } else if (*plot) {
    if (out.empty()) throw ConfigError("plot-data: --out (run directory) is required");
    cmd_plot_data(out, plot_to.empty() ? out : plot_to);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const bvspeed::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bvspeed::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const bvspeed::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
