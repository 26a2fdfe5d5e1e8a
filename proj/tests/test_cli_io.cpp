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


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>

#include "bvspeed/pipeline.hpp"

using namespace bvspeed;
namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bvspeed_cli_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

ExperimentConfig small_config(const std::string& out, int lo, int hi, const std::string& profile = "montreal") {
  ExperimentConfig c;
  c.n_lo = lo;
  c.n_hi = hi;
  c.profile = profile;
  c.shots = 2000;
  c.seed = 17;
  c.out = out;
  return c;
}

std::vector<std::string> checksums(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& e : Manifest(dir).current("counts")) out.push_back(e.at("sha256").get<std::string>());
  return out;
}

/// Count table with `successes` hits on b and the rest on b with bit 0 flipped.
ShotTable synthetic_table(const Bitstring& b, std::uint64_t successes, std::uint64_t shots) {
  ShotTable t;
  t.oracle = OracleSpec(b);
  t.total_shots = shots;
  if (successes > 0) t.counts[b] = successes;
  if (shots > successes) t.counts[b.with_bit(0, !b[0])] = shots - successes;
  return t;
}

/// Writes count files for sizes lo..hi with p_s(n) from `ps` and ingests them.
std::string synthetic_run(const std::string& name, int lo, int hi, const std::function<std::uint64_t(const OracleSpec&)>& hits,
                          std::uint64_t shots) {
  const std::string dir = scratch(name);
  std::vector<std::string> files;
  for (int n = lo; n <= hi; ++n) {
    for (const auto& spec : representative_oracles(n)) {
      const std::string f = dir + "/in_" + spec.b.to_string() + ".counts";
      save_shot_table(f, synthetic_table(spec.b, hits(spec), shots));
      files.push_back(f);
    }
  }
  ExperimentConfig c = small_config(dir + "/run", lo, hi);
  cmd_ingest(c.out, files, c);
  return c.out;
}

int exit_code(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("shipped profiles load", "[cli-io]") {
  const DeviceProfile m = load_profile("montreal");
  CHECK(m.device.graph.num_physical() == 27);
  CHECK(m.device.durations.gate_2q == 1935);
  CHECK(m.device.t1_us[5] == 113.2);
  CHECK(run_time(10, m.duration) == Catch::Approx(9.28e-6).epsilon(1e-12));
  const DeviceProfile c = load_profile("cairo");
  CHECK(c.device.graph.usable_count() == 24);
  CHECK(c.device.p2q == 0.0464);
  CHECK(run_time(10, c.duration) == Catch::Approx(3.47e-6).epsilon(1e-12));
  const DeviceProfile z = load_profile("noiseless");
  CHECK(std::isinf(z.device.t1_us[0]));
  CHECK(z.device.p2q == 0);
  CHECK(load_profile("demo-dephasing").noise.detuning_sigma == 3e5);
  CHECK(load_profile("montreal", "chain:9").device.graph == chain_graph(9));
  CHECK_THROWS_AS(load_profile("no-such-profile"), ConfigError);
}

TEST_CASE("profile and config validation", "[cli-io]") {
  const json base = detail::parse_json_file(resolve_profile_path("montreal"));
  json typo = base;
  typo["t1us"] = 1;
  CHECK_THROWS_AS(profile_from_json(typo, "typo"), ConfigError);
  json version = base;
  version["bvspeed-profile"] = 2;
  CHECK_THROWS_AS(profile_from_json(version, "v"), ConfigError);
  json t2 = base;
  t2["t2_us"] = 300;
  CHECK_THROWS_AS(profile_from_json(t2, "t2"), ConfigError);

  json cfg = config_to_json(ExperimentConfig{});
  CHECK_NOTHROW(config_from_json(cfg, "ok"));
  json bad_dd = cfg;
  bad_dd["dd"]["sequence"] = "ur5";
  CHECK_THROWS_AS(config_from_json(bad_dd, "dd"), ConfigError);
  json bad_range = cfg;
  bad_range["n_range"] = {5, 3};
  CHECK_THROWS_AS(config_from_json(bad_range, "range"), ConfigError);
  json no_header = cfg;
  no_header.erase("bvspeed-config");
  CHECK_THROWS_AS(config_from_json(no_header, "hdr"), ConfigError);
}

TEST_CASE("config snapshot round-trips", "[cli-io]") {
  ExperimentConfig c;
  c.n_lo = 4;
  c.n_hi = 9;
  c.oracles = OracleMode::All;
  c.profile = "cairo";
  c.layout = "chain:12";
  c.noise = {{"zz_rate", 1e4}, {"readout", false}};
  c.setup = Setup::Standard;
  c.dd = DDSettings{"ur14", 200, DDFallback::Idle};
  c.shots = 1234;
  c.seed = 99;
  c.max_live_qubits = 12;
  c.analysis.bootstrap_B = 50;
  c.analysis.n_min = 2;
  c.classical_a_us = 0.5;
  c.label = "x";
  c.out = "somewhere";
  const json j = config_to_json(c);
  const ExperimentConfig r = config_from_json(j, "snap");
  CHECK(config_to_json(r) == j);
  CHECK(r.dd.fallback == DDFallback::Idle);
  CHECK(r.noise.at("zz_rate") == 1e4);
}

TEST_CASE("generate writes one circuit per representative oracle", "[cli-io]") {
  const std::string dir = scratch("generate");
  const Experiment hh(small_config(dir + "/hh", 2, 6));
  CHECK(cmd_generate(hh).files == 25);
  Manifest m(dir + "/hh");
  CHECK_NOTHROW(m.verify());
  const auto circuits = m.current("circuit");
  REQUIRE(circuits.size() == 25);
  std::size_t files = 0;
  for (const auto& p : fs::recursive_directory_iterator(dir + "/hh/circuits")) files += p.is_regular_file();
  CHECK(files == 25);

  ExperimentConfig cc = small_config(dir + "/chain", 2, 6);
  cc.layout = "chain:8";
  cmd_generate(Experiment(cc));
  const auto chain = Manifest(dir + "/chain").current("circuit");
  REQUIRE(chain.size() == 25);
  int differ = 0;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const OracleSpec spec(Bitstring::parse(circuits[i].at("oracle").get<std::string>()));
    // Recorded counts must match routing each layout directly.
    CHECK(circuits[i].at("cnot_count") == route_bv(spec, hh.device()).cnot_count);
    CHECK(chain[i].at("cnot_count") == route_bv(spec, Experiment(cc).device()).cnot_count);
    differ += circuits[i].at("cnot_count") != chain[i].at("cnot_count");
  }
  CHECK(differ > 0);
  // Circuit files parse back to what the experiment builds.
  const auto& e = circuits.back();
  CHECK(load_circuit(m.resolve(e.at("path").get<std::string>())) ==
        hh.circuit(OracleSpec(Bitstring::parse(e.at("oracle").get<std::string>()))).circuit);
}

TEST_CASE("generate reports n beyond the layout", "[cli-io]") {
  ExperimentConfig c = small_config(scratch("too_big"), 26, 27);
  CHECK_THROWS_AS(cmd_generate(Experiment(c)), InfeasibleError);
  // The feasible size was still written.
  CHECK(Manifest(c.out).current("circuit").size() == 27);
}

TEST_CASE("simulate is deterministic in the seed", "[cli-io]") {
  const std::string dir = scratch("determinism");
  cmd_simulate(Experiment(small_config(dir + "/a", 3, 5)));
  cmd_simulate(Experiment(small_config(dir + "/b", 3, 5)));
  ExperimentConfig other = small_config(dir + "/c", 3, 5);
  other.seed = 18;
  cmd_simulate(Experiment(other));
  CHECK(checksums(dir + "/a") == checksums(dir + "/b"));
  CHECK(checksums(dir + "/a") != checksums(dir + "/c"));
  CHECK(checksums(dir + "/a").size() == 15);
}

TEST_CASE("noiseless simulation gives point masses", "[cli-io]") {
  ExperimentConfig c = small_config(scratch("noiseless"), 2, 7, "noiseless");
  c.dd.sequence = "ur14";
  cmd_simulate(Experiment(c));
  Manifest m(c.out);
  for (const auto& e : m.current("counts")) {
    const ShotTable t = load_shot_table(m.resolve(e.at("path").get<std::string>()));
    CHECK(t.counts.size() == 1);
    CHECK(t.count(t.oracle.b) == c.shots);
  }
}

TEST_CASE("UR14 raises the mean success probability on montreal at n=6", "[cli-io]") {
  const std::string dir = scratch("dd_gain");
  ExperimentConfig plain = small_config(dir + "/plain", 6, 6);
  plain.shots = 20000;
  ExperimentConfig dd = plain;
  dd.out = dir + "/dd";
  dd.dd.sequence = "ur14";
  const Experiment a(plain), b(dd);
  double pa = 0, pb = 0, var = 0;
  for (const auto& spec : a.oracles(6)) {
    const SuccessEstimate ea = success_prob(simulate_oracle(a, spec));
    const SuccessEstimate eb = success_prob(simulate_oracle(b, spec));
    pa += ea.p / 7;
    pb += eb.p / 7;
    var += (ea.sigma * ea.sigma + eb.sigma * eb.sigma) / 49;
  }
  INFO("no DD " << pa << ", UR14 " << pb);
  CHECK(pb - pa > 3 * std::sqrt(var));
}

TEST_CASE("ingest validates and copies count files", "[cli-io]") {
  const std::string dir = scratch("ingest");
  const ShotTable t = synthetic_table(Bitstring::parse("1100"), 700, 1000);
  save_shot_table(dir + "/good.counts", t);
  const auto s = cmd_ingest(dir + "/run", {dir + "/good.counts"});
  CHECK(s.files == 1);
  Manifest m(dir + "/run");
  const auto e = m.current("counts");
  REQUIRE(e.size() == 1);
  const ShotTable back = load_shot_table(m.resolve(e[0].at("path").get<std::string>()));
  CHECK(back == t);
  CHECK(back.total_shots == 1000);
  CHECK(read_file(dir + "/good.counts") == read_file(m.resolve(e[0].at("path").get<std::string>())));

  std::ofstream(dir + "/bad.counts") << "bvspeed-counts 1\noracle 1100\ntotal_shots 10\n1100 5\n110 5\n";
  try {
    cmd_ingest(dir + "/run2", {dir + "/good.counts", dir + "/bad.counts"});
    FAIL("expected a format error");
  } catch (const FormatError& err) {
    CHECK(err.line() == 5);
    CHECK_THAT(err.what(), Catch::Matchers::ContainsSubstring("'110'"));
  }
  CHECK_FALSE(fs::exists(dir + "/run2/manifest.json"));
}

TEST_CASE("manifest detects altered files", "[cli-io]") {
  const std::string dir = scratch("tamper");
  save_shot_table(dir + "/x.counts", synthetic_table(Bitstring::parse("10"), 9, 10));
  cmd_ingest(dir + "/run", {dir + "/x.counts"});
  Manifest m(dir + "/run");
  CHECK_NOTHROW(m.verify());
  std::ofstream(m.resolve(m.current("counts")[0].at("path").get<std::string>()), std::ios::app) << "# edited\n";
  CHECK_THROWS_AS(m.verify(), ConfigError);
  // Appending a fresh copy supersedes the altered one but keeps it on record.
  cmd_ingest(dir + "/run", {dir + "/x.counts"});
  Manifest again(dir + "/run");
  CHECK(again.doc().at("entries").size() == 2);
  CHECK(again.doc().at("runs").size() == 2);
}

TEST_CASE("ingest then analyze equals simulate then analyze", "[cli-io]") {
  const std::string dir = scratch("roundtrip");
  ExperimentConfig c = small_config(dir + "/sim", 3, 6);
  cmd_simulate(Experiment(c));
  const json direct = cmd_analyze(c.out);

  std::vector<std::string> files;
  Manifest sim(c.out);
  for (const auto& e : sim.current("counts")) files.push_back(sim.resolve(e.at("path").get<std::string>()));
  ExperimentConfig c2 = c;
  c2.out = dir + "/ing";
  cmd_ingest(c2.out, files, c2);
  const json ingested = cmd_analyze(c2.out);
  CHECK(report_to_string(direct) == report_to_string(ingested));

  // The BV-6 success matrix in the report matches the tables themselves.
  std::vector<ShotTable> six;
  for (const auto& e : sim.current("counts")) {
    if (e.at("n") == 6) six.push_back(load_shot_table(sim.resolve(e.at("path").get<std::string>())));
  }
  const SuccessMatrix sm = success_matrix(six);
  const json& row = ingested.at("success_matrices").back();
  CHECK(row.at("n") == 6);
  CHECK(row.at("bqp") == sm.bqp);
  for (std::size_t i = 0; i < sm.oracles.size(); ++i) CHECK(row.at("p_s").at(sm.oracles[i].to_string()) == sm.p_s[i]);
}

TEST_CASE("analyze recovers an injected exponent", "[cli-io]") {
  // Choose p_s(n) so that t_r(n) R(p_s) = 1e-5 * 2^(0.6 n) under the montreal duration model.
  const DurationModel dm = load_profile("montreal").duration;
  const std::uint64_t shots = 1'000'000'000'000ULL;
  auto hits = [&](const OracleSpec& o) {
    const double r = 1e-5 * std::exp2(0.6 * o.n()) / run_time(o.n(), dm);
    const double p = -std::expm1(std::log1p(-0.99) / r);
    return static_cast<std::uint64_t>(std::llround(p * static_cast<double>(shots)));
  };
  const std::string run = synthetic_run("inject", 3, 12, hits, shots);
  const json report = cmd_analyze(run);
  CHECK(report.at("u") == 12);
  CHECK(report.at("fit").at("lambda").get<double>() == Catch::Approx(0.6).margin(1e-6));
  CHECK(report.at("fit").at("ci_low").get<double>() <= 0.6 + 1e-6);
  CHECK(report.at("fit").at("ci_high").get<double>() >= 0.6 - 1e-6);
  // log2 S(n) = log2 TTS_C(n) - 0.6 n + const, so its slope is the classical slope minus 0.6.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n = 3; n <= 12; ++n) {
    const double y = std::log2(tts_classical(n, classical_model(1e-6), 0.99));
    sx += n, sy += y, sxx += n * n, sxy += n * y;
  }
  const double classical_slope = (10 * sxy - sx * sy) / (10 * sxx - sx * sx);
  CHECK(report.at("speedup").at("exponent").get<double>() == Catch::Approx(classical_slope - 0.6).margin(1e-6));
}

TEST_CASE("a p_s = 0 oracle terminates the curve", "[cli-io]") {
  auto hits = [](const OracleSpec& o) -> std::uint64_t {
    if (o.n() == 17 && o.k() == 9) return 0;
    return 30000 - 1500 * static_cast<std::uint64_t>(o.n());
  };
  const std::string run = synthetic_run("terminate", 3, 17, hits, 32000);
  const json report = cmd_analyze(run);
  CHECK(report.at("u") == 16);
  CHECK(report.at("tts").back().at("terminated") == true);
  CHECK(report.at("fit").at("u") == 16);

  // Plot data: header plus one row per finite n, for both series.
  std::ifstream in(run + "/plot_tts.tsv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "series\tn\ttts\tci_low\tci_high");
  std::set<int> quantum_n;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto f = text::split_ws(line);
    REQUIRE(f.size() == 5);
    for (std::size_t i = 2; i < 5; ++i) CHECK(std::isfinite(std::stod(f[i])));
    if (f[0] != "classical") quantum_n.insert(std::stoi(f[1]));
    ++rows;
  }
  CHECK(quantum_n.size() == 14);
  CHECK(*quantum_n.rbegin() == 16);
  CHECK(rows == 14 + 15);

  // plot-data regenerates the same files from report.json.
  const std::string again = scratch("terminate_plot");
  cmd_plot_data(run, again);
  CHECK(read_file(again + "/plot_tts.tsv") == read_file(run + "/plot_tts.tsv"));
  CHECK(read_file(again + "/plot_lambda.tsv") == read_file(run + "/plot_lambda.tsv"));
}

TEST_CASE("analyze lists missing tables", "[cli-io]") {
  const std::string dir = scratch("missing");
  save_shot_table(dir + "/a.counts", synthetic_table(Bitstring::parse("100"), 9, 10));
  ExperimentConfig c = small_config(dir + "/run", 3, 3);
  cmd_ingest(c.out, {dir + "/a.counts"}, c);
  try {
    cmd_analyze(c.out);
    FAIL("expected missing tables");
  } catch (const ConfigError& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("3 table(s) missing: 000 110 111"));
  }
}

TEST_CASE("full pipeline is byte-reproducible", "[cli-io]") {
  const std::string dir = scratch("repro");
  std::string first;
  for (const char* sub : {"a", "b"}) {
    ExperimentConfig c = small_config(dir + "/" + sub, 3, 7);
    c.dd.sequence = "ur14";
    cmd_simulate(Experiment(c));
    cmd_analyze(c.out);
    const std::string bytes = read_file(c.out + "/report.json");
    if (first.empty()) {
      first = bytes;
    } else {
      CHECK(bytes == first);
    }
  }
}

TEST_CASE("CLI exit codes", "[cli-io]") {
  const std::string cli = BVSPEED_CLI_PATH;
  const std::string dir = scratch("exit");
  CHECK(exit_code(cli + " --out " + dir + "/ok generate --n-range 2 3") == 0);
  CHECK(exit_code(cli + " --out " + dir + "/bad generate --dd ur5") == 2);
  CHECK(exit_code(cli + " --out " + dir + "/big generate --n-range 27 27") == 3);
  std::ofstream(dir + "/cap.json") << R"({"bvspeed-config": 1, "n_range": [4, 4], "max_live_qubits": 1, "shots": 10})";
  CHECK(exit_code(cli + " --config " + dir + "/cap.json --out " + dir + "/cap simulate") == 4);
  std::ofstream(dir + "/junk.json") << "{not json";
  CHECK(exit_code(cli + " --config " + dir + "/junk.json simulate") == 2);
  CHECK(exit_code(cli + " --out " + dir + "/ok analyze") == 2);  // circuits only, no tables
  CHECK(exit_code(cli + " --out " + dir + "/sim --seed 5 simulate --n-range 3 5 --shots 500") == 0);
  CHECK(exit_code(cli + " --out " + dir + "/sim analyze") == 0);
  CHECK(fs::exists(dir + "/sim/report.json"));
  CHECK(exit_code(cli + " --out " + dir + "/sim plot-data --to " + dir + "/plots") == 0);
  CHECK(fs::exists(dir + "/plots/plot_tts.tsv"));
}
