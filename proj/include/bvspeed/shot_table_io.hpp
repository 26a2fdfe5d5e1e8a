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

// Count file format, shared by simulated and ingested data:
//
//   bvspeed-counts 1
//   oracle 110000
//   total_shots 32000
//   110000 31012
//   010000 420
//
// Outcome keys are 0/1 strings of the oracle's length; the first character is
// data qubit 0. Keys must be unique.

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "bvspeed/bv.hpp"
#include "bvspeed/text.hpp"

namespace bvspeed {

inline void write_shot_table(std::ostream& out, const ShotTable& t) {
  out << "bvspeed-counts 1\n";
  out << "oracle " << t.oracle.b.to_string() << "\n";
  out << "total_shots " << t.total_shots << "\n";
  for (const auto& [x, c] : t.counts) {
    if (c > 0) out << x.to_string() << " " << c << "\n";
  }
}

inline std::string shot_table_to_string(const ShotTable& t) {
  std::ostringstream os;
  write_shot_table(os, t);
  return os.str();
}

inline ShotTable read_shot_table(std::istream& in, const std::string& source = "<counts>") {
  text::LineReader r(in, source);
  std::vector<std::string> f;
  if (!r.next(f) || f.size() != 2 || f[0] != "bvspeed-counts" || f[1] != "1") {
    r.fail("missing 'bvspeed-counts 1' header");
  }
  ShotTable t;
  bool have_oracle = false;
  bool have_total = false;
  std::uint64_t sum = 0;
  while (r.next(f)) {
    if (f[0] == "oracle") {
      r.expect_fields(f, 2);
      try {
        t.oracle = OracleSpec(Bitstring::parse(f[1]));
      } catch (const ConfigError& e) {
        r.fail(std::string("bad oracle: ") + e.what());
      }
      have_oracle = true;
    } else if (f[0] == "total_shots") {
      r.expect_fields(f, 2);
      t.total_shots = r.to_uint(f[1]);
      have_total = true;
    } else {
      if (!have_oracle) r.fail("count record before oracle record");
      if (f.size() != 2) r.fail("count record '" + f[0] + "' needs exactly a bitstring and a count");
      Bitstring x;
      try {
        x = Bitstring::parse(f[0]);
      } catch (const ConfigError& e) {
        r.fail("record '" + f[0] + "': " + e.what());
      }
      if (static_cast<int>(x.size()) != t.oracle.n()) {
        r.fail("record '" + f[0] + "' has length " + std::to_string(x.size()) + ", expected " +
               std::to_string(t.oracle.n()));
      }
      if (t.counts.count(x)) r.fail("duplicate record '" + f[0] + "'");
      std::uint64_t c = r.to_uint(f[1]);
      t.counts[x] = c;
      sum += c;
    }
  }
  if (!have_oracle) r.fail("missing oracle record");
  if (!have_total) r.fail("missing total_shots record");
  if (sum != t.total_shots) {
    r.fail("counts sum to " + std::to_string(sum) + " but total_shots is " + std::to_string(t.total_shots));
  }
  return t;
}

inline ShotTable shot_table_from_string(const std::string& s, const std::string& source = "<counts>") {
  std::istringstream is(s);
  return read_shot_table(is, source);
}

inline void save_shot_table(const std::string& path, const ShotTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  write_shot_table(out, t);
}

inline ShotTable load_shot_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_shot_table(in, path);
}

}  // namespace bvspeed
