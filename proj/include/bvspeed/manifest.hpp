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

// Run manifest, <out>/manifest.json:
//
//   {"bvspeed-manifest": 1,
//    "runs":    [{"command": "simulate", "tool_version": "...", "timestamp": "...",
//                 "config": {...}}, ...],
//    "entries": [{"kind": "counts", "n": 6, "oracle": "110000",
//                 "path": "counts/n06/110000.counts", "sha256": "...",
//                 "source": "simulate", "run": 0, ...}, ...]}
//
// Both lists only grow. When two entries share (kind, oracle) the later one
// is current. Paths are relative to the manifest's directory.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include "bvspeed/config.hpp"

namespace bvspeed {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << bytes;
  if (!out) throw ConfigError("write failed for " + path);
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Relative path of a table or circuit file inside a run directory.
inline std::string artifact_path(const char* kind, const Bitstring& b) {
  std::ostringstream os;
  os << (std::string(kind) == "circuit" ? "circuits" : "counts") << "/n" << std::setw(2) << std::setfill('0') << b.size()
     << "/" << b.to_string() << (std::string(kind) == "circuit" ? ".circuit" : ".counts");
  return os.str();
}

class Manifest {
 public:
  /// Opens <dir>/manifest.json, or starts an empty one if absent.
  explicit Manifest(std::string dir) : dir_(std::move(dir)) {
    const std::string path = file();
    if (std::filesystem::exists(path)) {
      doc_ = detail::parse_json_file(path);
      detail::check_header(doc_, "bvspeed-manifest", kManifestVersion, path);
      if (!doc_.contains("runs") || !doc_.contains("entries") || !doc_["runs"].is_array() || !doc_["entries"].is_array()) {
        throw ConfigError(path + ": manifest needs \"runs\" and \"entries\" arrays");
      }
    } else {
      doc_ = {{"bvspeed-manifest", kManifestVersion}, {"runs", json::array()}, {"entries", json::array()}};
    }
  }

  const std::string& dir() const { return dir_; }
  std::string file() const { return (std::filesystem::path(dir_) / "manifest.json").string(); }
  std::string resolve(const std::string& rel) const { return (std::filesystem::path(dir_) / rel).string(); }
  const json& doc() const { return doc_; }

  /// Records a command invocation and returns its run index.
  int begin_run(const std::string& command, const json& config) {
    doc_["runs"].push_back(
        {{"command", command}, {"tool_version", kToolVersion}, {"timestamp", utc_timestamp()}, {"config", config}});
    return static_cast<int>(doc_["runs"].size()) - 1;
  }

  /// Config snapshot of the most recent run that carried one.
  std::optional<json> latest_config() const {
    for (auto it = doc_["runs"].rbegin(); it != doc_["runs"].rend(); ++it) {
      if (it->contains("config") && !(*it)["config"].is_null()) return (*it)["config"];
    }
    return std::nullopt;
  }

  /// Writes `bytes` to <dir>/<rel> and appends an entry for it.
  json& add_file(const std::string& kind, const Bitstring& oracle, const std::string& rel, const std::string& bytes,
                 const std::string& source, int run) {
    write_file(resolve(rel), bytes);
    doc_["entries"].push_back({{"kind", kind},
                               {"n", oracle.size()},
                               {"oracle", oracle.to_string()},
                               {"path", rel},
                               {"sha256", sha256_hex(bytes)},
                               {"source", source},
                               {"run", run}});
    return doc_["entries"].back();
  }

  /// Current entry per oracle for one kind, ordered by (n, oracle).
  std::vector<json> current(const std::string& kind) const {
    std::map<std::pair<std::size_t, std::string>, json> latest;
    for (const auto& e : doc_["entries"]) {
      if (e.value("kind", "") != kind) continue;
      const std::string b = e.at("oracle").get<std::string>();
      latest[{b.size(), b}] = e;
    }
    std::vector<json> out;
    for (auto& [k, e] : latest) out.push_back(e);
    return out;
  }

  /// Throws ConfigError naming the first referenced file that is missing or altered.
  void verify() const {
    for (const auto& e : doc_["entries"]) {
      const std::string path = resolve(e.at("path").get<std::string>());
      if (!std::filesystem::exists(path)) throw ConfigError("manifest references missing file " + path);
      if (sha256_hex(read_file(path)) != e.at("sha256").get<std::string>()) {
        throw ConfigError("checksum mismatch for " + path);
      }
    }
  }

  void save() const { write_file(file(), doc_.dump(2) + "\n"); }

 private:
  std::string dir_;
  json doc_;
};

}  // namespace bvspeed
