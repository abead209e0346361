// Copyright 2026 The swimopt Authors
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

// Artifact files: gait JSON, CSV formatting, SHA-256 digests, and an
// artifact set that is written atomically per run (all files or none).

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "swimopt/errors.hpp"
#include "swimopt/gait.hpp"
#include "swimopt/refit.hpp"

namespace swimopt::harness {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Shortest round-trip representation; nan for missing values.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline std::string targets_csv(const refit::AngleTargets& targets) {
  CsvWriter csv({"s", "t", "theta_star"});
  for (const auto& a : targets.samples) csv.row({fmt(a.s), fmt(a.t), fmt(a.theta_star)});
  return csv.str();
}

inline json gait_to_json(const gait::ParamVector& p) {
  const auto f = p.flat();
  return json{{"params", std::vector<double>(f.begin(), f.end())}};
}

inline gait::ParamVector gait_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("params") || j.size() != 1) {
    throw ConfigError(where + ": expected an object with the single key \"params\"");
  }
  std::vector<double> v;
  try {
    v = j.at("params").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError(where + ".params: expected 12 numbers");
  }
  if (v.size() != gait::kNumParams) throw ConfigError(where + ".params: expected 12 numbers");
  try {
    return gait::ParamVector::from_flat(v);
  } catch (const DomainError& e) {
    throw ConfigError(where + ".params: " + e.what());
  }
}

inline gait::ParamVector load_gait(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return gait_from_json(j, path.string());
}

/// Files of one run. Everything is staged in memory, then written on
/// commit together with run.json; a failed commit removes what it wrote.
class ArtifactSet {
 public:
  explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string contents) { files_[name] = std::move(contents); }
  void add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }

  const fs::path& dir() const { return dir_; }

  /// Writes all files plus run.json = record + {"artifacts": {name: sha256}}.
  void commit(json record) {
    json hashes = json::object();
    for (const auto& [name, data] : files_) hashes[name] = sha256_hex(data);
    record["artifacts"] = hashes;
    files_["run.json"] = record.dump(2) + "\n";
    std::vector<fs::path> written;
    try {
      fs::create_directories(dir_);
      for (const auto& [name, data] : files_) {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        written.push_back(p);
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.close();
        if (!out) throw std::runtime_error("cannot write " + p.string());
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) fs::remove(p, ec);
      throw;
    }
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> files_;
};

}  // namespace swimopt::harness
