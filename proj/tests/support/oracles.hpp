// Copyright 2026 The FuzzSplore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent reference computations used to freeze expected values. Nothing
// here calls into the code paths it checks: coverage files are re-read with
// a separate parser into dense arrays and folded naively.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fuzzsplore::oracle {

inline constexpr std::size_t kDenseSize = 65536;
using Dense = std::vector<std::uint8_t>;

inline Dense read_dense(const std::filesystem::path& path, std::size_t map_size) {
  Dense v(map_size, 0);
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    unsigned long idx = 0, cnt = 0;
    if (std::sscanf(line.c_str(), "%lu:%lu", &idx, &cnt) == 2 && idx < map_size) v[idx] = static_cast<std::uint8_t>(cnt);
  }
  return v;
}

inline std::uint8_t afl_class(std::uint8_t c) {
  static const std::array<std::uint8_t, 256> table = [] {
    std::array<std::uint8_t, 256> t{};
    t[0] = 0;
    t[1] = 1;
    t[2] = 2;
    t[3] = 4;
    for (int k = 4; k <= 7; ++k) t[k] = 8;
    for (int k = 8; k <= 15; ++k) t[k] = 16;
    for (int k = 16; k <= 31; ++k) t[k] = 32;
    for (int k = 32; k <= 127; ++k) t[k] = 64;
    for (int k = 128; k <= 255; ++k) t[k] = 128;
    return t;
  }();
  return table[c];
}

struct Testcase {
  std::uint64_t id;
  double time_s;
};

struct Result {
  std::map<std::string, std::vector<std::pair<double, std::size_t>>> curves;
  std::map<std::string, std::map<std::uint64_t, std::set<std::string>>> interesting;
  std::map<std::string, std::vector<std::pair<std::uint64_t, Dense>>> matrices;
  std::map<std::string, std::map<std::int64_t, std::size_t>> histogram;
};

/// Naive dense replay fold over coverage files.
///   edge_dir/<owner>/<id>.cov           edge coverage
///   fuzzer_dirs[j]/<owner>/<id>.cov     fuzzer j's feedback
inline Result replay_fold(const std::vector<std::string>& fuzzers,
                         std::map<std::string, std::vector<Testcase>> queues,
                         const std::filesystem::path& edge_dir,
                         const std::map<std::string, std::filesystem::path>& fuzzer_dirs,
                         bool afl_buckets, std::size_t map_size = kDenseSize) {
  auto load = [&](const std::filesystem::path& dir, const std::string& owner, std::uint64_t id) {
    Dense v = read_dense(dir / owner / (std::to_string(id) + ".cov"), map_size);
    if (afl_buckets)
      for (auto& c : v) c = afl_class(c);
    return v;
  };
  auto fold = [](Dense& acc, const Dense& v) {
    bool interesting = false;
    for (std::size_t k = 0; k < acc.size(); ++k)
      if (v[k] > acc[k]) {
        acc[k] = v[k];
        interesting = true;
      }
    return interesting;
  };

  Result r;
  for (const auto& owner : fuzzers) {
    auto& q = queues[owner];
    std::sort(q.begin(), q.end(), [](const Testcase& a, const Testcase& b) {
      return a.time_s != b.time_s ? a.time_s < b.time_s : a.id < b.id;
    });
    auto& curve = r.curves[owner];
    auto& rows = r.matrices[owner];
    auto& hist = r.histogram[owner];
    auto& inter = r.interesting[owner];
    Dense acc(map_size, 0);
    for (const auto& t : q) {
      ++hist[static_cast<std::int64_t>(std::floor(t.time_s))];
      inter[t.id];
      Dense v = load(edge_dir, owner, t.id);
      rows.emplace_back(t.id, v);
      if (fold(acc, v)) {
        const auto edges = static_cast<std::size_t>(
            std::count_if(acc.begin(), acc.end(), [](std::uint8_t c) { return c != 0; }));
        if (!curve.empty() && curve.back().first == t.time_s)
          curve.back().second = std::max(curve.back().second, edges);
        else if (curve.empty() || edges > curve.back().second)
          curve.emplace_back(t.time_s, edges);
      }
    }
    for (const auto& other : fuzzers) {
      if (other == owner) continue;
      Dense acc_j(map_size, 0);
      for (const auto& t : q)
        if (fold(acc_j, load(fuzzer_dirs.at(other), owner, t.id))) inter[t.id].insert(other);
    }
  }
  return r;
}

/// Perplexity 2^H of one conditional distribution, H in bits.
inline double perplexity_bits(const std::vector<double>& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log2(x);
  return std::pow(2.0, h);
}

}  // namespace fuzzsplore::oracle
