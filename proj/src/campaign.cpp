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

#include "fuzzsplore/campaign.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fuzzsplore/error.hpp"
#include "json.hpp"

namespace fuzzsplore {
namespace fs = std::filesystem;
using nlohmann::json;

const FuzzerConfig* CampaignConfig::find(std::string_view fuzzer_id) const {
  for (const auto& f : fuzzers)
    if (f.fuzzer_id == fuzzer_id) return &f;
  return nullptr;
}

void CampaignConfig::validate() const {
  if (fuzzers.size() < 2)
    throw Error(ErrorKind::ValidationError,
                fmt::format("a campaign needs at least 2 fuzzers, got {}",
                            fuzzers.size()));
  if (map_size < 1) throw Error(ErrorKind::ValidationError, "map_size must be >= 1");
  static const std::regex id_re("[A-Za-z0-9_-]+");
  std::set<std::string> seen;
  auto check_exec = [&](const ExecutorSpec& e, const std::string& where) {
    if (e.map_size && *e.map_size != map_size)
      throw Error(ErrorKind::ValidationError,
                  fmt::format("{}: executor map_size {} != campaign map_size {}",
                              where, *e.map_size, map_size));
    try {
      e.validate();
    } catch (const Error& err) {
      throw Error(ErrorKind::ValidationError, fmt::format("{}: {}", where, err.what()));
    }
  };
  check_exec(edge_executor, "edge_executor");
  for (const auto& f : fuzzers) {
    if (!std::regex_match(f.fuzzer_id, id_re))
      throw Error(ErrorKind::ValidationError,
                  fmt::format("fuzzer id '{}' must match [A-Za-z0-9_-]+", f.fuzzer_id));
    if (!seen.insert(f.fuzzer_id).second)
      throw Error(ErrorKind::ValidationError,
                  fmt::format("duplicate fuzzer id '{}'", f.fuzzer_id));
    check_exec(f.executor, "fuzzer " + f.fuzzer_id);
  }
}

namespace {

bool parse_id(std::string_view s, TestcaseId& out) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Non-negative decimal: digits with an optional fractional part.
bool parse_time(std::string_view s, double& out) {
  static const std::regex re("[0-9]+(\\.[0-9]+)?");
  if (!std::regex_match(s.begin(), s.end(), re)) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

Error malformed(std::string_view key, std::string_view value) {
  return Error(ErrorKind::MalformedField,
               fmt::format("cannot parse `{}:{}`", key, value));
}

}  // namespace

QueueFilename parse_queue_filename(std::string_view name) {
  if (name.find('/') != std::string_view::npos)
    throw Error(ErrorKind::MalformedField,
                fmt::format("'{}' is not a bare filename", name));
  QueueFilename out;
  bool have_id = false;
  while (true) {
    const auto comma = name.find(',');
    const std::string_view seg = name.substr(0, comma);
    const auto colon = seg.find(':');
    if (colon != std::string_view::npos) {
      const auto key = seg.substr(0, colon);
      const auto value = seg.substr(colon + 1);
      if (key == "id") {
        if (!parse_id(value, out.tc_id)) throw malformed(key, value);
        have_id = true;
      } else if (key == "src") {
        out.parent_ids.clear();
        std::string_view rest = value;
        while (true) {
          const auto plus = rest.find('+');
          TestcaseId p;
          if (!parse_id(rest.substr(0, plus), p)) throw malformed(key, value);
          out.parent_ids.push_back(p);
          if (plus == std::string_view::npos) break;
          rest = rest.substr(plus + 1);
        }
        if (out.parent_ids.size() > 2) throw malformed(key, value);
      } else if (key == "time") {
        double t;
        if (!parse_time(value, t)) throw malformed(key, value);
        out.raw_time = t;
      } else if (key == "op") {
        out.mutation_op = std::string(value);
      }
    }
    if (comma == std::string_view::npos) break;
    name = name.substr(comma + 1);
  }
  if (!have_id) throw Error(ErrorKind::MissingId, "no `id:` segment");
  return out;
}

std::string format_queue_filename(const QueueFilename& fields) {
  std::string out = fmt::format("id:{:06}", fields.tc_id);
  if (!fields.parent_ids.empty()) {
    out += ",src:";
    for (std::size_t k = 0; k < fields.parent_ids.size(); ++k)
      out += fmt::format("{}{:06}", k ? "+" : "", fields.parent_ids[k]);
  }
  if (fields.raw_time) {
    char buf[512];
    auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), *fields.raw_time, std::chars_format::fixed);
    out += ",time:";
    out.append(buf, ptr);
  }
  if (fields.mutation_op) out += ",op:" + *fields.mutation_op;
  return out;
}

double to_seconds(double raw_time, TimeUnit unit) noexcept {
  return unit == TimeUnit::Milliseconds ? raw_time / 1000.0 : raw_time;
}

namespace {

std::map<std::string, QueueFilename> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError,
                fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  std::map<std::string, QueueFilename> out;
  if (!doc.is_object() || !doc.contains("testcases") || !doc["testcases"].is_array())
    throw Error(ErrorKind::SchemaError,
                fmt::format("{}: /testcases must be an array", path.string()));
  const auto& tcs = doc["testcases"];
  for (std::size_t k = 0; k < tcs.size(); ++k) {
    const auto& e = tcs[k];
    const auto where = fmt::format("{}: /testcases/{}", path.string(), k);
    if (!e.is_object() || !e.contains("file") || !e["file"].is_string() ||
        !e.contains("id") || !e["id"].is_number_unsigned())
      throw Error(ErrorKind::SchemaError,
                  where + " needs string `file` and non-negative integer `id`");
    QueueFilename f;
    f.tc_id = e["id"].get<TestcaseId>();
    if (e.contains("parents")) {
      if (!e["parents"].is_array() || e["parents"].size() > 2)
        throw Error(ErrorKind::SchemaError, where + "/parents must hold 0-2 ids");
      for (const auto& p : e["parents"]) {
        if (!p.is_number_unsigned())
          throw Error(ErrorKind::SchemaError, where + "/parents must hold integers");
        f.parent_ids.push_back(p.get<TestcaseId>());
      }
    }
    if (e.contains("time")) {
      if (!e["time"].is_number() || e["time"].get<double>() < 0)
        throw Error(ErrorKind::SchemaError, where + "/time must be a non-negative number");
      f.raw_time = e["time"].get<double>();
    }
    if (e.contains("op")) {
      if (!e["op"].is_string()) throw Error(ErrorKind::SchemaError, where + "/op must be a string");
      f.mutation_op = e["op"].get<std::string>();
    }
    out[e["file"].get<std::string>()] = std::move(f);
  }
  return out;
}

}  // namespace

std::vector<TestcaseRecord> ingest_queue(const FuzzerConfig& cfg,
                                         const CampaignConfig& campaign) {
  std::error_code ec;
  if (!fs::is_directory(cfg.queue_dir, ec))
    throw Error(ErrorKind::ValidationError,
                fmt::format("fuzzer {}: queue_dir {} is not a readable directory",
                            cfg.fuzzer_id, cfg.queue_dir.string()));

  std::map<std::string, QueueFilename> manifest;
  const auto manifest_path = cfg.queue_dir / "manifest.json";
  if (fs::is_regular_file(manifest_path)) manifest = read_manifest(manifest_path);

  std::vector<TestcaseRecord> records;
  std::map<TestcaseId, std::string> file_of;
  for (const auto& entry : fs::directory_iterator(cfg.queue_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.starts_with('.') || name == "manifest.json") continue;

    QueueFilename fields;
    if (auto it = manifest.find(name); it != manifest.end()) {
      fields = it->second;
    } else {
      try {
        fields = parse_queue_filename(name);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MissingId)
          throw Error(e.kind(), fmt::format("fuzzer {}: {}: {}", cfg.fuzzer_id, name, e.what()));
        spdlog::warn("fuzzer {}: skipping '{}' ({})", cfg.fuzzer_id, name, e.what());
        continue;
      }
    }

    if (auto [it, inserted] = file_of.emplace(fields.tc_id, name); !inserted)
      throw Error(ErrorKind::DuplicateId,
                  fmt::format("fuzzer {}: '{}' and '{}' share id {}", cfg.fuzzer_id,
                              it->second, name, fields.tc_id));
    for (TestcaseId p : fields.parent_ids)
      if (p >= fields.tc_id)
        throw Error(ErrorKind::ParentNotSmaller,
                    fmt::format("fuzzer {}: '{}' has parent {} >= id {}", cfg.fuzzer_id,
                                name, p, fields.tc_id));

    TestcaseRecord r;
    r.tc_id = fields.tc_id;
    r.fuzzer_id = cfg.fuzzer_id;
    // Entries without a time field (e.g. AFL++ initial seeds) are present from
    // the campaign start.
    r.discovery_time_s = to_seconds(fields.raw_time.value_or(0.0), campaign.time_unit);
    r.parent_ids = std::move(fields.parent_ids);
    r.mutation_op = std::move(fields.mutation_op);
    r.input_path = entry.path();
    records.push_back(std::move(r));
  }

  if (records.empty())
    throw Error(ErrorKind::EmptyQueue,
                fmt::format("fuzzer {}: no testcases in {}", cfg.fuzzer_id,
                            cfg.queue_dir.string()));

  for (auto& r : records) {
    std::erase_if(r.parent_ids, [&](TestcaseId p) {
      if (file_of.contains(p)) return false;
      spdlog::warn("fuzzer {}: testcase {} references missing parent {}; treating as root",
                   cfg.fuzzer_id, r.tc_id, p);
      return true;
    });
  }
  std::sort(records.begin(), records.end(), replay_order_less);
  return records;
}

namespace {

// Typed field access that reports failures as SchemaError with a JSON pointer.
class Reader {
 public:
  Reader(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {}

  void require_object(std::initializer_list<std::string_view> allowed) const {
    if (!j_.is_object()) fail("", "expected an object");
    for (const auto& [key, _] : j_.items())
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail("/" + key, "unknown key");
  }
  bool has(const std::string& key) const { return j_.contains(key); }
  Reader at(const std::string& key) const {
    if (!j_.contains(key)) fail("/" + key, "required key missing");
    return Reader(j_[key], ptr_ + "/" + key);
  }
  Reader at(std::size_t k) const { return Reader(j_[k], fmt::format("{}/{}", ptr_, k)); }

  std::string str() const {
    if (!j_.is_string()) fail("", "expected a string");
    return j_.get<std::string>();
  }
  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("", "expected an integer");
    return j_.get<std::int64_t>();
  }
  std::size_t array_size() const {
    if (!j_.is_array()) fail("", "expected an array");
    return j_.size();
  }
  [[noreturn]] void fail(const std::string& suffix, const std::string& msg) const {
    const std::string p = ptr_ + suffix;
    throw Error(ErrorKind::SchemaError, fmt::format("{}: {}", p.empty() ? "/" : p, msg));
  }

 private:
  const json& j_;
  std::string ptr_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

ExecutorSpec parse_executor(const Reader& r, const fs::path& base) {
  r.require_object({"kind", "argv", "timeout_ms", "coverage_dir", "map_size"});
  ExecutorSpec e;
  const std::string kind = r.at("kind").str();
  if (kind == "command") {
    e.kind = ExecutorKind::Command;
    const auto argv = r.at("argv");
    for (std::size_t k = 0, n = argv.array_size(); k < n; ++k)
      e.argv_template.push_back(argv.at(k).str());
    if (r.has("timeout_ms")) e.timeout = std::chrono::milliseconds(r.at("timeout_ms").integer());
    if (r.has("coverage_dir")) r.fail("/coverage_dir", "not allowed for kind 'command'");
  } else if (kind == "replay") {
    e.kind = ExecutorKind::Replay;
    e.coverage_dir = resolve(base, r.at("coverage_dir").str());
    if (r.has("argv")) r.fail("/argv", "not allowed for kind 'replay'");
  } else {
    r.at("kind").fail("", "expected 'command' or 'replay'");
  }
  if (r.has("map_size")) {
    const auto m = r.at("map_size").integer();
    if (m < 1) throw Error(ErrorKind::ValidationError, "executor map_size must be >= 1");
    e.map_size = static_cast<std::size_t>(m);
  }
  return e;
}

}  // namespace

CampaignConfig parse_campaign(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, fmt::format("/: invalid JSON: {}", e.what()));
  }
  const Reader root(doc, "");
  root.require_object({"map_size", "time_unit", "bucketing", "edge_executor", "fuzzers"});

  CampaignConfig c;
  if (root.has("map_size")) {
    const auto m = root.at("map_size").integer();
    if (m < 1) throw Error(ErrorKind::ValidationError, fmt::format("map_size must be >= 1, got {}", m));
    c.map_size = static_cast<std::size_t>(m);
  }
  if (root.has("time_unit")) {
    const auto u = root.at("time_unit").str();
    if (u == "seconds") c.time_unit = TimeUnit::Seconds;
    else if (u == "milliseconds") c.time_unit = TimeUnit::Milliseconds;
    else root.at("time_unit").fail("", "expected 'seconds' or 'milliseconds'");
  }
  if (root.has("bucketing")) {
    const auto b = root.at("bucketing").str();
    if (b == "afl_buckets") c.bucketing = Bucketing::AflBuckets;
    else if (b == "raw") c.bucketing = Bucketing::Raw;
    else root.at("bucketing").fail("", "expected 'afl_buckets' or 'raw'");
  }
  c.edge_executor = parse_executor(root.at("edge_executor"), base_dir);

  const auto fuzzers = root.at("fuzzers");
  for (std::size_t k = 0, n = fuzzers.array_size(); k < n; ++k) {
    const auto f = fuzzers.at(k);
    f.require_object({"id", "name", "queue_dir", "executor", "color"});
    FuzzerConfig fc;
    fc.fuzzer_id = f.at("id").str();
    fc.display_name = f.has("name") ? f.at("name").str() : fc.fuzzer_id;
    fc.queue_dir = resolve(base_dir, f.at("queue_dir").str());
    fc.executor = parse_executor(f.at("executor"), base_dir);
    if (f.has("color")) fc.color_hint = f.at("color").str();
    c.fuzzers.push_back(std::move(fc));
  }
  c.validate();
  return c;
}

CampaignConfig load_campaign(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, fmt::format("cannot read campaign file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_campaign(buf.str(), fs::absolute(path).parent_path());
}

namespace {

json executor_json(const ExecutorSpec& e) {
  json j;
  if (e.kind == ExecutorKind::Command) {
    j["kind"] = "command";
    j["argv"] = e.argv_template;
    j["timeout_ms"] = e.timeout.count();
  } else {
    j["kind"] = "replay";
    j["coverage_dir"] = e.coverage_dir.string();
  }
  if (e.map_size) j["map_size"] = *e.map_size;
  return j;
}

}  // namespace

std::string canonical_json(const CampaignConfig& c) {
  json j;
  j["map_size"] = c.map_size;
  j["time_unit"] = c.time_unit == TimeUnit::Seconds ? "seconds" : "milliseconds";
  j["bucketing"] = c.bucketing == Bucketing::Raw ? "raw" : "afl_buckets";
  j["edge_executor"] = executor_json(c.edge_executor);
  j["fuzzers"] = json::array();
  for (const auto& f : c.fuzzers) {
    json fj{{"id", f.fuzzer_id},
            {"name", f.display_name},
            {"queue_dir", f.queue_dir.string()},
            {"executor", executor_json(f.executor)}};
    if (f.color_hint) fj["color"] = *f.color_hint;
    j["fuzzers"].push_back(std::move(fj));
  }
  return j.dump();
}

}  // namespace fuzzsplore
