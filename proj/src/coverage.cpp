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

#include "fuzzsplore/coverage.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "fuzzsplore/error.hpp"

namespace fuzzsplore {
namespace fs = std::filesystem;

HitcountVector::HitcountVector(std::size_t map_size) : map_size_(map_size) {}

HitcountVector HitcountVector::from_entries(std::size_t map_size,
                                            std::vector<EdgeHit> entries) {
  HitcountVector v(map_size);
  std::erase_if(entries, [](const EdgeHit& e) { return e.count == 0; });
  std::sort(entries.begin(), entries.end(),
            [](const EdgeHit& a, const EdgeHit& b) { return a.index < b.index; });
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].index >= map_size)
      throw Error(ErrorKind::IndexOutOfRange,
                  fmt::format("edge index {} >= map size {}", entries[k].index,
                              map_size));
    if (k > 0 && entries[k].index == entries[k - 1].index)
      throw Error(ErrorKind::CoverageMalformed,
                  fmt::format("edge index {} listed twice", entries[k].index));
  }
  v.entries_ = std::move(entries);
  return v;
}

HitCount HitcountVector::get(EdgeIndex index) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const EdgeHit& e, EdgeIndex i) { return e.index < i; });
  return (it != entries_.end() && it->index == index) ? it->count : 0;
}

void HitcountVector::set(EdgeIndex index, HitCount count) {
  if (index >= map_size_)
    throw Error(ErrorKind::IndexOutOfRange,
                fmt::format("edge index {} >= map size {}", index, map_size_));
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const EdgeHit& e, EdgeIndex i) { return e.index < i; });
  const bool present = it != entries_.end() && it->index == index;
  if (count == 0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->count = count;
  } else {
    entries_.insert(it, EdgeHit{index, count});
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename Int>
bool parse_decimal(std::string_view s, Int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

HitcountVector parse_coverage(std::string_view text, std::size_t map_size) {
  std::vector<EdgeHit> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;

    const auto colon = line.find(':');
    std::uint64_t index = 0;
    unsigned count = 0;
    if (colon == std::string_view::npos ||
        !parse_decimal(trim(line.substr(0, colon)), index) ||
        !parse_decimal(trim(line.substr(colon + 1)), count) || count < 1 ||
        count > 255)
      throw Error(ErrorKind::CoverageMalformed,
                  fmt::format("line {}: expected `edge_index:count` with count "
                              "in [1, 255], got '{}'",
                              line_no, line));
    if (index >= map_size)
      throw Error(ErrorKind::IndexOutOfRange,
                  fmt::format("line {}: edge index {} >= map size {}", line_no,
                              index, map_size));
    entries.push_back({static_cast<EdgeIndex>(index), static_cast<HitCount>(count)});
  }
  return HitcountVector::from_entries(map_size, std::move(entries));
}

std::string format_coverage(const HitcountVector& v) {
  std::string out;
  for (const auto& e : v.entries()) out += fmt::format("{}:{}\n", e.index, e.count);
  return out;
}

HitcountVector read_coverage_file(const fs::path& path, std::size_t map_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::CoverageMissing,
                fmt::format("cannot read coverage file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_coverage(buf.str(), map_size);
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

HitCount bucket_count(HitCount count) noexcept {
  if (count <= 2) return count;
  if (count == 3) return 4;
  if (count <= 7) return 8;
  if (count <= 15) return 16;
  if (count <= 31) return 32;
  if (count <= 127) return 64;
  return 128;
}

HitcountVector classify_counts(const HitcountVector& v, Bucketing mode) {
  if (mode == Bucketing::Raw) return v;
  std::vector<EdgeHit> out(v.entries().begin(), v.entries().end());
  for (auto& e : out) e.count = bucket_count(e.count);
  return HitcountVector::from_entries(v.map_size(), std::move(out));
}

bool merge_into(HitcountVector& acc, const HitcountVector& v) {
  if (acc.map_size() != v.map_size())
    throw Error(ErrorKind::MapSizeMismatch,
                fmt::format("accumulator map size {} != vector map size {}",
                            acc.map_size(), v.map_size()));
  auto a = acc.entries();
  auto b = v.entries();
  std::vector<EdgeHit> merged;
  merged.reserve(a.size() + b.size());
  bool interesting = false;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      merged.push_back(a[i++]);
    } else if (i == a.size() || b[j].index < a[i].index) {
      interesting = true;
      merged.push_back(b[j++]);
    } else {
      if (b[j].count > a[i].count) interesting = true;
      merged.push_back({a[i].index, std::max(a[i].count, b[j].count)});
      ++i;
      ++j;
    }
  }
  if (interesting)
    acc = HitcountVector::from_entries(acc.map_size(), std::move(merged));
  return interesting;
}

MergeResult merge_coverage(const HitcountVector& acc, const HitcountVector& v) {
  MergeResult r{acc, false};
  r.is_interesting = merge_into(r.merged, v);
  return r;
}

std::size_t count_not_zeros(const HitcountVector& v) noexcept {
  return v.entries().size();
}

void ExecutorSpec::validate() const {
  switch (kind) {
    case ExecutorKind::Command: {
      if (argv_template.empty())
        throw Error(ErrorKind::ValidationError, "command executor has empty argv");
      const auto n = std::count(argv_template.begin(), argv_template.end(), "@@");
      if (n != 1)
        throw Error(ErrorKind::ValidationError,
                    fmt::format("command template must contain `@@` exactly "
                                "once, found {}",
                                n));
      if (timeout.count() <= 0)
        throw Error(ErrorKind::ValidationError, "timeout_ms must be positive");
      break;
    }
    case ExecutorKind::Replay:
      if (!fs::is_directory(coverage_dir))
        throw Error(ErrorKind::ValidationError,
                    fmt::format("replay coverage_dir {} does not exist",
                                coverage_dir.string()));
      break;
  }
}

fs::path replay_coverage_path(const ExecutorSpec& exec, const TestcaseRecord& tc) {
  return exec.coverage_dir / tc.fuzzer_id / fmt::format("{}.cov", tc.tc_id);
}

namespace {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "fuzzsplore-XXXXXX").string();
    if (!mkdtemp(tmpl.data()))
      throw Error(ErrorKind::ExecutorFailure,
                  fmt::format("mkdtemp failed: {}", std::strerror(errno)));
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

extern "C" char** environ;

ExecutionOutcome run_command(const ExecutorSpec& exec, const TestcaseRecord& tc,
                             std::size_t map_size) {
  TempDir scratch;
  const fs::path cov_out = scratch.path() / "coverage";

  std::vector<std::string> args;
  for (const auto& a : exec.argv_template)
    args.push_back(a == "@@" ? tc.input_path.string() : a);
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  std::vector<std::string> env_storage;
  for (char** e = environ; *e; ++e)
    if (std::strncmp(*e, "COV_OUT=", 8) != 0) env_storage.emplace_back(*e);
  env_storage.push_back("COV_OUT=" + cov_out.string());
  std::vector<char*> envp;
  for (auto& e : env_storage) envp.push_back(e.data());
  envp.push_back(nullptr);

  // The child reports exec failure through a close-on-exec pipe.
  int err_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0)
    throw Error(ErrorKind::ExecutorFailure,
                fmt::format("pipe failed: {}", std::strerror(errno)));

  const pid_t pid = fork();
  if (pid < 0) {
    close(err_pipe[0]);
    close(err_pipe[1]);
    throw Error(ErrorKind::ExecutorFailure,
                fmt::format("fork failed: {}", std::strerror(errno)));
  }
  if (pid == 0) {
    setpgid(0, 0);
    const int devnull = open("/dev/null", O_RDWR);
    if (devnull >= 0) {
      dup2(devnull, STDIN_FILENO);
      dup2(devnull, STDOUT_FILENO);
      dup2(devnull, STDERR_FILENO);
    }
    execvpe(argv[0], argv.data(), envp.data());
    const int err = errno;
    (void)!write(err_pipe[1], &err, sizeof(err));
    _exit(127);
  }
  close(err_pipe[1]);
  int child_errno = 0;
  const auto got = read(err_pipe[0], &child_errno, sizeof(child_errno));
  close(err_pipe[0]);

  int status = 0;
  bool timed_out = false;
  if (got == static_cast<ssize_t>(sizeof(child_errno))) {
    waitpid(pid, &status, 0);
    throw Error(ErrorKind::ExecutorFailure,
                fmt::format("cannot spawn '{}': {}", args.front(),
                            std::strerror(child_errno)));
  }

  const auto deadline = std::chrono::steady_clock::now() + exec.timeout;
  auto pause = std::chrono::microseconds(200);
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR)
      throw Error(ErrorKind::ExecutorFailure,
                  fmt::format("waitpid failed: {}", std::strerror(errno)));
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(10000));
  }

  ExecutionOutcome out{HitcountVector(map_size), false, timed_out};
  out.crashed = !timed_out && WIFSIGNALED(status);
  const bool abnormal = out.crashed || out.timed_out;

  if (!fs::exists(cov_out)) {
    if (abnormal) return out;
    throw Error(ErrorKind::CoverageMissing,
                fmt::format("command exited with status {} without writing "
                            "COV_OUT",
                            WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  }
  try {
    out.vector = read_coverage_file(cov_out, map_size);
  } catch (const Error&) {
    // A partially written file from an aborted run counts as no coverage.
    if (!abnormal) throw;
  }
  return out;
}

}  // namespace

ExecutionOutcome execute(const ExecutorSpec& exec, const TestcaseRecord& tc,
                         std::size_t map_size) {
  if (exec.kind == ExecutorKind::Replay) {
    const auto path = replay_coverage_path(exec, tc);
    if (!fs::is_regular_file(path))
      throw Error(ErrorKind::CoverageMissing,
                  fmt::format("replay coverage {} not found", path.string()));
    return {read_coverage_file(path, map_size), false, false};
  }
  return run_command(exec, tc, map_size);
}

}  // namespace fuzzsplore
