// Copyright 2026 The concatmt Authors
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

// External translators are driven through files: the command template is
// expanded with the input and output paths, run under /bin/sh with a clean
// environment, and must write exactly one output line per input line.

#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "concatmt/corpus.hpp"
#include "concatmt/error.hpp"
#include "concatmt/text.hpp"

namespace concatmt {

enum class Direction : std::uint8_t { Forward, Backward };

inline std::string_view to_string(Direction d) noexcept {
  return d == Direction::Forward ? "forward" : "backward";
}

struct TranslatorSpec {
  /// Shell command containing {IN} and {OUT} exactly once each. An optional
  /// {SEED} is replaced with the run seed.
  std::string command_template;
  Direction direction = Direction::Forward;
  std::string name = "translator";
  double timeout_seconds = 3600.0;

  void validate() const {
    auto occurrences = [this](std::string_view needle) {
      std::size_t n = 0;
      for (auto pos = command_template.find(needle); pos != std::string::npos;
           pos = command_template.find(needle, pos + needle.size())) {
        ++n;
      }
      return n;
    };
    if (occurrences("{IN}") != 1 || occurrences("{OUT}") != 1) {
      throw InputError("translator '" + name +
                       "': command template must contain {IN} and {OUT} exactly once: " +
                       command_template);
    }
    if (!(timeout_seconds > 0)) {
      throw InputError("translator '" + name + "': timeout must be positive");
    }
  }
};

/// Variables copied from the parent environment into every child. Extra
/// names can be listed, comma separated, in CONCATMT_PASS_ENV.
inline constexpr std::string_view kPassEnvVariable = "CONCATMT_PASS_ENV";
inline constexpr std::string_view kDefaultPassEnv[] = {"PATH", "HOME", "LANG", "LC_ALL",
                                                       "LC_CTYPE", "TMPDIR"};

namespace detail {

inline std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

inline std::vector<std::string> child_environment() {
  std::vector<std::string> names(std::begin(kDefaultPassEnv), std::end(kDefaultPassEnv));
  if (const char* extra = std::getenv(std::string(kPassEnvVariable).c_str())) {
    for (const auto& n : text::split_on(extra, ',')) {
      const auto t = text::trim(n);
      if (!t.empty()) names.emplace_back(t);
    }
  }
  std::vector<std::string> env;
  bool have_path = false;
  for (const auto& n : names) {
    if (std::any_of(env.begin(), env.end(),
                    [&](const std::string& e) { return e.starts_with(n + "="); })) {
      continue;
    }
    if (const char* v = std::getenv(n.c_str())) {
      env.push_back(n + "=" + v);
      if (n == "PATH") have_path = true;
    }
  }
  if (!have_path) env.emplace_back("PATH=/usr/local/bin:/usr/bin:/bin");
  return env;
}

inline std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TranslatorError("translator produced no output file " + path.string());
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

inline std::string read_head(const std::filesystem::path& path, std::size_t limit = 64 * 1024) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string buf(limit, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(limit));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  return buf;
}

}  // namespace detail

/// Expanded shell command for the given paths (quoted) and seed.
inline std::string expand_command(const TranslatorSpec& spec, const std::filesystem::path& input,
                                  const std::filesystem::path& output,
                                  std::optional<std::uint64_t> seed = std::nullopt) {
  std::string cmd = detail::replace_all(spec.command_template, "{IN}",
                                        detail::shell_quote(input.string()));
  cmd = detail::replace_all(std::move(cmd), "{OUT}", detail::shell_quote(output.string()));
  if (seed) cmd = detail::replace_all(std::move(cmd), "{SEED}", std::to_string(*seed));
  return cmd;
}

/// Runs the translator on `input`, writing `output` (default: input path
/// with ".<name>.out" appended). Combined stdout/stderr of the child goes
/// to "<output>.log", which is removed on success.
inline std::filesystem::path translate_file(const TranslatorSpec& spec,
                                            const std::filesystem::path& input,
                                            std::optional<std::filesystem::path> output = std::nullopt,
                                            std::optional<std::uint64_t> seed = std::nullopt) {
  spec.validate();
  if (!std::filesystem::exists(input)) {
    throw InputError("translator input does not exist: " + input.string());
  }
  const std::filesystem::path out_path =
      output ? *output : std::filesystem::path(input.string() + "." + spec.name + ".out");
  const std::filesystem::path log_path = out_path.string() + ".log";
  std::filesystem::remove(out_path);

  const std::string command = expand_command(spec, input, out_path, seed);
  std::vector<std::string> env = detail::child_environment();
  std::vector<char*> envp;
  for (auto& e : env) envp.push_back(e.data());
  envp.push_back(nullptr);
  std::string sh = "/bin/sh";
  std::string dash_c = "-c";
  std::string cmd_copy = command;
  char* argv[] = {sh.data(), dash_c.data(), cmd_copy.data(), nullptr};

  const int log_fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (log_fd < 0) throw Error("cannot create " + log_path.string() + ": " + std::strerror(errno));

  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(log_fd);
    throw TranslatorError("fork failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::dup2(log_fd, STDOUT_FILENO);
    ::dup2(log_fd, STDERR_FILENO);
    ::execve("/bin/sh", argv, envp.data());
    ::_exit(127);
  }
  ::close(log_fd);
  ::setpgid(pid, pid);

  using clock = std::chrono::steady_clock;
  const auto deadline =
      clock::now() + std::chrono::duration_cast<clock::duration>(
                         std::chrono::duration<double>(spec.timeout_seconds));
  auto pause = std::chrono::microseconds(200);
  int status = 0;
  while (true) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw TranslatorError("waitpid failed: " + std::string(std::strerror(errno)));
    if (clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw TranslatorError("translator '" + spec.name + "' timed out after " +
                                text::format_full(spec.timeout_seconds) + " s: " + command,
                            detail::read_head(log_path));
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(20000));
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string how = WIFEXITED(status)
                                ? "exited with status " + std::to_string(WEXITSTATUS(status))
                                : "was killed by signal " + std::to_string(WTERMSIG(status));
    throw TranslatorError("translator '" + spec.name + "' " + how + ": " + command,
                          detail::read_head(log_path));
  }
  const std::size_t in_lines = detail::count_lines(input);
  const std::size_t out_lines = detail::count_lines(out_path);
  if (in_lines != out_lines) {
    throw TranslatorError("translator '" + spec.name + "' line-count mismatch: input " +
                              std::to_string(in_lines) + " vs output " + std::to_string(out_lines),
                          detail::read_head(log_path));
  }
  std::filesystem::remove(log_path);
  return out_path;
}

namespace detail {

inline void write_side(const Corpus& corpus, LengthSide side, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& p : corpus) out << p.side(side).raw() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

/// Rebuilds a corpus with one side replaced by translator output lines.
inline Corpus rebuild_with(const Corpus& parallel, LengthSide replaced,
                           const std::filesystem::path& lines_path, Origin origin,
                           const std::string& translator) {
  std::ifstream in(lines_path, std::ios::binary);
  if (!in) throw TranslatorError("cannot read translator output " + lines_path.string());
  Corpus out = parallel.empty_like(parallel.name() + "." + std::string(to_string(origin)));
  out.reserve(parallel.size());
  std::string line;
  for (const auto& p : parallel) {
    std::getline(in, line);
    const std::string where = translator + " output line " + std::to_string(p.id + 1);
    if (!text::valid_utf8(line)) throw TranslatorError(where + ": invalid UTF-8");
    Sentence produced;
    try {
      produced = Sentence(line);
    } catch (const InputError& e) {
      throw TranslatorError(where + ": " + e.what());
    }
    if (produced.empty()) throw TranslatorError(where + ": empty translation");
    if (produced.count(parallel.separator()) > 0) {
      throw TranslatorError(where + ": translation contains the separator token");
    }
    if (replaced == LengthSide::Source) {
      out.add(std::move(produced), p.target, origin);
    } else {
      out.add(p.source, std::move(produced), origin);
    }
  }
  return out;
}

inline void require_original(const Corpus& parallel, std::string_view what) {
  const auto o = parallel.uniform_origin();
  if (!parallel.empty() && o != Origin::Original) {
    throw DomainError(std::string(what) + " needs a corpus of original pairs");
  }
}

}  // namespace detail

/// Pseudo pairs whose targets are the original targets and whose sources
/// are backward translations of them.
inline Corpus back_translate(const Corpus& parallel, const TranslatorSpec& backward,
                             const std::filesystem::path& work_dir) {
  detail::require_original(parallel, "back-translation");
  std::filesystem::create_directories(work_dir);
  const auto in = work_dir / "bt.input.txt";
  detail::write_side(parallel, LengthSide::Target, in);
  const auto out = translate_file(backward, in, work_dir / "bt.output.txt");
  return detail::rebuild_with(parallel, LengthSide::Source, out, Origin::PseudoBT, backward.name);
}

/// Pseudo pairs whose sources are the original sources and whose targets
/// are forward translations of them.
inline Corpus self_train(const Corpus& parallel, const TranslatorSpec& forward,
                         const std::filesystem::path& work_dir) {
  detail::require_original(parallel, "self-training");
  std::filesystem::create_directories(work_dir);
  const auto in = work_dir / "st.input.txt";
  detail::write_side(parallel, LengthSide::Source, in);
  const auto out = translate_file(forward, in, work_dir / "st.output.txt");
  return detail::rebuild_with(parallel, LengthSide::Target, out, Origin::PseudoST, forward.name);
}

// Deterministic stand-ins for real translation systems.
namespace mock {

enum class Kind { Identity, Reverse, Truncate };

struct Mock {
  Kind kind = Kind::Identity;
  std::size_t keep = 0;  // words kept by Truncate, >= 1
};

/// "identity", "reverse", or "truncate:K".
inline Mock parse(std::string_view s) {
  if (s == "identity") return {Kind::Identity, 0};
  if (s == "reverse") return {Kind::Reverse, 0};
  if (s.starts_with("truncate:")) {
    const auto keep = text::parse_number<std::size_t>(s.substr(9), "truncate cutoff");
    if (keep == 0) throw InputError("truncate cutoff must be positive");
    return {Kind::Truncate, keep};
  }
  throw InputError("unknown mock translator '" + std::string(s) + "'");
}

inline std::string apply(const Mock& m, std::string_view line) {
  if (m.kind == Kind::Identity) return std::string(line);
  auto tokens = text::split(line);
  if (m.kind == Kind::Reverse) {
    std::reverse(tokens.begin(), tokens.end());
  } else if (tokens.size() > m.keep) {
    tokens.resize(m.keep);
  }
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

inline void translate_stream(const Mock& m, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) out << mock::apply(m, line) << '\n';
}

/// Spec running the bundled mock translator executable.
inline TranslatorSpec spec(const std::filesystem::path& executable, std::string_view kind,
                           Direction direction) {
  TranslatorSpec s;
  s.command_template = detail::shell_quote(executable.string()) + " " + std::string(kind) +
                       " {IN} {OUT}";
  s.direction = direction;
  s.name = "mock-" + std::string(kind.substr(0, kind.find(':')));
  s.timeout_seconds = 60;
  return s;
}

}  // namespace mock

}  // namespace concatmt
