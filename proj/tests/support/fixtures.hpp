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

#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "concatmt/corpus.hpp"

namespace fixtures {

namespace fs = std::filesystem;

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("concatmt-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

inline void write_raw(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

inline std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::vector<std::string> out;
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

/// Random sentence of `len` words drawn from a small vocabulary.
inline std::string random_sentence(std::mt19937_64& gen, std::size_t len, std::size_t vocab = 50,
                                   const std::string& prefix = "w") {
  std::string s;
  for (std::size_t i = 0; i < len; ++i) {
    if (i) s += ' ';
    s += prefix + std::to_string(gen() % vocab);
  }
  return s;
}

/// Original-origin corpus with source lengths in [min_len, max_len].
inline concatmt::Corpus random_corpus(std::size_t n, std::uint64_t seed, std::size_t min_len = 3,
                                      std::size_t max_len = 30) {
  std::mt19937_64 gen(seed);
  concatmt::Corpus c("random");
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ls = min_len + gen() % (max_len - min_len + 1);
    const std::size_t lt = min_len + gen() % (max_len - min_len + 1);
    c.add(random_sentence(gen, ls, 200, "s"), random_sentence(gen, lt, 200, "t"),
          concatmt::Origin::Original);
  }
  return c;
}

}  // namespace fixtures
