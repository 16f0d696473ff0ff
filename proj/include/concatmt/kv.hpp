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

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "concatmt/error.hpp"
#include "concatmt/text.hpp"

namespace concatmt {

// Flat `key=value` text used for metadata sidecars, manifests and pipeline
// configs. Keys keep insertion order so that written files are stable.
// Lines starting with '#' and blank lines are ignored on read.
class KeyValues {
 public:
  KeyValues() = default;

  void set(std::string key, std::string value) {
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = std::move(value);
        return;
      }
    }
    entries_.emplace_back(std::move(key), std::move(value));
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void set(std::string key, T value) {
    if constexpr (std::is_floating_point_v<T>) {
      set(std::move(key), text::format_full(value));
    } else if constexpr (std::is_same_v<T, bool>) {
      set(std::move(key), std::string(value ? "true" : "false"));
    } else {
      set(std::move(key), std::to_string(value));
    }
  }

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  bool contains(std::string_view key) const { return get(key).has_value(); }

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

  std::string to_string() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
      out += k;
      out += '=';
      out += v;
      out += '\n';
    }
    return out;
  }

  static KeyValues parse(std::string_view content, const std::string& origin = "<memory>") {
    KeyValues kv;
    std::size_t line_no = 0;
    for (const auto& raw_line : text::split_on(content, '\n')) {
      ++line_no;
      const auto line = text::trim(raw_line);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw InputError(origin + ":" + std::to_string(line_no) + ": expected key=value");
      }
      const auto key = text::trim(line.substr(0, eq));
      if (key.empty()) {
        throw InputError(origin + ":" + std::to_string(line_no) + ": empty key");
      }
      kv.set(std::string(key), std::string(text::trim(line.substr(eq + 1))));
    }
    return kv;
  }

  static KeyValues read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << to_string();
    if (!out) throw Error("write failed: " + path.string());
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace concatmt
