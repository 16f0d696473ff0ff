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

// Pairwise human judgments. A verdict is always from the point of view of
// the candidate system: win means the candidate output was preferred over
// the baseline output.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "concatmt/buckets.hpp"
#include "concatmt/error.hpp"
#include "concatmt/text.hpp"

namespace concatmt {

enum class Dimension : std::uint8_t { Adequacy, Fluency };
enum class Verdict : std::uint8_t { Win, Tie, Lose };

inline std::string_view to_string(Dimension d) noexcept {
  return d == Dimension::Adequacy ? "adequacy" : "fluency";
}

inline std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Win:
      return "win";
    case Verdict::Tie:
      return "tie";
    case Verdict::Lose:
      return "lose";
  }
  return "unknown";
}

struct Judgment {
  std::string item_id;
  std::size_t source_len = 0;
  Dimension dimension = Dimension::Adequacy;
  Verdict verdict = Verdict::Tie;
};

/// One verdict per (item, dimension).
class JudgmentSet {
 public:
  void add(Judgment j) {
    if (!keys_.emplace(j.item_id, j.dimension).second) {
      throw InputError("duplicate judgment for item '" + j.item_id + "' on " +
                       std::string(to_string(j.dimension)));
    }
    records_.push_back(std::move(j));
  }

  const std::vector<Judgment>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  /// Header-bearing CSV: item_id,source_len,dimension,verdict
  static JudgmentSet parse(std::string_view content, const std::string& origin = "<memory>") {
    JudgmentSet set;
    bool header = false;
    std::size_t line_no = 0;
    for (const auto& raw : text::split_on(content, '\n')) {
      ++line_no;
      const auto line = text::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      const auto cells = text::split_on(line, ',');
      const std::string where = origin + ":" + std::to_string(line_no) + ": ";
      if (!header) {
        if (cells.size() != 4 || text::trim(cells[0]) != "item_id" ||
            text::trim(cells[1]) != "source_len" || text::trim(cells[2]) != "dimension" ||
            text::trim(cells[3]) != "verdict") {
          throw InputError(where + "expected header item_id,source_len,dimension,verdict");
        }
        header = true;
        continue;
      }
      if (cells.size() != 4) throw InputError(where + "expected 4 columns");
      Judgment j;
      j.item_id = std::string(text::trim(cells[0]));
      if (j.item_id.empty()) throw InputError(where + "empty item_id");
      j.source_len = text::parse_number<std::size_t>(cells[1], "source_len");
      const auto dim = text::trim(cells[2]);
      if (dim == "adequacy") {
        j.dimension = Dimension::Adequacy;
      } else if (dim == "fluency") {
        j.dimension = Dimension::Fluency;
      } else {
        throw InputError(where + "unknown dimension '" + std::string(dim) + "'");
      }
      const auto v = text::trim(cells[3]);
      if (v == "win") {
        j.verdict = Verdict::Win;
      } else if (v == "tie") {
        j.verdict = Verdict::Tie;
      } else if (v == "lose") {
        j.verdict = Verdict::Lose;
      } else {
        throw InputError(where + "unknown verdict '" + std::string(v) + "'");
      }
      try {
        set.add(std::move(j));
      } catch (const InputError& e) {
        throw InputError(where + e.what());
      }
    }
    if (!header && line_no > 0 && !text::trim(content).empty()) {
      throw InputError(origin + ": missing header");
    }
    return set;
  }

  static JudgmentSet read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
  }

  std::string to_csv() const {
    std::string out = "item_id,source_len,dimension,verdict\n";
    for (const auto& j : records_) {
      out += j.item_id + "," + std::to_string(j.source_len) + "," +
             std::string(to_string(j.dimension)) + "," + std::string(to_string(j.verdict)) + "\n";
    }
    return out;
  }

 private:
  std::vector<Judgment> records_;
  std::set<std::pair<std::string, Dimension>> keys_;
};

/// win/tie/lose counts.
struct VerdictCounts {
  std::array<std::size_t, 3> counts{};

  std::size_t win() const noexcept { return counts[0]; }
  std::size_t tie() const noexcept { return counts[1]; }
  std::size_t lose() const noexcept { return counts[2]; }
  std::size_t total() const noexcept { return counts[0] + counts[1] + counts[2]; }

  friend bool operator==(const VerdictCounts&, const VerdictCounts&) = default;
};

struct JudgmentTally {
  std::vector<std::string> labels;
  /// [bucket][dimension]
  std::vector<std::array<VerdictCounts, 2>> per_bucket;
  std::array<VerdictCounts, 2> overall{};
  /// Judgments whose length falls outside every bucket; still in overall.
  std::size_t uncovered = 0;

  const VerdictCounts& at(std::size_t bucket, Dimension d) const {
    return per_bucket.at(bucket)[static_cast<std::size_t>(d)];
  }
  const VerdictCounts& total(Dimension d) const { return overall[static_cast<std::size_t>(d)]; }
};

inline JudgmentTally tally_judgments(const JudgmentSet& set, const BucketSpec& buckets) {
  JudgmentTally t;
  t.labels = buckets.labels();
  t.per_bucket.assign(buckets.size(), {});
  for (const auto& j : set.records()) {
    const auto d = static_cast<std::size_t>(j.dimension);
    const auto v = static_cast<std::size_t>(j.verdict);
    ++t.overall[d].counts[v];
    if (const auto b = buckets.bucket_of(j.source_len)) {
      ++t.per_bucket[*b][d].counts[v];
    } else {
      ++t.uncovered;
    }
  }
  return t;
}

}  // namespace concatmt
