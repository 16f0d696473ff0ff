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

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "concatmt/error.hpp"
#include "concatmt/text.hpp"

namespace concatmt {

/// Contiguous sentence-length ranges starting at 1 word. Each bucket is
/// described by its inclusive upper bound; an unbounded last bucket uses
/// kUnbounded and covers every longer sentence.
class BucketSpec {
 public:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  BucketSpec() = default;

  explicit BucketSpec(std::vector<std::size_t> upper_bounds) : bounds_(std::move(upper_bounds)) {
    if (bounds_.empty()) throw InputError("bucket spec needs at least one bucket");
    if (bounds_.front() < 1) throw InputError("first bucket upper bound must be >= 1");
    for (std::size_t i = 1; i < bounds_.size(); ++i) {
      if (bounds_[i] <= bounds_[i - 1]) {
        throw InputError("bucket upper bounds must be strictly increasing");
      }
    }
    std::size_t lower = 1;
    for (std::size_t ub : bounds_) {
      std::string label = std::to_string(lower) + "-";
      if (ub != kUnbounded) label += std::to_string(ub);
      labels_.push_back(std::move(label));
      lower = ub == kUnbounded ? ub : ub + 1;
    }
  }

  /// 1-10 ... 61-70, 71- (the test-set breakdown).
  static BucketSpec to70() { return BucketSpec({10, 20, 30, 40, 50, 60, 70, kUnbounded}); }
  /// 1-10 ... 41-50, 51- (the human-evaluation breakdown).
  static BucketSpec to50() { return BucketSpec({10, 20, 30, 40, 50, kUnbounded}); }
  /// 1-10 ... 61-70, 71-100, 101-200 (the pseudo-test breakdown).
  static BucketSpec to200() { return BucketSpec({10, 20, 30, 40, 50, 60, 70, 100, 200}); }

  /// Accepts "to70", "to50", "to200", or a comma list of upper bounds
  /// where the last entry may be "inf", e.g. "10,20,inf".
  static BucketSpec parse(std::string_view spec) {
    spec = text::trim(spec);
    if (spec == "to70") return to70();
    if (spec == "to50") return to50();
    if (spec == "to200") return to200();
    std::string_view body = spec;
    if (body.starts_with("custom:")) body.remove_prefix(7);
    std::vector<std::size_t> bounds;
    for (const auto& part : text::split_on(body, ',')) {
      const auto t = text::trim(part);
      if (t == "inf" || t == "+") {
        bounds.push_back(kUnbounded);
      } else {
        bounds.push_back(text::parse_number<std::size_t>(t, "bucket bound"));
      }
    }
    return BucketSpec(std::move(bounds));
  }

  /// Canonical text form, accepted by parse().
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
      if (i) out += ',';
      out += bounds_[i] == kUnbounded ? std::string("inf") : std::to_string(bounds_[i]);
    }
    return out;
  }

  std::size_t size() const noexcept { return bounds_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& upper_bounds() const noexcept { return bounds_; }

  bool covers_all() const noexcept { return !bounds_.empty() && bounds_.back() == kUnbounded; }

  /// Index of the bucket containing `length`, or nullopt when the length is
  /// zero or beyond the last bounded bucket.
  std::optional<std::size_t> bucket_of(std::size_t length) const noexcept {
    if (length == 0) return std::nullopt;
    const auto it = std::lower_bound(bounds_.begin(), bounds_.end(), length);
    if (it == bounds_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - bounds_.begin());
  }

  friend bool operator==(const BucketSpec&, const BucketSpec&) = default;

 private:
  std::vector<std::size_t> bounds_;
  std::vector<std::string> labels_;
};

}  // namespace concatmt
