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

// Corpus-level BLEU over whitespace-tokenized text with a single reference
// per hypothesis:
//
//   BLEU = BP * exp( (1/N) * sum_n log p_n )
//   p_n  = sum_i clipped matches_n(i) / sum_i hypothesis n-grams_n(i)
//   BP   = min(1, exp(1 - r/c)),  r, c = total reference/hypothesis words
//
// Counts are summed over the corpus before any division. An order for which
// neither side has a single n-gram (every sentence shorter than n) carries
// no evidence and is left out of the mean; any other zero precision makes
// the unsmoothed score 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "concatmt/buckets.hpp"
#include "concatmt/corpus.hpp"
#include "concatmt/error.hpp"
#include "concatmt/kv.hpp"
#include "concatmt/text.hpp"

namespace concatmt {

enum class Smoothing : std::uint8_t {
  None,
  /// (m + 1) / (t + 1) for orders 2..N.
  AddOne,
};

struct BleuOptions {
  int n_order = 4;
  Smoothing smoothing = Smoothing::None;
};

/// Sufficient statistics; BLEU of a set of sentences is a function of the
/// element-wise sum of their stats.
struct BleuStats {
  std::vector<std::uint64_t> matches;
  std::vector<std::uint64_t> hyp_ngrams;
  std::vector<std::uint64_t> ref_ngrams;
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;
  std::uint64_t sentences = 0;

  explicit BleuStats(int n_order = 4)
      : matches(static_cast<std::size_t>(n_order)),
        hyp_ngrams(static_cast<std::size_t>(n_order)),
        ref_ngrams(static_cast<std::size_t>(n_order)) {}

  int n_order() const noexcept { return static_cast<int>(matches.size()); }

  BleuStats& operator+=(const BleuStats& o) {
    for (std::size_t k = 0; k < matches.size(); ++k) {
      matches[k] += o.matches[k];
      hyp_ngrams[k] += o.hyp_ngrams[k];
      ref_ngrams[k] += o.ref_ngrams[k];
    }
    hyp_len += o.hyp_len;
    ref_len += o.ref_len;
    sentences += o.sentences;
    return *this;
  }
};

/// Clipped n-gram matching for one sentence pair. Reuses its buffers, so
/// keep one per thread when scoring many sentences.
class NgramMatcher {
 public:
  explicit NgramMatcher(int n_order = 4) : n_order_(n_order) {
    if (n_order < 1) throw InputError("BLEU order must be >= 1");
  }

  BleuStats stats(std::string_view hypothesis, std::string_view reference) {
    BleuStats s(n_order_);
    add(hypothesis, reference, s);
    return s;
  }

  void add(std::string_view hypothesis, std::string_view reference, BleuStats& into) {
    text::split_into(hypothesis, hyp_);
    text::split_into(reference, ref_);
    into.hyp_len += hyp_.size();
    into.ref_len += ref_.size();
    ++into.sentences;
    if (n_order_ <= 4 && intern()) {
      add_packed(into);
      return;
    }
    for (int n = 1; n <= n_order_; ++n) {
      const auto k = static_cast<std::size_t>(n - 1);
      const std::size_t hn = hyp_.size() >= static_cast<std::size_t>(n) ? hyp_.size() - k : 0;
      const std::size_t rn = ref_.size() >= static_cast<std::size_t>(n) ? ref_.size() - k : 0;
      into.hyp_ngrams[k] += hn;
      into.ref_ngrams[k] += rn;
      if (hn && rn) into.matches[k] += clipped_matches(static_cast<std::size_t>(n), hn, rn);
    }
  }

 private:
  // Maps every token of the pair to a dense id through an open-addressing
  // table that is cleared by bumping a stamp. Fails past 16 bits.
  bool intern() {
    const std::size_t total = hyp_.size() + ref_.size();
    std::size_t cap = 64;
    while (cap < 2 * total) cap <<= 1;
    if (slots_.size() < cap) {
      slots_.assign(cap, Slot{});
      stamp_ = 0;
    }
    const std::size_t mask = slots_.size() - 1;
    if (++stamp_ == 0) {
      std::fill(slots_.begin(), slots_.end(), Slot{});
      stamp_ = 1;
    }
    std::uint64_t next = 0;
    auto lookup = [&](std::string_view w) -> std::uint64_t {
      std::size_t h = std::hash<std::string_view>{}(w) & mask;
      while (slots_[h].stamp == stamp_) {
        if (slots_[h].word == w) return slots_[h].id;
        h = (h + 1) & mask;
      }
      slots_[h] = Slot{w, next, stamp_};
      return next++;
    };
    hyp_ids_.resize(hyp_.size());
    ref_ids_.resize(ref_.size());
    for (std::size_t i = 0; i < hyp_.size(); ++i) hyp_ids_[i] = lookup(hyp_[i]);
    for (std::size_t i = 0; i < ref_.size(); ++i) ref_ids_[i] = lookup(ref_[i]);
    return next <= 0x10000;
  }

  // Order-n keys pack n 16-bit ids; keys grow in place from order n-1.
  void add_packed(BleuStats& into) {
    hyp_keys_ = hyp_ids_;
    ref_keys_ = ref_ids_;
    for (int n = 1; n <= n_order_; ++n) {
      const auto k = static_cast<std::size_t>(n - 1);
      if (n > 1) {
        extend(hyp_keys_, hyp_ids_, k);
        extend(ref_keys_, ref_ids_, k);
      }
      const std::size_t hn = hyp_keys_.size();
      const std::size_t rn = ref_keys_.size();
      into.hyp_ngrams[k] += hn;
      into.ref_ngrams[k] += rn;
      if (!hn || !rn) continue;
      hyp_sorted_.assign(hyp_keys_.begin(), hyp_keys_.end());
      ref_sorted_.assign(ref_keys_.begin(), ref_keys_.end());
      std::sort(hyp_sorted_.begin(), hyp_sorted_.end());
      std::sort(ref_sorted_.begin(), ref_sorted_.end());
      into.matches[k] += merge_count(hyp_sorted_, ref_sorted_);
    }
  }

  static void extend(std::vector<std::uint64_t>& keys, const std::vector<std::uint64_t>& ids, std::size_t k) {
    if (keys.empty()) return;
    keys.pop_back();
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = (keys[i] << 16) | ids[i + k];
  }

  static std::uint64_t merge_count(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::uint64_t matched = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j]) {
        ++i;
      } else if (b[j] < a[i]) {
        ++j;
      } else {
        const std::uint64_t v = a[i];
        const std::size_t i0 = i;
        const std::size_t j0 = j;
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        matched += std::min(i - i0, j - j0);
      }
    }
    return matched;
  }

  // Sorts n-gram start positions of both sides lexicographically and walks
  // the two sorted lists, crediting min(count_hyp, count_ref) per n-gram.
  std::uint64_t clipped_matches(std::size_t n, std::size_t hn, std::size_t rn) {
    auto fill = [](std::vector<std::uint32_t>& idx, std::size_t count) {
      idx.resize(count);
      for (std::size_t i = 0; i < count; ++i) idx[i] = static_cast<std::uint32_t>(i);
    };
    fill(hyp_idx_, hn);
    fill(ref_idx_, rn);
    auto cmp3 = [n](const std::vector<std::string_view>& a, std::uint32_t i,
                    const std::vector<std::string_view>& b, std::uint32_t j) {
      for (std::size_t t = 0; t < n; ++t) {
        const int c = a[i + t].compare(b[j + t]);
        if (c) return c;
      }
      return 0;
    };
    std::sort(hyp_idx_.begin(), hyp_idx_.end(), [&](std::uint32_t i, std::uint32_t j) {
      return cmp3(hyp_, i, hyp_, j) < 0;
    });
    std::sort(ref_idx_.begin(), ref_idx_.end(), [&](std::uint32_t i, std::uint32_t j) {
      return cmp3(ref_, i, ref_, j) < 0;
    });
    std::uint64_t matched = 0;
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < hn && b < rn) {
      const int c = cmp3(hyp_, hyp_idx_[a], ref_, ref_idx_[b]);
      if (c < 0) {
        ++a;
      } else if (c > 0) {
        ++b;
      } else {
        std::size_t a_end = a + 1;
        while (a_end < hn && cmp3(hyp_, hyp_idx_[a], hyp_, hyp_idx_[a_end]) == 0) ++a_end;
        std::size_t b_end = b + 1;
        while (b_end < rn && cmp3(ref_, ref_idx_[b], ref_, ref_idx_[b_end]) == 0) ++b_end;
        matched += std::min(a_end - a, b_end - b);
        a = a_end;
        b = b_end;
      }
    }
    return matched;
  }

  int n_order_;
  std::vector<std::string_view> hyp_;
  std::vector<std::string_view> ref_;
  std::vector<std::uint32_t> hyp_idx_;
  std::vector<std::uint32_t> ref_idx_;
  struct Slot {
    std::string_view word;
    std::uint64_t id = 0;
    std::uint32_t stamp = 0;
  };
  std::vector<Slot> slots_;
  std::uint32_t stamp_ = 0;
  std::vector<std::uint64_t> hyp_ids_;
  std::vector<std::uint64_t> ref_ids_;
  std::vector<std::uint64_t> hyp_keys_;
  std::vector<std::uint64_t> ref_keys_;
  std::vector<std::uint64_t> hyp_sorted_;
  std::vector<std::uint64_t> ref_sorted_;
};

struct BleuScore {
  double score = 0.0;
  double bp = 0.0;
  std::vector<double> precisions;
};

inline BleuScore score_from_stats(const BleuStats& s, Smoothing smoothing = Smoothing::None) {
  BleuScore out;
  const int n_order = s.n_order();
  out.precisions.assign(static_cast<std::size_t>(n_order), 0.0);
  if (s.hyp_len == 0) return out;
  out.bp = s.hyp_len > s.ref_len
               ? 1.0
               : std::exp(1.0 - static_cast<double>(s.ref_len) / static_cast<double>(s.hyp_len));
  double log_sum = 0.0;
  int used = 0;
  bool zero = false;
  for (int n = 1; n <= n_order; ++n) {
    const auto k = static_cast<std::size_t>(n - 1);
    if (s.hyp_ngrams[k] == 0 && s.ref_ngrams[k] == 0) {
      out.precisions[k] = 1.0;
      continue;
    }
    double m = static_cast<double>(s.matches[k]);
    double t = static_cast<double>(s.hyp_ngrams[k]);
    if (smoothing == Smoothing::AddOne && n > 1) {
      m += 1.0;
      t += 1.0;
    }
    const double p = t > 0 ? m / t : 0.0;
    out.precisions[k] = p;
    ++used;
    if (p <= 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  if (zero || used == 0) return out;
  out.score = 100.0 * out.bp * std::exp(log_sum / used);
  return out;
}

struct BucketScore {
  std::string label;
  std::size_t count = 0;
  /// Absent when the bucket holds no sentences.
  std::optional<double> score;
};

struct BleuReport {
  double overall = 0.0;
  std::size_t count = 0;
  int n_order = 4;
  double bp = 0.0;
  std::vector<double> precisions;
  /// Empty for plain corpus_bleu.
  std::vector<BucketScore> per_bucket;
  /// Sentences beyond the last bounded bucket (counted only in overall).
  std::size_t uncovered = 0;
  std::string buckets;

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& b : per_bucket) out.push_back(b.label);
    return out;
  }
};

namespace detail {

template <typename Text>
std::string_view raw_view(const Text& t) {
  if constexpr (std::is_same_v<Text, Sentence>) {
    return t.raw();
  } else {
    return std::string_view(t);
  }
}

}  // namespace detail

/// Corpus BLEU on a 0-100 scale. `Text` is Sentence or anything convertible
/// to std::string_view.
template <typename Text>
BleuReport corpus_bleu(std::span<const Text> hypotheses, std::span<const Text> references,
                       const BleuOptions& options = {}) {
  if (hypotheses.size() != references.size()) {
    throw InputError("hypothesis/reference count mismatch " + std::to_string(hypotheses.size()) +
                     " vs " + std::to_string(references.size()));
  }
  if (hypotheses.empty()) throw InputError("BLEU of an empty corpus");
  NgramMatcher matcher(options.n_order);
  BleuStats stats(options.n_order);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    matcher.add(detail::raw_view(hypotheses[i]), detail::raw_view(references[i]), stats);
  }
  const BleuScore s = score_from_stats(stats, options.smoothing);
  BleuReport r;
  r.overall = s.score;
  r.count = hypotheses.size();
  r.n_order = options.n_order;
  r.bp = s.bp;
  r.precisions = s.precisions;
  return r;
}

template <typename Text>
BleuReport corpus_bleu(const std::vector<Text>& hypotheses, const std::vector<Text>& references,
                       const BleuOptions& options = {}) {
  return corpus_bleu(std::span<const Text>(hypotheses), std::span<const Text>(references), options);
}

/// BLEU overall and within each source-length bucket. Every bucket is
/// scored from its own summed statistics; empty buckets have no score.
template <typename Text>
BleuReport bucketed_bleu(std::span<const Text> hypotheses, std::span<const Text> references,
                         std::span<const Text> sources, const BucketSpec& buckets,
                         const BleuOptions& options = {}) {
  if (hypotheses.size() != references.size() || hypotheses.size() != sources.size()) {
    throw InputError("hypothesis/reference/source count mismatch " +
                     std::to_string(hypotheses.size()) + " / " + std::to_string(references.size()) +
                     " / " + std::to_string(sources.size()));
  }
  if (hypotheses.empty()) throw InputError("BLEU of an empty corpus");
  NgramMatcher matcher(options.n_order);
  BleuStats total(options.n_order);
  std::vector<BleuStats> per(buckets.size(), BleuStats(options.n_order));
  BleuReport r;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    BleuStats one(options.n_order);
    matcher.add(detail::raw_view(hypotheses[i]), detail::raw_view(references[i]), one);
    total += one;
    const auto b = buckets.bucket_of(text::count_tokens(detail::raw_view(sources[i])));
    if (b) {
      per[*b] += one;
    } else {
      ++r.uncovered;
    }
  }
  const BleuScore s = score_from_stats(total, options.smoothing);
  r.overall = s.score;
  r.count = hypotheses.size();
  r.n_order = options.n_order;
  r.bp = s.bp;
  r.precisions = s.precisions;
  r.buckets = buckets.to_string();
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    BucketScore bs{buckets.labels()[b], per[b].sentences, std::nullopt};
    if (per[b].sentences) bs.score = score_from_stats(per[b], options.smoothing).score;
    r.per_bucket.push_back(std::move(bs));
  }
  return r;
}

template <typename Text>
BleuReport bucketed_bleu(const std::vector<Text>& hypotheses, const std::vector<Text>& references,
                         const std::vector<Text>& sources, const BucketSpec& buckets,
                         const BleuOptions& options = {}) {
  return bucketed_bleu(std::span<const Text>(hypotheses), std::span<const Text>(references),
                       std::span<const Text>(sources), buckets, options);
}

namespace detail {

inline void require_same_buckets(const BleuReport& a, const BleuReport& b, bool counts) {
  if (a.labels() != b.labels()) throw InputError("reports use different length buckets");
  if (!counts) return;
  if (a.count != b.count) throw InputError("reports cover different sentence counts");
  for (std::size_t i = 0; i < a.per_bucket.size(); ++i) {
    if (a.per_bucket[i].count != b.per_bucket[i].count) {
      throw InputError("reports disagree on the count of bucket " + a.per_bucket[i].label);
    }
  }
}

}  // namespace detail

/// Arithmetic mean of several runs over the same test set.
inline BleuReport average_runs(std::span<const BleuReport> reports) {
  if (reports.empty()) throw InputError("no reports to average");
  BleuReport out = reports.front();
  for (const auto& r : reports.subspan(1)) {
    detail::require_same_buckets(out, r, true);
    if (r.precisions.size() != out.precisions.size()) {
      throw InputError("reports use different n-gram orders");
    }
  }
  const auto k = static_cast<double>(reports.size());
  auto mean = [&](auto get) {
    double sum = 0.0;
    for (const auto& r : reports) sum += get(r);
    return sum / k;
  };
  out.overall = mean([](const BleuReport& r) { return r.overall; });
  out.bp = mean([](const BleuReport& r) { return r.bp; });
  for (std::size_t i = 0; i < out.precisions.size(); ++i) {
    out.precisions[i] = mean([i](const BleuReport& r) { return r.precisions[i]; });
  }
  for (std::size_t b = 0; b < out.per_bucket.size(); ++b) {
    if (!out.per_bucket[b].score) continue;
    out.per_bucket[b].score = mean([b](const BleuReport& r) {
      if (!r.per_bucket[b].score) throw InputError("bucket score present in some runs only");
      return *r.per_bucket[b].score;
    });
  }
  return out;
}

inline BleuReport average_runs(const std::vector<BleuReport>& reports) {
  return average_runs(std::span<const BleuReport>(reports));
}

struct BucketDiff {
  double overall = 0.0;
  std::vector<std::string> labels;
  std::vector<std::optional<double>> per_bucket;
};

/// a - b, overall and per bucket; absent on either side stays absent.
inline BucketDiff diff_by_bucket(const BleuReport& a, const BleuReport& b) {
  detail::require_same_buckets(a, b, false);
  BucketDiff d;
  d.overall = a.overall - b.overall;
  for (std::size_t i = 0; i < a.per_bucket.size(); ++i) {
    d.labels.push_back(a.per_bucket[i].label);
    const auto& x = a.per_bucket[i].score;
    const auto& y = b.per_bucket[i].score;
    d.per_bucket.push_back(x && y ? std::optional<double>(*x - *y) : std::nullopt);
  }
  return d;
}

// CSV form:
//   # key=value            metadata lines
//   bucket,count,score
//   all,<n>,<overall>
//   <label>,<count>,<score or empty>
inline std::string report_to_csv(const BleuReport& r, const KeyValues& metadata = {}) {
  std::string out;
  auto meta = [&out](const std::string& k, const std::string& v) {
    out += "# " + k + "=" + v + "\n";
  };
  meta("n_order", std::to_string(r.n_order));
  meta("bp", text::format_full(r.bp));
  std::string p;
  for (std::size_t i = 0; i < r.precisions.size(); ++i) {
    if (i) p += ';';
    p += text::format_full(r.precisions[i]);
  }
  meta("precisions", p);
  if (!r.buckets.empty()) meta("buckets", r.buckets);
  meta("uncovered", std::to_string(r.uncovered));
  for (const auto& [k, v] : metadata.entries()) meta(k, v);
  out += "bucket,count,score\n";
  out += "all," + std::to_string(r.count) + "," + text::format_full(r.overall) + "\n";
  for (const auto& b : r.per_bucket) {
    out += b.label + "," + std::to_string(b.count) + "," +
           (b.score ? text::format_full(*b.score) : std::string()) + "\n";
  }
  return out;
}

/// Parses report_to_csv output; metadata lines are returned through `meta`.
inline BleuReport report_from_csv(std::string_view csv, KeyValues* meta = nullptr) {
  BleuReport r;
  r.precisions.clear();
  bool header = false;
  bool have_all = false;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_on(csv, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = text::trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string key(text::trim(body.substr(0, eq)));
      const std::string value(text::trim(body.substr(eq + 1)));
      if (key == "n_order") {
        r.n_order = text::parse_number<int>(value, "n_order");
      } else if (key == "bp") {
        r.bp = text::parse_number<double>(value, "bp");
      } else if (key == "precisions") {
        for (const auto& v : text::split_on(value, ';')) {
          if (!text::trim(v).empty()) r.precisions.push_back(text::parse_number<double>(v, "precision"));
        }
      } else if (key == "buckets") {
        r.buckets = value;
      } else if (key == "uncovered") {
        r.uncovered = text::parse_number<std::size_t>(value, "uncovered");
      } else if (meta) {
        meta->set(key, value);
      }
      continue;
    }
    const auto cells = text::split_on(line, ',');
    if (!header) {
      if (cells.size() != 3 || cells[0] != "bucket" || cells[1] != "count" || cells[2] != "score") {
        throw InputError("report CSV line " + std::to_string(line_no) +
                         ": expected header bucket,count,score");
      }
      header = true;
      continue;
    }
    if (cells.size() != 3) {
      throw InputError("report CSV line " + std::to_string(line_no) + ": expected 3 columns");
    }
    const auto count = text::parse_number<std::size_t>(cells[1], "count");
    std::optional<double> score;
    if (!text::trim(cells[2]).empty()) score = text::parse_number<double>(cells[2], "score");
    if (cells[0] == "all") {
      if (!score) throw InputError("report CSV: overall score missing");
      r.overall = *score;
      r.count = count;
      have_all = true;
    } else {
      r.per_bucket.push_back({cells[0], count, score});
    }
  }
  if (!have_all) throw InputError("report CSV has no 'all' row");
  return r;
}

}  // namespace concatmt
