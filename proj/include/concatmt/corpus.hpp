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

// Parallel corpora stored as two line-aligned UTF-8 text files.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "concatmt/buckets.hpp"
#include "concatmt/error.hpp"
#include "concatmt/kv.hpp"
#include "concatmt/rng.hpp"
#include "concatmt/text.hpp"

namespace concatmt {

inline constexpr std::string_view kDefaultSeparator = "<sep>";

enum class Origin : std::uint8_t { Original, PseudoBT, PseudoST, Concatenated };

inline constexpr std::array<Origin, 4> kAllOrigins = {Origin::Original, Origin::PseudoBT,
                                                      Origin::PseudoST, Origin::Concatenated};

inline std::string_view to_string(Origin o) noexcept {
  switch (o) {
    case Origin::Original:
      return "original";
    case Origin::PseudoBT:
      return "pseudo-bt";
    case Origin::PseudoST:
      return "pseudo-st";
    case Origin::Concatenated:
      return "concatenated";
  }
  return "unknown";
}

inline Origin parse_origin(std::string_view s) {
  s = text::trim(s);
  for (Origin o : kAllOrigins) {
    if (to_string(o) == s) return o;
  }
  if (s == "bt") return Origin::PseudoBT;
  if (s == "st") return Origin::PseudoST;
  throw InputError("unknown origin '" + std::string(s) + "'");
}

/// Which side of a pair word lengths are measured on.
enum class LengthSide : std::uint8_t { Source, Target };

inline std::string_view to_string(LengthSide s) noexcept {
  return s == LengthSide::Source ? "source" : "target";
}

inline LengthSide parse_length_side(std::string_view s) {
  s = text::trim(s);
  if (s == "source") return LengthSide::Source;
  if (s == "target") return LengthSide::Target;
  throw InputError("length side must be 'source' or 'target', got '" + std::string(s) + "'");
}

/// One line of text. A word is a maximal run of non-whitespace characters;
/// the length is the number of such words.
class Sentence {
 public:
  Sentence() = default;

  explicit Sentence(std::string raw) : raw_(std::move(raw)) {
    if (raw_.find('\n') != std::string::npos) throw InputError("sentence contains a newline");
    length_ = static_cast<std::uint32_t>(text::count_tokens(raw_));
  }

  /// "x sep y"; `sep` must be a single whitespace-free token.
  static Sentence joined(const Sentence& x, std::string_view sep, const Sentence& y) {
    Sentence s;
    s.raw_.reserve(x.raw_.size() + sep.size() + y.raw_.size() + 2);
    s.raw_ += x.raw_;
    s.raw_ += ' ';
    s.raw_ += sep;
    s.raw_ += ' ';
    s.raw_ += y.raw_;
    s.length_ = x.length_ + 1 + y.length_;
    return s;
  }

  const std::string& raw() const noexcept { return raw_; }
  std::size_t length() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }

  /// Views into raw(); valid while this Sentence is alive and unmodified.
  std::vector<std::string_view> tokens() const { return text::split(raw_); }

  std::size_t count(std::string_view token) const noexcept {
    return text::count_token(raw_, token);
  }

  friend bool operator==(const Sentence& a, const Sentence& b) noexcept {
    return a.raw_ == b.raw_;
  }

 private:
  std::string raw_;
  std::uint32_t length_ = 0;
};

struct SentencePair {
  std::size_t id = 0;
  Sentence source;
  Sentence target;
  Origin origin = Origin::Original;

  const Sentence& side(LengthSide s) const noexcept {
    return s == LengthSide::Source ? source : target;
  }

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

/// Ordered collection of sentence pairs. Ids are always 0..size()-1 in
/// order; both sides are non-empty; a Concatenated pair carries exactly one
/// separator per side and every other pair carries none.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string name, std::string separator = std::string(kDefaultSeparator))
      : name_(std::move(name)), separator_(std::move(separator)) {
    check_separator(separator_);
  }

  static void check_separator(std::string_view sep) {
    if (sep.empty() || text::count_tokens(sep) != 1 || sep.size() != text::trim(sep).size()) {
      throw InputError("separator must be a single non-empty whitespace-free token");
    }
  }

  void add(Sentence source, Sentence target, Origin origin) {
    const std::size_t line = pairs_.size() + 1;
    if (source.empty()) throw InputError("empty source sentence at line " + std::to_string(line));
    if (target.empty()) throw InputError("empty target sentence at line " + std::to_string(line));
    const std::size_t want = origin == Origin::Concatenated ? 1 : 0;
    if (source.count(separator_) != want || target.count(separator_) != want) {
      throw InputError("line " + std::to_string(line) + ": " + std::string(to_string(origin)) +
                       " pair must contain " + std::to_string(want) + " '" + separator_ +
                       "' token(s) per side");
    }
    pairs_.push_back(SentencePair{pairs_.size(), std::move(source), std::move(target), origin});
  }

  void add(std::string source, std::string target, Origin origin) {
    add(Sentence(std::move(source)), Sentence(std::move(target)), origin);
  }

  void reserve(std::size_t n) { pairs_.reserve(n); }

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  const std::vector<SentencePair>& pairs() const noexcept { return pairs_; }
  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  const std::string& separator() const noexcept { return separator_; }
  const std::string& source_lang() const noexcept { return source_lang_; }
  const std::string& target_lang() const noexcept { return target_lang_; }
  void set_languages(std::string source, std::string target) {
    source_lang_ = std::move(source);
    target_lang_ = std::move(target);
  }

  /// A corpus with the same metadata and no pairs.
  Corpus empty_like(std::string name) const {
    Corpus c(std::move(name), separator_);
    c.set_languages(source_lang_, target_lang_);
    return c;
  }

  /// Origin shared by every pair, or nullopt for empty or mixed corpora.
  std::optional<Origin> uniform_origin() const noexcept {
    if (pairs_.empty()) return std::nullopt;
    const Origin o = pairs_.front().origin;
    for (const auto& p : pairs_) {
      if (p.origin != o) return std::nullopt;
    }
    return o;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::string name_;
  std::string separator_ = std::string(kDefaultSeparator);
  std::string source_lang_;
  std::string target_lang_;
  std::vector<SentencePair> pairs_;
};

struct LoadOptions {
  std::string name;
  std::string separator = std::string(kDefaultSeparator);
  std::string source_lang;
  std::string target_lang;
};

namespace detail {

inline std::size_t count_remaining_lines(std::ifstream& in) {
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

inline void check_line(const std::string& line, const std::filesystem::path& path,
                       std::size_t line_no) {
  if (!text::valid_utf8(line)) {
    throw InputError(path.string() + ":" + std::to_string(line_no) + ": invalid UTF-8");
  }
  if (text::count_tokens(line) == 0) {
    throw InputError(path.string() + ":" + std::to_string(line_no) + ": empty sentence at line " +
                     std::to_string(line_no));
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Streams two line-aligned files into a corpus whose pairs all carry
/// `origin`, or per-line origins from `origin_tags` when given.
inline Corpus load_parallel(const std::filesystem::path& source_path,
                            const std::filesystem::path& target_path, Origin origin,
                            const LoadOptions& options = {},
                            const std::optional<std::filesystem::path>& origin_tags = std::nullopt) {
  auto src = detail::open_input(source_path);
  auto tgt = detail::open_input(target_path);
  std::optional<std::ifstream> tags;
  if (origin_tags) tags = detail::open_input(*origin_tags);

  Corpus corpus(options.name.empty() ? source_path.stem().string() : options.name,
                options.separator);
  corpus.set_languages(options.source_lang, options.target_lang);

  std::string s;
  std::string t;
  std::string tag;
  std::size_t line_no = 0;
  while (true) {
    const bool have_s = static_cast<bool>(std::getline(src, s));
    const bool have_t = static_cast<bool>(std::getline(tgt, t));
    if (!have_s && !have_t) break;
    if (have_s != have_t) {
      const std::size_t src_lines = line_no + (have_s ? 1 + detail::count_remaining_lines(src) : 0);
      const std::size_t tgt_lines = line_no + (have_t ? 1 + detail::count_remaining_lines(tgt) : 0);
      throw InputError("line-count mismatch " + std::to_string(src_lines) + " vs " +
                       std::to_string(tgt_lines) + " (" + source_path.string() + ", " +
                       target_path.string() + ")");
    }
    ++line_no;
    detail::check_line(s, source_path, line_no);
    detail::check_line(t, target_path, line_no);
    Origin o = origin;
    if (tags) {
      if (!std::getline(*tags, tag)) {
        throw InputError(origin_tags->string() + ": fewer origin tags than sentence pairs");
      }
      o = parse_origin(tag);
    }
    try {
      corpus.add(Sentence(std::move(s)), Sentence(std::move(t)), o);
    } catch (const InputError& e) {
      throw InputError(source_path.string() + ": " + e.what());
    }
  }
  if (tags && std::getline(*tags, tag)) {
    throw InputError(origin_tags->string() + ": more origin tags than sentence pairs");
  }
  return corpus;
}

/// Writes source and target sides, one sentence per line with LF endings.
/// Returns fingerprints (source, target) of the bytes written.
inline std::pair<std::string, std::string> write_parallel(
    const Corpus& corpus, const std::filesystem::path& source_path,
    const std::filesystem::path& target_path) {
  std::ofstream src(source_path, std::ios::binary | std::ios::trunc);
  std::ofstream tgt(target_path, std::ios::binary | std::ios::trunc);
  if (!src || !tgt) throw Error("cannot write " + source_path.string() + " / " + target_path.string());
  text::Fnv1a hs;
  text::Fnv1a ht;
  for (const auto& p : corpus) {
    src << p.source.raw() << '\n';
    tgt << p.target.raw() << '\n';
    hs.update(p.source.raw());
    hs.update("\n");
    ht.update(p.target.raw());
    ht.update("\n");
  }
  if (!src || !tgt) throw Error("write failed: " + source_path.string());
  return {hs.hex(), ht.hex()};
}

inline void write_origin_tags(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& p : corpus) out << to_string(p.origin) << '\n';
}

/// Sidecar fields describing a corpus; callers append seeds and parameters.
inline KeyValues corpus_metadata(const Corpus& corpus) {
  KeyValues kv;
  kv.set("name", corpus.name());
  kv.set("size", corpus.size());
  const auto o = corpus.uniform_origin();
  kv.set("origin", o ? std::string(to_string(*o)) : std::string(corpus.empty() ? "none" : "mixed"));
  kv.set("separator", corpus.separator());
  if (!corpus.source_lang().empty()) kv.set("source_lang", corpus.source_lang());
  if (!corpus.target_lang().empty()) kv.set("target_lang", corpus.target_lang());
  kv.set("prng", std::string(Rng::kAlgorithm));
  return kv;
}

/// Length of one side in words; the separator is dropped unless counted.
inline std::size_t measured_length(const SentencePair& p, LengthSide side, bool count_separator,
                                   std::string_view separator) {
  const Sentence& s = p.side(side);
  if (count_separator || p.origin != Origin::Concatenated) return s.length();
  return s.length() - s.count(separator);
}

struct LengthStats {
  std::size_t count = 0;
  double mean_length = 0.0;
  std::vector<std::string> labels;
  std::vector<std::size_t> histogram;
  /// Sentences longer than the last bounded bucket.
  std::size_t uncovered = 0;
};

/// Mean and bucket histogram of word lengths. The separator counts as a word
/// unless `count_separator` is false.
inline LengthStats length_stats(const Corpus& corpus, const BucketSpec& buckets,
                                LengthSide side = LengthSide::Source, bool count_separator = true) {
  if (corpus.empty()) throw DomainError("length statistics of an empty corpus");
  LengthStats stats;
  stats.count = corpus.size();
  stats.labels = buckets.labels();
  stats.histogram.assign(buckets.size(), 0);
  std::uint64_t total = 0;
  for (const auto& p : corpus) {
    const std::size_t len = measured_length(p, side, count_separator, corpus.separator());
    total += len;
    if (const auto b = buckets.bucket_of(len)) {
      ++stats.histogram[*b];
    } else {
      ++stats.uncovered;
    }
  }
  stats.mean_length = static_cast<double>(total) / static_cast<double>(corpus.size());
  return stats;
}

/// Sorted indices of a uniform n-of-N selection (selection sampling).
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                               std::uint64_t seed) {
  if (n > population) {
    throw DomainError("cannot sample " + std::to_string(n) + " pairs from a corpus of " +
                      std::to_string(population));
  }
  Rng rng(seed, streams::kSample);
  std::vector<std::size_t> picked;
  picked.reserve(n);
  std::size_t needed = n;
  for (std::size_t i = 0; i < population && needed > 0; ++i) {
    if (rng.below(population - i) < needed) {
      picked.push_back(i);
      --needed;
    }
  }
  return picked;
}

inline Corpus select(const Corpus& corpus, const std::vector<std::size_t>& indices,
                     std::string name) {
  Corpus out = corpus.empty_like(std::move(name));
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto& p = corpus[i];
    out.add(p.source, p.target, p.origin);
  }
  return out;
}

/// Uniform sample without replacement keeping the input order.
inline Corpus sample(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  return select(corpus, sample_indices(corpus.size(), n, seed), corpus.name() + ".sample");
}

/// Disjoint (train, test) index sets, each sorted ascending.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_indices(
    std::size_t population, std::size_t train_n, std::size_t test_n, std::uint64_t seed) {
  if (train_n > population || test_n > population - train_n) {
    throw DomainError("holdout split of " + std::to_string(train_n) + " + " +
                      std::to_string(test_n) + " exceeds corpus size " + std::to_string(population));
  }
  std::vector<std::size_t> perm(population);
  for (std::size_t i = 0; i < population; ++i) perm[i] = i;
  Rng rng(seed, streams::kSplit);
  const std::size_t take = train_n + test_n;
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_n));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(train_n),
                                perm.begin() + static_cast<std::ptrdiff_t>(take));
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

/// Training sample plus a disjoint held-out pseudo-test set.
inline std::pair<Corpus, Corpus> holdout_split(const Corpus& corpus, std::size_t train_n,
                                               std::size_t test_n, std::uint64_t seed) {
  auto [train, test] = holdout_indices(corpus.size(), train_n, test_n, seed);
  return {select(corpus, train, corpus.name() + ".train"),
          select(corpus, test, corpus.name() + ".test")};
}

/// A problem found while scanning corpus files, 1-based line, 0 if file-wide.
struct Violation {
  std::string file;
  std::size_t line = 0;
  std::string message;

  std::string to_string() const {
    return line ? file + ":" + std::to_string(line) + ": " + message : file + ": " + message;
  }
};

/// Checks a pair of raw corpus files without stopping at the first problem.
/// Reports at most `limit` line-level violations per file.
inline std::vector<Violation> scan_parallel(const std::filesystem::path& source_path,
                                            const std::filesystem::path& target_path,
                                            std::string_view separator,
                                            std::size_t limit = 100) {
  std::vector<Violation> out;
  auto scan = [&](const std::filesystem::path& path) -> std::optional<std::size_t> {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      out.push_back({path.string(), 0, "cannot open file"});
      return std::nullopt;
    }
    std::size_t line_no = 0;
    std::size_t reported = 0;
    std::string line;
    auto report = [&](std::string msg) {
      if (reported++ < limit) out.push_back({path.string(), line_no, std::move(msg)});
    };
    while (std::getline(in, line)) {
      ++line_no;
      if (!text::valid_utf8(line)) {
        report("invalid UTF-8");
        continue;
      }
      if (text::count_tokens(line) == 0) report("empty sentence");
      if (text::count_token(line, separator) > 0) {
        report("contains reserved separator token '" + std::string(separator) + "'");
      }
    }
    return line_no;
  };
  const auto ns = scan(source_path);
  const auto nt = scan(target_path);
  if (ns && nt && *ns != *nt) {
    out.push_back({source_path.string(), 0,
                   "line-count mismatch " + std::to_string(*ns) + " vs " + std::to_string(*nt) +
                       " (" + target_path.string() + ")"});
  }
  return out;
}

}  // namespace concatmt
