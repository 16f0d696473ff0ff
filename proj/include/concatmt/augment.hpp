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

// Sentence-concatenation augmentation: two pairs drawn from one pool are
// joined side by side with a separator token, and joins that are still too
// short are rejected and redrawn.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "concatmt/corpus.hpp"
#include "concatmt/error.hpp"
#include "concatmt/kv.hpp"
#include "concatmt/rng.hpp"

namespace concatmt {

struct AugmentConfig {
  std::uint64_t seed = 0;
  std::string sep_token = std::string(kDefaultSeparator);
  /// Joins measuring fewer words than this are rejected.
  std::size_t min_concat_len = 25;
  std::size_t target_count = 0;
  LengthSide length_side = LengthSide::Source;
  bool count_sep_in_length = false;
  /// Draw budget is max_attempts_factor * target_count.
  std::size_t max_attempts_factor = 100;

  void validate() const {
    Corpus::check_separator(sep_token);
    if (max_attempts_factor == 0) throw InputError("max_attempts_factor must be positive");
  }
};

/// Outcome bookkeeping recorded in the sidecar.
struct AugmentStats {
  std::size_t draws = 0;
  std::size_t rejected = 0;
};

namespace detail {

inline SentencePair join_pair(const SentencePair& a, const SentencePair& b, std::string_view sep) {
  return SentencePair{0, Sentence::joined(a.source, sep, b.source),
                      Sentence::joined(a.target, sep, b.target), Origin::Concatenated};
}

}  // namespace detail

/// Joins a and b on both sides with `sep` between them.
inline SentencePair concat_pair(const SentencePair& a, const SentencePair& b, std::string_view sep) {
  Corpus::check_separator(sep);
  for (const SentencePair* p : {&a, &b}) {
    if (p->origin == Origin::Concatenated) {
      throw DomainError("pair " + std::to_string(p->id) + " is already concatenated");
    }
    if (p->source.count(sep) || p->target.count(sep)) {
      throw DomainError("pair " + std::to_string(p->id) + " contains the separator token");
    }
  }
  return detail::join_pair(a, b, sep);
}

/// Draws `config.target_count` ordered pairs of distinct pool entries
/// uniformly at random, keeping only joins that meet the length threshold.
/// The pool must be homogeneous: all Original, all PseudoBT or all PseudoST.
inline Corpus concat_augment(const Corpus& pool, const AugmentConfig& config,
                             AugmentStats* stats = nullptr,
                             std::uint64_t stream = streams::kConcat) {
  config.validate();
  const std::size_t n = pool.size();
  if (n < 2) {
    throw DomainError("concatenation pool needs at least 2 pairs, got " + std::to_string(n));
  }
  const auto origin = pool.uniform_origin();
  if (!origin) {
    throw DomainError("concatenation pool mixes origins; concatenate each pool separately");
  }
  if (*origin == Origin::Concatenated) {
    throw DomainError("concatenation pool already holds concatenated pairs");
  }

  // Pool pairs carry no separator, so a join measures len(a) + len(b) (+1).
  const std::size_t sep_words = config.count_sep_in_length ? 1 : 0;
  std::vector<std::uint32_t> lengths(n);
  std::size_t longest = 0;
  std::size_t second = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = pool[i].side(config.length_side);
    if (config.sep_token != pool.separator() &&
        (pool[i].source.count(config.sep_token) > 0 || pool[i].target.count(config.sep_token) > 0)) {
      throw DomainError("pool pair " + std::to_string(i) + " contains the separator token");
    }
    lengths[i] = static_cast<std::uint32_t>(s.length());
    if (s.length() > longest) {
      second = longest;
      longest = s.length();
    } else if (s.length() > second) {
      second = s.length();
    }
  }

  Corpus out = pool.empty_like(pool.name() + ".concat");
  if (out.separator() != config.sep_token) {
    out = Corpus(pool.name() + ".concat", config.sep_token);
    out.set_languages(pool.source_lang(), pool.target_lang());
  }
  if (config.target_count == 0) return out;
  if (longest + second + sep_words < config.min_concat_len) {
    throw DomainError("length threshold unreachable: longest possible join has " +
                      std::to_string(longest + second + sep_words) + " words < " +
                      std::to_string(config.min_concat_len));
  }

  out.reserve(config.target_count);
  Rng rng(config.seed, stream);
  const std::size_t budget = config.max_attempts_factor * config.target_count;
  AugmentStats local;
  while (out.size() < config.target_count) {
    if (local.draws == budget) {
      throw DomainError("produced only " + std::to_string(out.size()) + " of " +
                        std::to_string(config.target_count) + " joins within " +
                        std::to_string(budget) + " draws; pool sentences too short for " +
                        std::to_string(config.min_concat_len) + " words");
    }
    ++local.draws;
    const auto i = static_cast<std::size_t>(rng.below(n));
    auto j = static_cast<std::size_t>(rng.below(n - 1));
    if (j >= i) ++j;
    if (lengths[i] + lengths[j] + sep_words < config.min_concat_len) {
      ++local.rejected;
      continue;
    }
    SentencePair joined = detail::join_pair(pool[i], pool[j], config.sep_token);
    out.add(std::move(joined.source), std::move(joined.target), Origin::Concatenated);
  }
  if (stats) *stats = local;
  return out;
}

/// Mean source length in words; the separator is skipped unless counted.
inline double measure_concat_mean(const Corpus& corpus, bool count_sep_in_length = false,
                                  LengthSide side = LengthSide::Source) {
  if (corpus.empty()) throw DomainError("mean length of an empty corpus");
  std::uint64_t total = 0;
  for (const auto& p : corpus) {
    total += measured_length(p, side, count_sep_in_length, corpus.separator());
  }
  return static_cast<double>(total) / static_cast<double>(corpus.size());
}

inline KeyValues augment_metadata(const Corpus& out, const AugmentConfig& config,
                                  const AugmentStats& stats) {
  KeyValues kv = corpus_metadata(out);
  kv.set("seed", config.seed);
  kv.set("sep_token", config.sep_token);
  kv.set("min_concat_len", config.min_concat_len);
  kv.set("target_count", config.target_count);
  kv.set("length_side", std::string(to_string(config.length_side)));
  kv.set("count_sep_in_length", config.count_sep_in_length);
  kv.set("max_attempts_factor", config.max_attempts_factor);
  kv.set("draws", stats.draws);
  kv.set("rejections", stats.rejected);
  return kv;
}

}  // namespace concatmt
