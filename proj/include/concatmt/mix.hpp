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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "concatmt/augment.hpp"
#include "concatmt/corpus.hpp"
#include "concatmt/error.hpp"
#include "concatmt/kv.hpp"
#include "concatmt/rng.hpp"
#include "concatmt/translate.hpp"

namespace concatmt {

enum class Recipe : std::uint8_t { Vanilla, VanillaConcat, VanillaST, VanillaBT, VanillaBTConcat };

inline constexpr std::array<Recipe, 5> kAllRecipes = {Recipe::Vanilla, Recipe::VanillaConcat,
                                                      Recipe::VanillaST, Recipe::VanillaBT,
                                                      Recipe::VanillaBTConcat};

inline std::string_view to_string(Recipe r) noexcept {
  switch (r) {
    case Recipe::Vanilla:
      return "vanilla";
    case Recipe::VanillaConcat:
      return "vanilla+concat";
    case Recipe::VanillaST:
      return "vanilla+ST";
    case Recipe::VanillaBT:
      return "vanilla+BT";
    case Recipe::VanillaBTConcat:
      return "vanilla+BT+concat";
  }
  return "unknown";
}

inline Recipe parse_recipe(std::string_view s) {
  s = text::trim(s);
  for (Recipe r : kAllRecipes) {
    if (to_string(r) == s) return r;
  }
  throw InputError("unknown recipe '" + std::string(s) +
                   "' (expected vanilla, vanilla+concat, vanilla+ST, vanilla+BT, vanilla+BT+concat)");
}

inline bool needs_backward(Recipe r) noexcept {
  return r == Recipe::VanillaBT || r == Recipe::VanillaBTConcat;
}
inline bool needs_forward(Recipe r) noexcept { return r == Recipe::VanillaST; }

struct MixRecipe {
  Recipe name = Recipe::Vanilla;
  std::size_t base_size = 0;
  /// Seed of the final training-order shuffle.
  std::uint64_t seed = 0;
  bool shuffle_output = true;
};

/// Translators available to build_mix, plus a scratch directory for their
/// input and output files.
struct TranslatorSet {
  std::optional<TranslatorSpec> forward;
  std::optional<TranslatorSpec> backward;
  std::filesystem::path work_dir = std::filesystem::temp_directory_path() / "concatmt-mix";
};

/// Per-component record kept alongside a built mix.
struct MixComponent {
  std::string name;
  Origin origin = Origin::Original;
  std::size_t size = 0;
  std::optional<AugmentStats> augment;
};

struct MixLog {
  std::vector<MixComponent> components;
};

/// Assembles one training configuration from N original pairs:
///   vanilla            N original
///   vanilla+concat     N original + N concat(original)
///   vanilla+ST         N original + N self-trained
///   vanilla+BT         N original + N back-translated
///   vanilla+BT+concat  N original + N back-translated
///                      + N concat(original) + N concat(back-translated)
/// Components are appended in that order, then optionally shuffled.
/// `concat.target_count` is ignored; each concat component gets N pairs.
inline Corpus build_mix(const MixRecipe& recipe, const Corpus& original,
                        const TranslatorSet& translators, const AugmentConfig& concat = {},
                        MixLog* log = nullptr) {
  if (recipe.base_size < 2) throw InputError("mix base size must be at least 2");
  if (original.size() != recipe.base_size) {
    throw InputError("mix base size " + std::to_string(recipe.base_size) +
                     " does not match corpus size " + std::to_string(original.size()));
  }
  if (original.uniform_origin() != Origin::Original) {
    throw InputError("mix input must consist of original pairs");
  }
  if (needs_backward(recipe.name) && !translators.backward) {
    throw InputError(std::string(to_string(recipe.name)) + " needs a backward translator");
  }
  if (needs_forward(recipe.name) && !translators.forward) {
    throw InputError(std::string(to_string(recipe.name)) + " needs a forward translator");
  }

  const std::size_t n = recipe.base_size;
  AugmentConfig cfg = concat;
  cfg.target_count = n;

  MixLog local;
  std::vector<Corpus> parts;
  parts.push_back(original);
  local.components.push_back({"original", Origin::Original, n, std::nullopt});

  std::optional<Corpus> pseudo;
  if (recipe.name == Recipe::VanillaST) {
    pseudo = self_train(original, *translators.forward, translators.work_dir);
  } else if (needs_backward(recipe.name)) {
    pseudo = back_translate(original, *translators.backward, translators.work_dir);
  }
  if (pseudo) {
    local.components.push_back({recipe.name == Recipe::VanillaST ? "self-train" : "back-translate",
                                *pseudo->uniform_origin(), pseudo->size(), std::nullopt});
    parts.push_back(*pseudo);
  }
  if (recipe.name == Recipe::VanillaConcat || recipe.name == Recipe::VanillaBTConcat) {
    AugmentStats stats;
    parts.push_back(concat_augment(original, cfg, &stats, streams::kConcat));
    local.components.push_back({"concat-original", Origin::Concatenated, n, stats});
  }
  if (recipe.name == Recipe::VanillaBTConcat) {
    AugmentStats stats;
    parts.push_back(concat_augment(*pseudo, cfg, &stats, streams::kConcatPseudo));
    local.components.push_back({"concat-back-translate", Origin::Concatenated, n, stats});
  }

  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<const SentencePair*> order;
  order.reserve(total);
  for (const auto& p : parts) {
    for (const auto& pair : p) order.push_back(&pair);
  }
  if (recipe.shuffle_output) {
    Rng rng(recipe.seed, streams::kShuffle);
    rng.shuffle(std::span<const SentencePair*>(order));
  }

  Corpus mix(std::string(to_string(recipe.name)), cfg.sep_token);
  mix.set_languages(original.source_lang(), original.target_lang());
  mix.reserve(total);
  for (const SentencePair* p : order) mix.add(p->source, p->target, p->origin);
  if (log) *log = std::move(local);
  return mix;
}

struct OriginSummary {
  std::size_t count = 0;
  double mean_source_length = 0.0;
  double mean_target_length = 0.0;
};

/// Composition of a (possibly mixed) corpus.
struct MixManifest {
  std::size_t total = 0;
  std::size_t separator_pairs = 0;
  /// Separator excluded from lengths.
  double mean_source_length = 0.0;
  std::map<Origin, OriginSummary> by_origin;

  std::size_t count(Origin o) const {
    const auto it = by_origin.find(o);
    return it == by_origin.end() ? 0 : it->second.count;
  }

  KeyValues to_key_values() const {
    KeyValues kv;
    kv.set("total", total);
    kv.set("separator_pairs", separator_pairs);
    kv.set("mean_source_length", mean_source_length);
    for (const auto& [origin, s] : by_origin) {
      const std::string prefix = "origin." + std::string(to_string(origin));
      kv.set(prefix + ".count", s.count);
      kv.set(prefix + ".mean_source_length", s.mean_source_length);
      kv.set(prefix + ".mean_target_length", s.mean_target_length);
    }
    return kv;
  }
};

inline MixManifest mix_manifest(const Corpus& corpus) {
  MixManifest m;
  m.total = corpus.size();
  std::map<Origin, std::pair<std::uint64_t, std::uint64_t>> sums;
  std::uint64_t all_source = 0;
  for (const auto& p : corpus) {
    const std::size_t src = measured_length(p, LengthSide::Source, false, corpus.separator());
    const std::size_t tgt = measured_length(p, LengthSide::Target, false, corpus.separator());
    ++m.by_origin[p.origin].count;
    sums[p.origin].first += src;
    sums[p.origin].second += tgt;
    all_source += src;
    if (p.source.count(corpus.separator()) > 0) ++m.separator_pairs;
  }
  for (auto& [origin, s] : m.by_origin) {
    s.mean_source_length = static_cast<double>(sums[origin].first) / static_cast<double>(s.count);
    s.mean_target_length = static_cast<double>(sums[origin].second) / static_cast<double>(s.count);
  }
  if (m.total) m.mean_source_length = static_cast<double>(all_source) / static_cast<double>(m.total);
  return m;
}

}  // namespace concatmt
