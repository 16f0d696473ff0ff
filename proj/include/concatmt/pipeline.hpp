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

// End-to-end experiment: ingest -> (bt|st) -> concat -> mix -> translate
// the test set once per run seed -> bucketed BLEU -> averaged report.
//
// Output directory layout after a successful run:
//   resolved_config.txt
//   mix/train.src, mix/train.tgt, mix/train.origin, mix/manifest.txt
//   runs/seed-<s>/hyp.txt, runs/seed-<s>/bleu.csv
//   report/bleu.{md,csv}, report/bleu_mean.csv, report/run_spread.{md,csv,svg},
//   report/diff_vs_baseline.{md,csv,svg} (with a baseline), report/report.meta
//
// Work happens in <out>/.staging and is moved into place only when every
// stage succeeded. A failed run leaves its partial files in
// <out>/quarantine/attempt-<k> (first unused k) and touches nothing else.

#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "concatmt/augment.hpp"
#include "concatmt/bleu.hpp"
#include "concatmt/buckets.hpp"
#include "concatmt/corpus.hpp"
#include "concatmt/error.hpp"
#include "concatmt/kv.hpp"
#include "concatmt/mix.hpp"
#include "concatmt/report.hpp"
#include "concatmt/translate.hpp"

namespace concatmt {

struct PipelineConfig {
  std::filesystem::path train_source;
  std::filesystem::path train_target;
  std::filesystem::path test_source;
  std::filesystem::path test_target;
  std::string source_lang;
  std::string target_lang;
  Recipe recipe = Recipe::VanillaBTConcat;
  /// Training pairs sampled from the input; 0 keeps the whole corpus.
  std::size_t base_size = 0;
  AugmentConfig augment;
  std::string buckets = "to70";
  std::uint64_t sample_seed = 1;
  std::uint64_t shuffle_seed = 1;
  bool shuffle = true;
  std::vector<std::uint64_t> run_seeds{1, 2, 3};
  std::string bt_command;
  std::string st_command;
  /// The evaluated system; may use {SEED} to select the run.
  std::string system_command;
  double translator_timeout = 3600.0;
  std::filesystem::path baseline_report;
  std::filesystem::path output_dir;
  int n_order = 4;
  Smoothing smoothing = Smoothing::None;
};

/// Keys accepted in config files and as --<key> flags (with '_' as '-').
inline constexpr std::string_view kPipelineKeys[] = {
    "train_source", "train_target", "test_source", "test_target", "source_lang",
    "target_lang", "recipe", "base_size", "sep_token", "min_concat_len", "length_side",
    "count_sep_in_length", "max_attempts_factor", "buckets", "sample_seed", "concat_seed",
    "shuffle_seed", "shuffle", "run_seeds", "bt_command", "st_command", "system_command",
    "translator_timeout", "baseline_report", "output_dir", "n_order", "smoothing"};

namespace detail {

inline bool parse_bool(std::string_view v, std::string_view key) {
  v = text::trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<std::uint64_t> parse_seed_list(std::string_view v) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : text::split_on(v, ',')) {
    if (text::trim(part).empty()) continue;
    seeds.push_back(text::parse_number<std::uint64_t>(part, "run seed"));
  }
  return seeds;
}

inline std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

}  // namespace detail

/// Builds a config from key-value pairs; unknown keys are rejected.
inline PipelineConfig parse_pipeline_config(const KeyValues& kv) {
  PipelineConfig c;
  for (const auto& [key, value] : kv.entries()) {
    if (std::find(std::begin(kPipelineKeys), std::end(kPipelineKeys), key) ==
        std::end(kPipelineKeys)) {
      throw InputError("unknown config key '" + key + "'");
    }
    if (key == "train_source") c.train_source = value;
    else if (key == "train_target") c.train_target = value;
    else if (key == "test_source") c.test_source = value;
    else if (key == "test_target") c.test_target = value;
    else if (key == "source_lang") c.source_lang = value;
    else if (key == "target_lang") c.target_lang = value;
    else if (key == "recipe") c.recipe = parse_recipe(value);
    else if (key == "base_size") c.base_size = text::parse_number<std::size_t>(value, key);
    else if (key == "sep_token") c.augment.sep_token = value;
    else if (key == "min_concat_len") c.augment.min_concat_len = text::parse_number<std::size_t>(value, key);
    else if (key == "length_side") c.augment.length_side = parse_length_side(value);
    else if (key == "count_sep_in_length") c.augment.count_sep_in_length = detail::parse_bool(value, key);
    else if (key == "max_attempts_factor") c.augment.max_attempts_factor = text::parse_number<std::size_t>(value, key);
    else if (key == "buckets") c.buckets = value;
    else if (key == "sample_seed") c.sample_seed = text::parse_number<std::uint64_t>(value, key);
    else if (key == "concat_seed") c.augment.seed = text::parse_number<std::uint64_t>(value, key);
    else if (key == "shuffle_seed") c.shuffle_seed = text::parse_number<std::uint64_t>(value, key);
    else if (key == "shuffle") c.shuffle = detail::parse_bool(value, key);
    else if (key == "run_seeds") c.run_seeds = detail::parse_seed_list(value);
    else if (key == "bt_command") c.bt_command = value;
    else if (key == "st_command") c.st_command = value;
    else if (key == "system_command") c.system_command = value;
    else if (key == "translator_timeout") c.translator_timeout = text::parse_number<double>(value, key);
    else if (key == "baseline_report") c.baseline_report = value;
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "n_order") c.n_order = text::parse_number<int>(value, key);
    else if (key == "smoothing") {
      if (value == "none") c.smoothing = Smoothing::None;
      else if (value == "add-one") c.smoothing = Smoothing::AddOne;
      else throw InputError("smoothing must be 'none' or 'add-one'");
    }
  }
  return c;
}

/// Every field, in kPipelineKeys order; parse_pipeline_config inverts it.
inline KeyValues to_key_values(const PipelineConfig& c) {
  KeyValues kv;
  kv.set("train_source", c.train_source.string());
  kv.set("train_target", c.train_target.string());
  kv.set("test_source", c.test_source.string());
  kv.set("test_target", c.test_target.string());
  kv.set("source_lang", c.source_lang);
  kv.set("target_lang", c.target_lang);
  kv.set("recipe", std::string(to_string(c.recipe)));
  kv.set("base_size", c.base_size);
  kv.set("sep_token", c.augment.sep_token);
  kv.set("min_concat_len", c.augment.min_concat_len);
  kv.set("length_side", std::string(to_string(c.augment.length_side)));
  kv.set("count_sep_in_length", c.augment.count_sep_in_length);
  kv.set("max_attempts_factor", c.augment.max_attempts_factor);
  kv.set("buckets", c.buckets);
  kv.set("sample_seed", c.sample_seed);
  kv.set("concat_seed", c.augment.seed);
  kv.set("shuffle_seed", c.shuffle_seed);
  kv.set("shuffle", c.shuffle);
  kv.set("run_seeds", detail::join_seeds(c.run_seeds));
  kv.set("bt_command", c.bt_command);
  kv.set("st_command", c.st_command);
  kv.set("system_command", c.system_command);
  kv.set("translator_timeout", c.translator_timeout);
  kv.set("baseline_report", c.baseline_report.string());
  kv.set("output_dir", c.output_dir.string());
  kv.set("n_order", c.n_order);
  kv.set("smoothing", std::string(c.smoothing == Smoothing::AddOne ? "add-one" : "none"));
  return kv;
}

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks everything cmd_run needs without running anything: file presence
/// and alignment, reserved separator tokens, translator templates, and
/// parameter ranges. With `for_run` false the test set, evaluated system
/// and output directory are optional.
inline ValidationReport cmd_validate(const PipelineConfig& c, bool for_run = true) {
  ValidationReport report;
  auto add = [&report](std::string file, std::string message) {
    report.violations.push_back({std::move(file), 0, std::move(message)});
  };
  auto check_files = [&](const std::filesystem::path& src, const std::filesystem::path& tgt,
                         std::string_view what, bool required) -> std::optional<std::size_t> {
    if (src.empty() || tgt.empty()) {
      if (required) add("config", std::string(what) + " source and target files are required");
      return std::nullopt;
    }
    bool missing = false;
    for (const auto& p : {src, tgt}) {
      if (!std::filesystem::is_regular_file(p)) {
        add(p.string(), "file does not exist");
        missing = true;
      }
    }
    if (missing) return std::nullopt;
    const std::size_t before = report.violations.size();
    for (auto& v : scan_parallel(src, tgt, c.augment.sep_token)) report.violations.push_back(std::move(v));
    if (report.violations.size() != before) return std::nullopt;
    std::ifstream in(src, std::ios::binary);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    return lines;
  };

  try {
    Corpus::check_separator(c.augment.sep_token);
  } catch (const InputError& e) {
    add("config", std::string("sep_token: ") + e.what());
  }
  const auto train_lines = check_files(c.train_source, c.train_target, "training", true);
  check_files(c.test_source, c.test_target, "test", for_run);
  if (train_lines) {
    const std::size_t n = c.base_size ? c.base_size : *train_lines;
    if (n < 2) add("config", "base_size: a mix needs at least 2 training pairs");
    if (c.base_size > *train_lines) {
      add("config", "base_size " + std::to_string(c.base_size) + " exceeds training corpus size " +
                        std::to_string(*train_lines));
    }
  }
  try {
    (void)BucketSpec::parse(c.buckets);
  } catch (const InputError& e) {
    add("config", std::string("buckets: ") + e.what());
  }
  if (c.augment.max_attempts_factor == 0) add("config", "max_attempts_factor must be positive");
  if (c.n_order < 1) add("config", "n_order must be >= 1");
  if (!(c.translator_timeout > 0)) add("config", "translator_timeout must be positive");

  auto check_template = [&](const std::string& cmd, std::string_view key, bool required) {
    if (cmd.empty()) {
      if (required) add("config", std::string(key) + " is required for recipe " + std::string(to_string(c.recipe)));
      return;
    }
    TranslatorSpec spec{cmd, Direction::Forward, std::string(key), 1.0};
    try {
      spec.validate();
    } catch (const InputError& e) {
      add("config", std::string(key) + ": " + e.what());
    }
  };
  check_template(c.bt_command, "bt_command", needs_backward(c.recipe));
  check_template(c.st_command, "st_command", needs_forward(c.recipe));
  check_template(c.system_command, "system_command", for_run);
  if (for_run) {
    if (c.run_seeds.empty()) add("config", "run_seeds must list at least one seed");
    if (c.output_dir.empty()) add("config", "output_dir is required");
  }
  if (!c.baseline_report.empty() && !std::filesystem::is_regular_file(c.baseline_report)) {
    add(c.baseline_report.string(), "baseline report does not exist");
  }
  return report;
}

/// A run failure, tagged with the stage that failed.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what, bool translator_failure,
                std::filesystem::path quarantine)
      : Error("stage '" + stage + "' failed: " + what),
        stage_(std::move(stage)),
        translator_failure_(translator_failure),
        quarantine_(std::move(quarantine)) {}

  const std::string& stage() const noexcept { return stage_; }
  bool translator_failure() const noexcept { return translator_failure_; }
  /// Where the partial outputs of the failed attempt were moved.
  const std::filesystem::path& quarantine() const noexcept { return quarantine_; }

 private:
  std::string stage_;
  bool translator_failure_;
  std::filesystem::path quarantine_;
};

namespace detail {

/// Exclusive ownership of an output directory for one pipeline.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw Error("output directory " + dir.string() + " is locked by another pipeline (" +
                  path_.string() + ")");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;
  ~DirectoryLock() {
    ::close(fd_);
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

inline std::filesystem::path next_quarantine(const std::filesystem::path& out) {
  for (std::size_t k = 1;; ++k) {
    auto p = out / "quarantine" / ("attempt-" + std::to_string(k));
    if (!std::filesystem::exists(p)) return p;
  }
}

inline std::vector<Sentence> read_sentences(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) out.emplace_back(std::move(line));
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace detail

/// Result of a successful run.
struct RunResult {
  MixManifest manifest;
  std::vector<BleuReport> runs;
  BleuReport mean;
  ReportBundle bundle;
};

inline RunResult cmd_run(const PipelineConfig& c) {
  if (const auto v = cmd_validate(c, true); !v.ok()) {
    std::string msg = "configuration is invalid:";
    for (const auto& x : v.violations) msg += "\n  " + x.to_string();
    throw InputError(msg);
  }
  namespace fs = std::filesystem;
  fs::create_directories(c.output_dir);
  detail::DirectoryLock lock(c.output_dir);
  const fs::path staging = c.output_dir / ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);

  std::string stage = "ingest";
  try {
    const BucketSpec buckets = BucketSpec::parse(c.buckets);
    LoadOptions opts{"train", c.augment.sep_token, c.source_lang, c.target_lang};
    Corpus train = load_parallel(c.train_source, c.train_target, Origin::Original, opts);
    if (c.base_size && c.base_size < train.size()) {
      train = sample(train, c.base_size, c.sample_seed);
      train.set_name("train");
    }
    opts.name = "test";
    const Corpus test = load_parallel(c.test_source, c.test_target, Origin::Original, opts);

    stage = "mix";
    TranslatorSet translators;
    translators.work_dir = staging / "work";
    if (!c.bt_command.empty()) {
      translators.backward = TranslatorSpec{c.bt_command, Direction::Backward, "bt", c.translator_timeout};
    }
    if (!c.st_command.empty()) {
      translators.forward = TranslatorSpec{c.st_command, Direction::Forward, "st", c.translator_timeout};
    }
    MixRecipe recipe{c.recipe, train.size(), c.shuffle_seed, c.shuffle};
    MixLog log;
    const Corpus mix = build_mix(recipe, train, translators, c.augment, &log);
    fs::create_directories(staging / "mix");
    const auto [src_hash, tgt_hash] =
        write_parallel(mix, staging / "mix" / "train.src", staging / "mix" / "train.tgt");
    write_origin_tags(mix, staging / "mix" / "train.origin");
    RunResult result;
    result.manifest = mix_manifest(mix);
    KeyValues manifest;
    manifest.set("recipe", std::string(to_string(c.recipe)));
    manifest.set("base_size", train.size());
    const KeyValues composition = result.manifest.to_key_values();
    for (const auto& [k, v] : composition.entries()) manifest.set(k, v);
    for (const auto& comp : log.components) {
      const std::string p = "component." + comp.name;
      manifest.set(p + ".origin", std::string(to_string(comp.origin)));
      manifest.set(p + ".size", comp.size);
      if (comp.augment) {
        manifest.set(p + ".draws", comp.augment->draws);
        manifest.set(p + ".rejections", comp.augment->rejected);
      }
    }
    manifest.set("sep_token", c.augment.sep_token);
    manifest.set("min_concat_len", c.augment.min_concat_len);
    manifest.set("length_side", std::string(to_string(c.augment.length_side)));
    manifest.set("count_sep_in_length", c.augment.count_sep_in_length);
    manifest.set("sample_seed", c.sample_seed);
    manifest.set("concat_seed", c.augment.seed);
    manifest.set("shuffle_seed", c.shuffle_seed);
    manifest.set("shuffle", c.shuffle);
    manifest.set("prng", std::string(Rng::kAlgorithm));
    manifest.set("hash.train.src", src_hash);
    manifest.set("hash.train.tgt", tgt_hash);
    manifest.write(staging / "mix" / "manifest.txt");

    stage = "translate";
    const TranslatorSpec system{c.system_command, Direction::Forward, "system", c.translator_timeout};
    fs::create_directories(staging / "runs");
    const fs::path test_input = staging / "runs" / "test.src";
    {
      std::ofstream out(test_input, std::ios::binary | std::ios::trunc);
      for (const auto& p : test) {
        // Test-time input is always a single sentence.
        if (p.source.count(c.augment.sep_token) != 0) {
          throw InputError("test sentence " + std::to_string(p.id + 1) + " contains the separator");
        }
        out << p.source.raw() << '\n';
      }
    }
    std::vector<Sentence> references;
    std::vector<Sentence> sources;
    for (const auto& p : test) {
      sources.push_back(p.source);
      references.push_back(p.target);
    }
    std::vector<std::vector<Sentence>> hypotheses;
    for (const auto seed : c.run_seeds) {
      const fs::path dir = staging / "runs" / ("seed-" + std::to_string(seed));
      fs::create_directories(dir);
      translate_file(system, test_input, dir / "hyp.txt", seed);
      hypotheses.push_back(detail::read_sentences(dir / "hyp.txt"));
    }

    stage = "score";
    const BleuOptions bleu_opts{c.n_order, c.smoothing};
    std::vector<NamedReport> rows;
    for (std::size_t i = 0; i < c.run_seeds.size(); ++i) {
      BleuReport r = bucketed_bleu(hypotheses[i], references, sources, buckets, bleu_opts);
      KeyValues meta;
      meta.set("seed", c.run_seeds[i]);
      detail::write_text(staging / "runs" / ("seed-" + std::to_string(c.run_seeds[i])) / "bleu.csv",
                         report_to_csv(r, meta));
      rows.push_back({"seed-" + std::to_string(c.run_seeds[i]), r});
      result.runs.push_back(std::move(r));
    }
    result.mean = average_runs(result.runs);
    rows.push_back({"mean", result.mean});

    stage = "report";
    ReportBundle& bundle = result.bundle;
    bundle.metadata().set("recipe", std::string(to_string(c.recipe)));
    bundle.metadata().set("run_seeds", detail::join_seeds(c.run_seeds));
    bundle.metadata().set("runs", c.run_seeds.size());
    bundle.metadata().set("sample_seed", c.sample_seed);
    bundle.metadata().set("concat_seed", c.augment.seed);
    bundle.metadata().set("shuffle_seed", c.shuffle_seed);
    bundle.metadata().set("prng", std::string(Rng::kAlgorithm));
    bundle.metadata().set("buckets", buckets.to_string());
    bundle.metadata().set("n_order", c.n_order);
    bundle.metadata().set("mix.hash.train.src", src_hash);
    bundle.metadata().set("mix.hash.train.tgt", tgt_hash);
    bundle.add_table("bleu", render_bucket_table(rows));

    std::vector<DiffSeries> spread;
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      spread.push_back({rows[i].name, diff_by_bucket(result.runs[i], result.mean)});
    }
    bundle.add_table("run_spread", render_diff_table(spread));
    bundle.add_chart("run_spread", render_diff_chart(spread, "Per-run BLEU minus mean"), "run_spread");
    if (!c.baseline_report.empty()) {
      std::ifstream in(c.baseline_report, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      const BleuReport baseline = report_from_csv(buf.str());
      const std::vector<DiffSeries> diff{
          {std::string(to_string(c.recipe)) + " - baseline", diff_by_bucket(result.mean, baseline)}};
      bundle.add_table("diff_vs_baseline", render_diff_table(diff));
      bundle.add_chart("diff_vs_baseline", render_diff_chart(diff), "diff_vs_baseline");
    }
    bundle.write(staging / "report");
    KeyValues mean_meta;
    mean_meta.set("run_seeds", detail::join_seeds(c.run_seeds));
    mean_meta.set("runs", c.run_seeds.size());
    detail::write_text(staging / "report" / "bleu_mean.csv", report_to_csv(result.mean, mean_meta));
    to_key_values(c).write(staging / "resolved_config.txt");

    stage = "commit";
    fs::remove_all(staging / "work");
    fs::remove(test_input);
    for (const auto& entry : fs::directory_iterator(staging)) {
      const fs::path dest = c.output_dir / entry.path().filename();
      fs::remove_all(dest);
      fs::rename(entry.path(), dest);
    }
    fs::remove_all(staging);
    return result;
  } catch (const std::exception& e) {
    fs::path quarantine;
    std::error_code ec;
    if (fs::exists(staging, ec)) {
      quarantine = detail::next_quarantine(c.output_dir);
      fs::create_directories(quarantine.parent_path(), ec);
      fs::rename(staging, quarantine, ec);
      if (!ec) detail::write_text(quarantine / "FAILED", "stage=" + stage + "\nerror=" + e.what() + "\n");
    }
    std::string what = e.what();
    if (const auto* t = dynamic_cast<const TranslatorError*>(&e); t && !t->diagnostics().empty()) {
      what += "\n--- translator output ---\n" + t->diagnostics();
    }
    throw PipelineError(stage, what, dynamic_cast<const TranslatorError*>(&e) != nullptr, quarantine);
  }
}

}  // namespace concatmt
