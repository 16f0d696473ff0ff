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

// concatmt command-line entry point.
//
// Exit status: 0 success, 1 invalid input or configuration, 2 pipeline
// failure, 3 translator failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "concatmt/concatmt.hpp"

namespace fs = std::filesystem;
using namespace concatmt;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitPipeline = 2;
constexpr int kExitTranslator = 3;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
}

/// <prefix>.src / .tgt / .meta, plus .origin for mixed corpora.
void write_prefixed(const Corpus& c, const std::string& prefix, KeyValues meta,
                    bool with_origins = false) {
  const fs::path base(prefix);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  const auto [hs, ht] = write_parallel(c, prefix + ".src", prefix + ".tgt");
  meta.set("hash.src", hs);
  meta.set("hash.tgt", ht);
  if (with_origins) write_origin_tags(c, prefix + ".origin");
  meta.write(prefix + ".meta");
}

struct CorpusArgs {
  std::string src;
  std::string tgt;
  std::string origin = "original";
  std::string sep = std::string(kDefaultSeparator);

  void add_to(CLI::App* app) {
    app->add_option("--src", src, "Source-side file, one sentence per line")->required();
    app->add_option("--tgt", tgt, "Target-side file, line-aligned with --src")->required();
    app->add_option("--origin", origin, "original | pseudo-bt | pseudo-st | concatenated");
    app->add_option("--sep", sep, "Reserved separator token");
  }

  Corpus load() const {
    LoadOptions opts;
    opts.separator = sep;
    return load_parallel(src, tgt, parse_origin(origin), opts);
  }
};

struct AugmentArgs {
  std::uint64_t seed = 0;
  std::size_t target_count = 0;
  std::size_t min_len = 25;
  std::string length_side = "source";
  bool count_sep = false;
  std::size_t max_attempts_factor = 100;

  void add_to(CLI::App* app, bool with_count) {
    app->add_option("--concat-seed", seed, "Seed of the pair draws");
    if (with_count) app->add_option("--target-count", target_count, "Number of joined pairs")->required();
    app->add_option("--min-len", min_len, "Minimum words of a joined sentence");
    app->add_option("--length-side", length_side, "source | target");
    app->add_flag("--count-sep", count_sep, "Count the separator as a word");
    app->add_option("--max-attempts-factor", max_attempts_factor, "Draw budget per requested pair");
  }

  AugmentConfig config(const std::string& sep) const {
    AugmentConfig c;
    c.seed = seed;
    c.sep_token = sep;
    c.target_count = target_count;
    c.min_concat_len = min_len;
    c.length_side = parse_length_side(length_side);
    c.count_sep_in_length = count_sep;
    c.max_attempts_factor = max_attempts_factor;
    return c;
  }
};

/// Config file plus one --flag per pipeline key; flags win over the file.
struct PipelineArgs {
  std::string config_file;
  std::map<std::string, std::string> overrides;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_file, "key=value pipeline configuration file");
    for (const auto key : kPipelineKeys) {
      std::string flag = "--" + std::string(key);
      std::replace(flag.begin() + 2, flag.end(), '_', '-');
      const std::string k(key);
      app->add_option_function<std::string>(
          flag, [this, k](const std::string& v) { overrides[k] = v; }, "Override " + k);
    }
  }

  PipelineConfig resolve() const {
    KeyValues kv;
    if (!config_file.empty()) kv = KeyValues::read(config_file);
    for (const auto& [k, v] : overrides) kv.set(k, v);
    return parse_pipeline_config(kv);
  }
};

std::string translator_message(const TranslatorError& e) {
  std::string msg = e.what();
  if (!e.diagnostics().empty()) msg += "\n--- translator output ---\n" + e.diagnostics();
  return msg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence-concatenation augmentation and length-bucketed BLEU toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  // validate
  PipelineArgs validate_args;
  bool validate_no_run = false;
  auto* validate = app.add_subcommand("validate", "Check a pipeline configuration and its corpora");
  validate_args.add_to(validate);
  validate->add_flag("--mix-only", validate_no_run, "Do not require test set, system or output dir");
  validate->callback([&] {
    action = [&] {
      const auto report = cmd_validate(validate_args.resolve(), !validate_no_run);
      for (const auto& v : report.violations) std::cout << v.to_string() << "\n";
      if (report.ok()) std::cout << "ok\n";
      return report.ok() ? 0 : kExitValidation;
    };
  });

  // stats
  CorpusArgs stats_corpus;
  std::string stats_buckets = "to70";
  std::string stats_side = "source";
  bool stats_skip_sep = false;
  auto* stats = app.add_subcommand("stats", "Mean length and length histogram of a corpus");
  stats_corpus.add_to(stats);
  stats->add_option("--buckets", stats_buckets, "to70 | to50 | to200 | comma list of upper bounds");
  stats->add_option("--length-side", stats_side, "source | target");
  stats->add_flag("--skip-sep", stats_skip_sep, "Do not count the separator as a word");
  stats->callback([&] {
    action = [&] {
      const Corpus c = stats_corpus.load();
      const auto s = length_stats(c, BucketSpec::parse(stats_buckets), parse_length_side(stats_side),
                                  !stats_skip_sep);
      std::cout << "count=" << s.count << "\nmean_length=" << text::format_full(s.mean_length) << "\n";
      for (std::size_t i = 0; i < s.labels.size(); ++i) {
        std::cout << "bucket." << s.labels[i] << "=" << s.histogram[i] << "\n";
      }
      if (s.uncovered) std::cout << "uncovered=" << s.uncovered << "\n";
      return 0;
    };
  });

  // sample
  CorpusArgs sample_corpus;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 0;
  std::string sample_out;
  auto* sample_cmd = app.add_subcommand("sample", "Uniform sample without replacement, order kept");
  sample_corpus.add_to(sample_cmd);
  sample_cmd->add_option("-n,--n", sample_n, "Pairs to keep")->required();
  sample_cmd->add_option("--seed", sample_seed, "Sampling seed");
  sample_cmd->add_option("--out-prefix", sample_out, "Writes <prefix>.src/.tgt/.meta")->required();
  sample_cmd->callback([&] {
    action = [&] {
      const Corpus c = sample(sample_corpus.load(), sample_n, sample_seed);
      KeyValues meta = corpus_metadata(c);
      meta.set("seed", sample_seed);
      meta.set("input.src", sample_corpus.src);
      meta.set("input.tgt", sample_corpus.tgt);
      write_prefixed(c, sample_out, meta);
      std::cout << "wrote " << c.size() << " pairs to " << sample_out << ".{src,tgt}\n";
      return 0;
    };
  });

  // split
  CorpusArgs split_corpus;
  std::size_t split_train = 0;
  std::size_t split_test = 0;
  std::uint64_t split_seed = 0;
  std::string split_train_out;
  std::string split_test_out;
  auto* split = app.add_subcommand("split", "Disjoint training sample and held-out pseudo-test set");
  split_corpus.add_to(split);
  split->add_option("--train-n", split_train, "Training pairs")->required();
  split->add_option("--test-n", split_test, "Held-out pairs")->required();
  split->add_option("--seed", split_seed, "Split seed");
  split->add_option("--train-prefix", split_train_out, "Output prefix of the training part")->required();
  split->add_option("--test-prefix", split_test_out, "Output prefix of the held-out part")->required();
  split->callback([&] {
    action = [&] {
      const auto [train, test] = holdout_split(split_corpus.load(), split_train, split_test, split_seed);
      for (const auto& [c, prefix] : {std::pair{&train, split_train_out}, std::pair{&test, split_test_out}}) {
        KeyValues meta = corpus_metadata(*c);
        meta.set("seed", split_seed);
        meta.set("train_n", split_train);
        meta.set("test_n", split_test);
        write_prefixed(*c, prefix, meta);
      }
      std::cout << "train=" << train.size() << " test=" << test.size() << "\n";
      return 0;
    };
  });

  // concat
  CorpusArgs concat_corpus;
  AugmentArgs concat_aug;
  std::string concat_out;
  auto* concat = app.add_subcommand("concat", "Join random pairs of one pool with a separator");
  concat_corpus.add_to(concat);
  concat_aug.add_to(concat, true);
  concat->add_option("--out-prefix", concat_out, "Writes <prefix>.src/.tgt/.meta")->required();
  concat->callback([&] {
    action = [&] {
      const Corpus pool = concat_corpus.load();
      const AugmentConfig cfg = concat_aug.config(concat_corpus.sep);
      AugmentStats st;
      const Corpus out = concat_augment(pool, cfg, &st);
      write_prefixed(out, concat_out, augment_metadata(out, cfg, st));
      std::cout << "wrote " << out.size() << " pairs (" << st.rejected << " rejected draws)\n";
      return 0;
    };
  });

  // bt / st
  auto add_translate = [&](const std::string& name, Direction dir, const std::string& help) {
    struct Args {
      CorpusArgs corpus;
      std::string command;
      double timeout = 3600;
      std::string out;
      std::string work_dir;
    };
    auto args = std::make_shared<Args>();
    auto* sub = app.add_subcommand(name, help);
    args->corpus.add_to(sub);
    sub->add_option("--command", args->command, "Translator command template with {IN} and {OUT}")->required();
    sub->add_option("--timeout", args->timeout, "Seconds before the translator is killed");
    sub->add_option("--out-prefix", args->out, "Writes <prefix>.src/.tgt/.meta")->required();
    sub->add_option("--work-dir", args->work_dir, "Scratch directory (default <prefix>.work)");
    sub->callback([&action, args, dir, name] {
      action = [args, dir, name] {
        const Corpus c = args->corpus.load();
        const TranslatorSpec spec{args->command, dir, name, args->timeout};
        const fs::path work = args->work_dir.empty() ? fs::path(args->out + ".work") : fs::path(args->work_dir);
        const Corpus out = dir == Direction::Backward ? back_translate(c, spec, work) : self_train(c, spec, work);
        KeyValues meta = corpus_metadata(out);
        meta.set("translator", args->command);
        write_prefixed(out, args->out, meta);
        fs::remove_all(work);
        std::cout << "wrote " << out.size() << " pseudo pairs\n";
        return 0;
      };
    });
  };
  add_translate("bt", Direction::Backward, "Back-translate the target side into pseudo sources");
  add_translate("st", Direction::Forward, "Self-train: forward-translate sources into pseudo targets");

  // mix
  CorpusArgs mix_corpus;
  AugmentArgs mix_aug;
  std::string mix_recipe = "vanilla+BT+concat";
  std::uint64_t mix_shuffle_seed = 1;
  bool mix_no_shuffle = false;
  std::string mix_bt;
  std::string mix_st;
  double mix_timeout = 3600;
  std::string mix_out;
  auto* mix = app.add_subcommand("mix", "Assemble a training-data configuration");
  mix_corpus.add_to(mix);
  mix_aug.add_to(mix, false);
  mix->add_option("--recipe", mix_recipe, "vanilla | vanilla+concat | vanilla+ST | vanilla+BT | vanilla+BT+concat");
  mix->add_option("--shuffle-seed", mix_shuffle_seed, "Seed of the output shuffle");
  mix->add_flag("--no-shuffle", mix_no_shuffle, "Keep component order");
  mix->add_option("--bt-command", mix_bt, "Backward translator template");
  mix->add_option("--st-command", mix_st, "Forward translator template");
  mix->add_option("--timeout", mix_timeout, "Translator timeout in seconds");
  mix->add_option("--out-prefix", mix_out, "Writes <prefix>.src/.tgt/.origin/.meta")->required();
  mix->callback([&] {
    action = [&] {
      const Corpus original = mix_corpus.load();
      TranslatorSet ts;
      ts.work_dir = mix_out + ".work";
      if (!mix_bt.empty()) ts.backward = TranslatorSpec{mix_bt, Direction::Backward, "bt", mix_timeout};
      if (!mix_st.empty()) ts.forward = TranslatorSpec{mix_st, Direction::Forward, "st", mix_timeout};
      const MixRecipe recipe{parse_recipe(mix_recipe), original.size(), mix_shuffle_seed, !mix_no_shuffle};
      MixLog log;
      const Corpus out = build_mix(recipe, original, ts, mix_aug.config(mix_corpus.sep), &log);
      KeyValues meta = mix_manifest(out).to_key_values();
      meta.set("recipe", mix_recipe);
      meta.set("base_size", original.size());
      meta.set("concat_seed", mix_aug.seed);
      meta.set("shuffle_seed", mix_shuffle_seed);
      meta.set("shuffle", !mix_no_shuffle);
      meta.set("min_concat_len", mix_aug.min_len);
      meta.set("prng", std::string(Rng::kAlgorithm));
      for (const auto& comp : log.components) {
        meta.set("component." + comp.name + ".size", comp.size);
        if (comp.augment) meta.set("component." + comp.name + ".rejections", comp.augment->rejected);
      }
      write_prefixed(out, mix_out, meta, true);
      fs::remove_all(ts.work_dir);
      std::cout << "wrote " << out.size() << " pairs\n";
      return 0;
    };
  });

  // bleu
  std::vector<std::string> bleu_hyps;
  std::string bleu_ref;
  std::string bleu_src;
  std::string bleu_buckets;
  int bleu_order = 4;
  std::string bleu_smoothing = "none";
  std::string bleu_csv;
  std::string bleu_md;
  auto* bleu = app.add_subcommand("bleu", "Corpus BLEU, optionally by source-length bucket");
  bleu->add_option("--hyp", bleu_hyps, "Hypothesis file; repeat to average several runs")->required();
  bleu->add_option("--ref", bleu_ref, "Reference file")->required();
  bleu->add_option("--src", bleu_src, "Source file (needed for buckets)");
  bleu->add_option("--buckets", bleu_buckets, "to70 | to200 | comma list; requires --src");
  bleu->add_option("--n-order", bleu_order, "Maximum n-gram order");
  bleu->add_option("--smoothing", bleu_smoothing, "none | add-one");
  bleu->add_option("--csv", bleu_csv, "Write the report as CSV");
  bleu->add_option("--md", bleu_md, "Write the report as a Markdown table");
  bleu->callback([&] {
    action = [&] {
      auto lines = [](const std::string& p) {
        std::vector<std::string> out;
        std::istringstream in(read_file(p));
        std::string l;
        while (std::getline(in, l)) out.push_back(l);
        return out;
      };
      const BleuOptions opts{bleu_order, bleu_smoothing == "add-one" ? Smoothing::AddOne : Smoothing::None};
      if (bleu_smoothing != "none" && bleu_smoothing != "add-one") throw InputError("unknown smoothing");
      const auto refs = lines(bleu_ref);
      std::vector<std::string> srcs;
      if (!bleu_buckets.empty()) {
        if (bleu_src.empty()) throw InputError("--buckets requires --src");
        srcs = lines(bleu_src);
      }
      std::vector<BleuReport> runs;
      std::vector<NamedReport> rows;
      for (const auto& h : bleu_hyps) {
        const auto hyps = lines(h);
        runs.push_back(bleu_buckets.empty()
                           ? corpus_bleu(hyps, refs, opts)
                           : bucketed_bleu(hyps, refs, srcs, BucketSpec::parse(bleu_buckets), opts));
        rows.push_back({fs::path(h).filename().string(), runs.back()});
      }
      const BleuReport mean = average_runs(runs);
      if (runs.size() > 1) rows.push_back({"mean", mean});
      KeyValues meta;
      meta.set("runs", runs.size());
      std::cout << "BLEU = " << text::format_rounded(mean.overall, 2) << " (BP = "
                << text::format_rounded(mean.bp, 3) << ", n = " << mean.count << ")\n";
      if (!bleu_csv.empty()) write_file(bleu_csv, report_to_csv(mean, meta));
      if (!bleu_md.empty()) write_file(bleu_md, render_bucket_table(rows).to_markdown());
      return 0;
    };
  });

  // diff
  std::vector<std::string> diff_series;
  std::string diff_csv;
  std::string diff_md;
  std::string diff_svg;
  std::string diff_title = "BLEU difference by source length";
  auto* diff = app.add_subcommand("diff", "Per-bucket score differences between report CSVs");
  diff->add_option("--series", diff_series, "name=A.csv:B.csv (A minus B); repeatable")->required();
  diff->add_option("--csv", diff_csv, "Write the differences as CSV");
  diff->add_option("--md", diff_md, "Write the differences as Markdown");
  diff->add_option("--svg", diff_svg, "Write a grouped bar chart");
  diff->add_option("--title", diff_title, "Chart title");
  diff->callback([&] {
    action = [&] {
      std::vector<DiffSeries> series;
      for (const auto& s : diff_series) {
        const auto eq = s.find('=');
        const auto colon = s.find(':', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || colon == std::string::npos) {
          throw InputError("--series expects name=A.csv:B.csv, got '" + s + "'");
        }
        const auto a = report_from_csv(read_file(s.substr(eq + 1, colon - eq - 1)));
        const auto b = report_from_csv(read_file(s.substr(colon + 1)));
        series.push_back({s.substr(0, eq), diff_by_bucket(a, b)});
      }
      const Table t = render_diff_table(series);
      std::cout << t.to_markdown();
      if (!diff_csv.empty()) write_file(diff_csv, t.to_csv());
      if (!diff_md.empty()) write_file(diff_md, t.to_markdown());
      if (!diff_svg.empty()) write_file(diff_svg, render_diff_chart(series, diff_title));
      return 0;
    };
  });

  // judge
  std::string judge_file;
  std::string judge_buckets = "to50";
  std::string judge_csv;
  std::string judge_md;
  auto* judge = app.add_subcommand("judge", "Tally pairwise human judgments by length bucket");
  judge->add_option("--judgments", judge_file, "CSV with item_id,source_len,dimension,verdict")->required();
  judge->add_option("--buckets", judge_buckets, "Length buckets (default to50)");
  judge->add_option("--csv", judge_csv, "Write the tally as CSV");
  judge->add_option("--md", judge_md, "Write the tally as Markdown");
  judge->callback([&] {
    action = [&] {
      const auto tally = tally_judgments(JudgmentSet::read(judge_file), BucketSpec::parse(judge_buckets));
      const Table t = render_judgment_table(tally);
      std::cout << t.to_markdown();
      if (!judge_csv.empty()) write_file(judge_csv, t.to_csv());
      if (!judge_md.empty()) write_file(judge_md, t.to_markdown());
      return 0;
    };
  });

  // run
  PipelineArgs run_args;
  auto* run = app.add_subcommand("run", "Full pipeline: mix, translate test set per seed, score, report");
  run_args.add_to(run);
  run->callback([&] {
    action = [&] {
      const RunResult r = cmd_run(run_args.resolve());
      std::cout << "mix: " << r.manifest.total << " pairs";
      for (const auto& [o, s] : r.manifest.by_origin) std::cout << ", " << to_string(o) << "=" << s.count;
      std::cout << "\nBLEU (mean of " << r.runs.size() << " runs) = "
                << text::format_rounded(r.mean.overall) << "\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  try {
    return action ? action() : 0;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!e.quarantine().empty()) std::cerr << "partial outputs kept in " << e.quarantine().string() << "\n";
    return e.translator_failure() ? kExitTranslator : kExitPipeline;
  } catch (const TranslatorError& e) {
    std::cerr << "error: " << translator_message(e) << "\n";
    return kExitTranslator;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
}
