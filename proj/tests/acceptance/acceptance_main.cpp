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

// Acceptance suite: one PASS/FAIL line per criterion, each with its own
// time limit. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "concatmt/concatmt.hpp"
#include "support/bleu_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/pipeline_fixture.hpp"
#include "support/reference_tables.hpp"

namespace {

using namespace concatmt;
namespace fs = std::filesystem;
using Lines = std::vector<std::string>;

/// Collects failed checks of one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string note;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<void(Check&)> body;
};

// 1
void bleu_oracle(Check& c) {
  std::vector<std::pair<Lines, Lines>> corpora = {
      {{"the cat sat on the mat", "a b c"}, {"the cat sat on the mat", "a b c"}},
      {{"the the the the the the the"}, {"the cat is on the mat"}},
      {{"a b c d", "w x y z"}, {"a b c d e f", "w x y z q"}},
      {{"a b x c", "p q"}, {"a b c", "q p"}},
      {{"a b c d e f", "p q r s t"}, {"a b c d x f", "p q r s t u v"}},
      {{"x"}, {"x y z"}},
      {{"a a a b b", "c"}, {"a b a b", "c c c"}},
      {{"one two three four five six seven"}, {"one two three four five six seven eight nine"}},
  };
  std::mt19937_64 gen(2024);
  while (corpora.size() < 40) {
    Lines h;
    Lines r;
    const std::size_t n = 1 + gen() % 20;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t vocab = 2 + gen() % 8;
      h.push_back(fixtures::random_sentence(gen, 1 + gen() % 14, vocab));
      r.push_back(fixtures::random_sentence(gen, 1 + gen() % 14, vocab));
    }
    corpora.emplace_back(std::move(h), std::move(r));
  }
  bool perfect = false, clipped = false, zero_high = false, short_bp = false;
  double worst = 0;
  for (std::size_t k = 0; k < corpora.size(); ++k) {
    const auto& [h, r] = corpora[k];
    const auto want = oracle::bleu(h, r);
    const auto got = corpus_bleu(h, r);
    const double err = std::abs(got.overall - want.score);
    worst = std::max(worst, err);
    c.expect(err <= 1e-9, "corpus " + std::to_string(k) + ": " + text::format_full(got.overall) +
                              " vs oracle " + text::format_full(want.score));
    perfect |= want.score == 100.0;
    long raw1 = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const auto hw = oracle::words(h[i]);
      const auto rw = oracle::words(r[i]);
      for (const auto& w : hw) raw1 += std::count(rw.begin(), rw.end(), w) > 0 ? 1 : 0;
    }
    clipped |= raw1 > want.matches[0];
    zero_high |= want.matches[0] > 0 && want.matches[3] == 0 && want.hyp_totals[3] > 0;
    short_bp |= want.bp < 1.0 && want.bp > 0.0;
  }
  c.expect(perfect && clipped && zero_high && short_bp, "fixture coverage incomplete");
  c.note = std::to_string(corpora.size()) + " corpora, max |diff| " + text::format_full(worst);
}

// 2
void bleu_identity(Check& c) {
  std::mt19937_64 gen(7);
  for (int k = 0; k < 100; ++k) {
    Lines h;
    const std::size_t n = 1 + gen() % 30;
    for (std::size_t i = 0; i < n; ++i) h.push_back(fixtures::random_sentence(gen, 1 + gen() % 40, 1 + gen() % 100));
    const double s = corpus_bleu(h, h).overall;
    c.expect(s == 100.0, "corpus " + std::to_string(k) + " scored " + text::format_full(s));
  }
  c.note = "100 corpora";
}

// 3
void concat_invariants(Check& c) {
  std::size_t cases = 0;
  std::size_t outputs = 0;
  for (std::uint64_t k = 0; cases < 1000; ++k) {
    const std::size_t n = 2 + k % 60;
    const Corpus pool = fixtures::random_corpus(n, 50'000 + k, 1, 40);
    std::set<std::pair<std::string, std::string>> pool_pairs;
    for (const auto& p : pool) pool_pairs.emplace(p.source.raw(), p.target.raw());
    AugmentConfig cfg;
    cfg.seed = k;
    cfg.target_count = 1 + k % 50;
    cfg.min_concat_len = 2 + k % 40;
    cfg.count_sep_in_length = k % 4 == 0;
    cfg.length_side = k % 5 == 0 ? LengthSide::Target : LengthSide::Source;
    Corpus out;
    try {
      out = concat_augment(pool, cfg);
    } catch (const DomainError&) {
      continue;  // threshold out of reach for this pool
    }
    ++cases;
    const std::string id = "case " + std::to_string(k);
    c.expect(out.size() == cfg.target_count, id + ": wrong count");
    for (const auto& p : out) {
      ++outputs;
      c.expect(p.source.count("<sep>") == 1 && p.target.count("<sep>") == 1, id + ": separator count");
      c.expect(measured_length(p, cfg.length_side, cfg.count_sep_in_length, "<sep>") >= cfg.min_concat_len,
               id + ": below min_concat_len");
      const auto& s = p.source.raw();
      const auto& t = p.target.raw();
      const auto si = s.find(" <sep> ");
      const auto ti = t.find(" <sep> ");
      if (si == std::string::npos || ti == std::string::npos) {
        c.expect(false, id + ": separator not space-delimited");
        continue;
      }
      const std::string s1 = s.substr(0, si), s2 = s.substr(si + 7);
      const std::string t1 = t.substr(0, ti), t2 = t.substr(ti + 7);
      c.expect(pool_pairs.contains({s1, t1}), id + ": first half is not one pool pair");
      c.expect(pool_pairs.contains({s2, t2}), id + ": second half is not one pool pair");
    }
    c.expect(concat_augment(pool, cfg) == out, id + ": rerun differs");
  }
  c.note = std::to_string(cases) + " cases, " + std::to_string(outputs) + " joined pairs";
}

// 4
void mix_size_law(Check& c) {
  fixtures::TempDir dir;
  TranslatorSet t;
  t.forward = mock::spec(CONCATMT_MOCK_TRANSLATOR, "identity", Direction::Forward);
  t.backward = mock::spec(CONCATMT_MOCK_TRANSLATOR, "reverse", Direction::Backward);
  t.work_dir = dir / "work";
  for (std::size_t n : {10u, 100u, 1000u}) {
    const Corpus original = fixtures::random_corpus(n, n, 3, 30);
    auto size_of = [&](Recipe r) {
      AugmentConfig cfg;
      cfg.seed = 1;
      return build_mix({r, n, 1, true}, original, t, cfg).size();
    };
    const std::string at = "N=" + std::to_string(n) + ": ";
    c.expect(size_of(Recipe::VanillaConcat) == 2 * n, at + "vanilla+concat");
    c.expect(size_of(Recipe::VanillaST) == 2 * n, at + "vanilla+ST");
    c.expect(size_of(Recipe::VanillaBT) == 2 * n, at + "vanilla+BT");
    c.expect(size_of(Recipe::VanillaBTConcat) == 4 * n, at + "vanilla+BT+concat");
  }
  c.note = "N in {10, 100, 1000}";
}

// 5
void side_preservation(Check& c) {
  fixtures::TempDir dir;
  const Corpus original = fixtures::random_corpus(1000, 77, 1, 40);
  const Corpus bt = back_translate(original, mock::spec(CONCATMT_MOCK_TRANSLATOR, "reverse", Direction::Backward),
                                   dir / "bt");
  const Corpus st = self_train(original, mock::spec(CONCATMT_MOCK_TRANSLATOR, "truncate:4", Direction::Forward),
                               dir / "st");
  c.expect(bt.size() == 1000 && st.size() == 1000, "size changed");
  for (std::size_t i = 0; i < original.size() && i < bt.size() && i < st.size(); ++i) {
    c.expect(bt[i].target.raw() == original[i].target.raw(), "bt target line " + std::to_string(i + 1));
    c.expect(st[i].source.raw() == original[i].source.raw(), "st source line " + std::to_string(i + 1));
  }
  c.note = "1000 pairs each";
}

// 6
void bucket_fixture(Check& c) {
  const auto spec = BucketSpec::to70();
  std::mt19937_64 gen(6);
  Corpus corpus("fixture");
  const auto bounds = spec.upper_bounds();
  std::size_t lower = 1;
  for (std::size_t b = 0; b < reference::kTestCounts.size(); ++b) {
    const std::size_t upper = bounds[b] == BucketSpec::kUnbounded ? 150 : bounds[b];
    for (std::size_t k = 0; k < reference::kTestCounts[b]; ++k) {
      // Hit both bucket edges, then random interior lengths.
      const std::size_t len = k == 0 ? lower : k == 1 ? upper : lower + gen() % (upper - lower + 1);
      corpus.add(fixtures::random_sentence(gen, len), "t", Origin::Original);
    }
    lower = upper + 1;
  }
  const auto stats = length_stats(corpus, spec);
  std::size_t total = 0;
  for (std::size_t b = 0; b < stats.histogram.size(); ++b) {
    c.expect(stats.histogram[b] == reference::kTestCounts[b],
             stats.labels[b] + ": " + std::to_string(stats.histogram[b]));
    total += stats.histogram[b];
  }
  c.expect(total == 1812 && stats.uncovered == 0, "total " + std::to_string(total));

  std::vector<Sentence> src;
  std::vector<Sentence> hyp;
  for (const auto& p : corpus) {
    src.push_back(p.source);
    hyp.push_back(p.target);
  }
  const auto r = bucketed_bleu(hyp, hyp, src, spec);
  for (std::size_t b = 0; b < r.per_bucket.size(); ++b) {
    c.expect(r.per_bucket[b].count == reference::kTestCounts[b], "bleu bucket " + r.per_bucket[b].label);
  }
  c.note = "73/529/600/341/164/74/18/13, total " + std::to_string(total);
}

// 7
void judgment_fixture(Check& c) {
  const auto tally = tally_judgments(JudgmentSet::parse(reference::judgment_csv()), BucketSpec::to50());
  const auto& a = tally.total(Dimension::Adequacy);
  const auto& f = tally.total(Dimension::Fluency);
  const std::array<std::size_t, 6> got = {a.win(), a.tie(), a.lose(), f.win(), f.tie(), f.lose()};
  for (std::size_t i = 0; i < 6; ++i) {
    c.expect(got[i] == reference::kJudgmentOverall[i], "overall column " + std::to_string(i));
  }
  c.note = "adequacy " + std::to_string(got[0]) + "/" + std::to_string(got[1]) + "/" + std::to_string(got[2]) +
           ", fluency " + std::to_string(got[3]) + "/" + std::to_string(got[4]) + "/" + std::to_string(got[5]);
}

// 8
void diff_fixture(Check& c) {
  const auto& rows = reference::test_rows();
  const auto t1 = BucketSpec::to70();
  const auto d1 = diff_by_bucket(reference::report(rows[4], t1, reference::kTestCounts),
                                 reference::report(rows[3], t1, reference::kTestCounts));
  c.expect(std::abs(d1.overall - 0.6) < 1e-9 && text::format_rounded(d1.overall) == "0.6",
           "overall diff " + text::format_full(d1.overall));

  const auto& pseudo = reference::pseudo_test_rows();
  const auto t3 = BucketSpec::to200();
  const auto d3 = diff_by_bucket(reference::report(pseudo[1], t3, reference::kPseudoTestCounts),
                                 reference::report(pseudo[0], t3, reference::kPseudoTestCounts));
  const auto& v = d3.per_bucket.back();
  c.expect(d3.labels.back() == "101-200", "last label " + d3.labels.back());
  c.expect(v && std::abs(*v - 2.2) < 1e-9 && text::format_rounded(*v) == "2.2",
           "101-200 diff " + (v ? text::format_full(*v) : std::string("absent")));
  c.note = "overall +" + text::format_rounded(d1.overall) + ", 101-200 +" + (v ? text::format_rounded(*v) : "?");
}

// 9
void end_to_end_determinism(Check& c) {
  fixtures::TempDir a;
  fixtures::TempDir b;
  const auto ca = fixtures::pipeline_config(a.path(), 200);
  const auto cb = fixtures::pipeline_config(b.path(), 200);
  cmd_run(ca);
  cmd_run(cb);
  const auto files = fixtures::tree(ca.output_dir);
  c.expect(files == fixtures::tree(cb.output_dir), "different file sets");
  std::size_t compared = 0;
  for (const auto& f : files) {
    const auto ext = fs::path(f).extension().string();
    if (ext != ".src" && ext != ".tgt" && ext != ".origin" && ext != ".csv" && ext != ".md" &&
        ext != ".svg" && ext != ".txt" && ext != ".meta") {
      continue;
    }
    if (f == "resolved_config.txt") continue;  // records the two output paths
    ++compared;
    c.expect(fixtures::read_all(ca.output_dir / f) == fixtures::read_all(cb.output_dir / f), f + " differs");
  }
  c.note = std::to_string(compared) + " files byte-identical";
}

// Peak resident set size in bytes.
std::size_t peak_rss() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) return std::stoul(line.substr(6)) * 1024;
  }
  return 0;
}

std::size_t current_rss() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmRSS:", 0) == 0) return std::stoul(line.substr(6)) * 1024;
  }
  return 0;
}

// 10
void throughput(Check& c) {
  using clock = std::chrono::steady_clock;
  fixtures::TempDir dir;
  const std::size_t n = 1'000'000;
  std::size_t bytes = 0;
  {
    std::mt19937_64 gen(10);
    std::ofstream src(dir / "big.src", std::ios::binary);
    std::ofstream tgt(dir / "big.tgt", std::ios::binary);
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
      for (auto* out : {&src, &tgt}) {
        line.clear();
        const std::size_t len = 1 + gen() % 60;
        for (std::size_t k = 0; k < len; ++k) {
          if (k) line += ' ';
          line += 'w';
          line += std::to_string(gen() % 5000);
        }
        *out << line << '\n';
        bytes += line.size() + 1;
      }
    }
  }

  const std::size_t rss_before = current_rss();
  const auto t0 = clock::now();
  const Corpus pool = load_parallel(dir / "big.src", dir / "big.tgt", Origin::Original);
  const double load_s = std::chrono::duration<double>(clock::now() - t0).count();
  const std::size_t rss_loaded = std::max(peak_rss(), current_rss());
  std::size_t payload = 0;
  for (const auto& p : pool) payload += p.source.raw().size() + p.target.raw().size();
  // The pool keeps every sentence; a second full copy of the files on top
  // of it would push growth past this bound.
  const double growth = static_cast<double>(rss_loaded - std::min(rss_loaded, rss_before));
  const double bound = 1.6 * static_cast<double>(payload) + static_cast<double>(n * sizeof(SentencePair)) * 2 +
                       64.0 * 1024 * 1024;
  c.expect(pool.size() == n, "pool size");
  c.expect(growth <= bound, "ingestion grew RSS by " + std::to_string(static_cast<long>(growth) >> 20) +
                                " MiB > bound " + std::to_string(static_cast<long>(bound) >> 20) + " MiB");

  AugmentConfig cfg;
  cfg.seed = 1;
  cfg.target_count = n;
  cfg.min_concat_len = 25;
  const auto t1 = clock::now();
  std::size_t produced = 0;
  {
    const Corpus joined = concat_augment(pool, cfg);
    produced = joined.size();
  }
  const double concat_s = std::chrono::duration<double>(clock::now() - t1).count();
  const double concat_rate = static_cast<double>(produced) / concat_s;
  c.expect(produced == n, "concat count");
  c.expect(concat_rate >= 100'000, "concat " + std::to_string(static_cast<long>(concat_rate)) + " pairs/s");

  std::vector<std::string_view> hyps;
  std::vector<std::string_view> refs;
  hyps.reserve(n);
  refs.reserve(n);
  for (const auto& p : pool) {
    hyps.push_back(p.source.raw());
    refs.push_back(p.target.raw());
  }
  const auto t2 = clock::now();
  const auto report = corpus_bleu(hyps, refs);
  const double bleu_s = std::chrono::duration<double>(clock::now() - t2).count();
  const double bleu_rate = static_cast<double>(report.count) / bleu_s;
  c.expect(bleu_rate >= 50'000, "bleu " + std::to_string(static_cast<long>(bleu_rate)) + " sentences/s");

  c.note = "load " + text::format_rounded(load_s, 2) + " s (" + std::to_string(bytes >> 20) + " MiB, RSS +" +
           std::to_string(static_cast<long>(growth) >> 20) + " MiB), concat " +
           std::to_string(static_cast<long>(concat_rate)) + " pairs/s, bleu " +
           std::to_string(static_cast<long>(bleu_rate)) + " sentences/s";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "BLEU matches brute-force oracle within 1e-9", 1, bleu_oracle},
      {2, "BLEU(h, h) = 100 exactly", 1, bleu_identity},
      {3, "concatenation invariants", 10, concat_invariants},
      {4, "mix size law 2N / 4N", 5, mix_size_law},
      {5, "BT keeps targets, ST keeps sources", 2, side_preservation},
      {6, "length-bucket counts of the 1,812-sentence test set", 1, bucket_fixture},
      {7, "human-judgment tally reproduces the overall row", 1, judgment_fixture},
      {8, "bucket diff arithmetic (+0.6 overall, +2.2 at 101-200)", 1, diff_fixture},
      {9, "end-to-end reruns are byte-identical", 30, end_to_end_determinism},
      {10, "throughput on 1M pairs with bounded ingestion memory", 120, throughput},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.limit_seconds) {
      check.failures.push_back("took " + text::format_rounded(secs, 2) + " s, limit " +
                               text::format_rounded(cr.limit_seconds, 0) + " s");
    }
    const bool ok = check.failures.empty();
    if (!ok) ++failed;
    std::printf("%s [%2d] %s (%.3f s / %.0f s)%s%s\n", ok ? "PASS" : "FAIL", cr.id, cr.title.c_str(), secs,
                cr.limit_seconds, check.note.empty() ? "" : ": ", check.note.c_str());
    for (const auto& f : check.failures) std::printf("       - %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
