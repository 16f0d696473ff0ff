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

#include <gtest/gtest.h>

#include <random>

#include "concatmt/bleu.hpp"
#include "support/bleu_oracle.hpp"
#include "support/fixtures.hpp"

namespace concatmt {
namespace {

using Lines = std::vector<std::string>;

BleuReport bleu(const Lines& h, const Lines& r, BleuOptions o = {}) { return corpus_bleu(h, r, o); }

// Values computed by hand from the n-gram tables.
TEST(BleuTest, FrozenClippingExample) {
  const auto r = bleu({"the the the the the the the"}, {"the cat is on the mat"});
  EXPECT_DOUBLE_EQ(r.precisions[0], 2.0 / 7.0);
  EXPECT_EQ(r.precisions[1], 0.0);
  EXPECT_EQ(r.bp, 1.0);
  EXPECT_EQ(r.overall, 0.0);
}

TEST(BleuTest, FrozenBrevityPenaltyExample) {
  const auto r = bleu({"a b c d", "w x y z"}, {"a b c d e f", "w x y z q"});
  EXPECT_NEAR(r.bp, std::exp(1.0 - 11.0 / 8.0), 1e-15);
  EXPECT_NEAR(r.overall, 68.72892787909723, 1e-9);
}

TEST(BleuTest, FrozenPartialMatchExample) {
  const auto r = bleu({"a b c d e f", "p q r s t"}, {"a b c d x f", "p q r s t u v"});
  EXPECT_NEAR(r.precisions[0], 10.0 / 11.0, 1e-15);
  EXPECT_NEAR(r.precisions[1], 7.0 / 9.0, 1e-15);
  EXPECT_NEAR(r.precisions[2], 5.0 / 7.0, 1e-15);
  EXPECT_NEAR(r.precisions[3], 3.0 / 5.0, 1e-15);
  EXPECT_NEAR(r.bp, 0.8337529180751805, 1e-15);
  EXPECT_NEAR(r.overall, 61.859852760686344, 1e-9);
}

TEST(BleuTest, IdentityIsExactlyHundred) {
  std::mt19937_64 gen(17);
  for (int k = 0; k < 50; ++k) {
    Lines h;
    for (int i = 0; i < 1 + k % 9; ++i) h.push_back(fixtures::random_sentence(gen, 1 + gen() % 12));
    EXPECT_EQ(bleu(h, h).overall, 100.0);
  }
  EXPECT_EQ(bleu({"one"}, {"one"}).overall, 100.0);
}

TEST(BleuTest, EmptyHypothesesScoreZero) {
  const auto r = bleu({"", ""}, {"a b", "c"});
  EXPECT_EQ(r.overall, 0.0);
  EXPECT_EQ(r.bp, 0.0);
  EXPECT_THROW(bleu({}, {}), InputError);
  EXPECT_THROW(bleu({"a"}, {"a", "b"}), InputError);
}

TEST(BleuTest, AddOneSmoothingRescuesZeroHigherOrders) {
  const Lines h{"a b x y"};
  const Lines r{"a b c d"};
  EXPECT_EQ(bleu(h, r).overall, 0.0);
  const auto s = bleu(h, r, {4, Smoothing::AddOne});
  // p1 = 2/4, p2 = (1+1)/(3+1), p3 = 1/3, p4 = 1/2
  EXPECT_NEAR(s.overall, 100.0 * std::pow(0.5 * 0.5 * (1.0 / 3.0) * 0.5, 0.25), 1e-12);
}

TEST(BleuTest, MatchesOracleOnRandomCorpora) {
  std::mt19937_64 gen(99);
  for (int k = 0; k < 200; ++k) {
    Lines h;
    Lines r;
    const int n = 1 + static_cast<int>(gen() % 20);
    for (int i = 0; i < n; ++i) {
      const std::size_t vocab = 2 + gen() % 6;  // small vocabularies force repeats
      h.push_back(fixtures::random_sentence(gen, gen() % 15, vocab));
      r.push_back(fixtures::random_sentence(gen, 1 + gen() % 15, vocab));
    }
    for (int order : {1, 2, 4, 5}) {
      const auto want = oracle::bleu(h, r, static_cast<std::size_t>(order));
      const auto got = bleu(h, r, {order, Smoothing::None});
      EXPECT_NEAR(got.overall, want.score, 1e-9) << k;
      EXPECT_NEAR(got.bp, want.bp, 1e-12) << k;
    }
  }
}

TEST(BleuTest, WideVocabularyMatchesOracle) {
  // More than 65536 distinct words in one pair.
  std::string hyp;
  std::string ref;
  for (int i = 0; i < 70000; ++i) {
    hyp += "h" + std::to_string(i % 69000) + " ";
    ref += "h" + std::to_string((i * 7) % 70000) + " ";
  }
  hyp += "a b c d";
  ref += "a b c d";
  const Lines h{hyp, "x y"};
  const Lines r{ref, "x y"};
  const auto want = oracle::bleu(h, r, 4);
  EXPECT_NEAR(bleu(h, r, {4, Smoothing::None}).overall, want.score, 1e-9);
}

TEST(BleuTest, StatsAreAdditive) {
  NgramMatcher m;
  BleuStats a = m.stats("a b c", "a b d");
  const BleuStats b = m.stats("x y", "x y z");
  a += b;
  EXPECT_EQ(a.hyp_len, 5u);
  EXPECT_EQ(a.ref_len, 6u);
  EXPECT_EQ(a.matches[0], 4u);
  EXPECT_EQ(a.matches[1], 2u);
  EXPECT_EQ(a.sentences, 2u);
}

TEST(BucketedBleuTest, BucketsScoredFromTheirOwnStats) {
  const Lines src{"s", "s s s s s s s s s s s", "s s"};
  const Lines hyp{"a b c d", "p q", "a b c d"};
  const Lines ref{"a b c d", "x y", "a b c d"};
  const auto spec = BucketSpec::parse("10,inf");
  const auto r = bucketed_bleu(hyp, ref, src, spec);
  ASSERT_EQ(r.per_bucket.size(), 2u);
  EXPECT_EQ(r.per_bucket[0].count, 2u);
  EXPECT_EQ(*r.per_bucket[0].score, 100.0);
  EXPECT_EQ(*r.per_bucket[1].score, 0.0);
  EXPECT_NEAR(r.overall, bleu(hyp, ref).overall, 1e-12);
}

TEST(BucketedBleuTest, EmptyBucketHasNoScoreAndUncoveredIsCounted) {
  const Lines src{"s s", std::string(300, 's')};
  Lines src2 = src;
  src2[1].clear();
  for (int i = 0; i < 201; ++i) src2[1] += "s ";
  const Lines hyp{"a b", "c d"};
  const auto r = bucketed_bleu(hyp, hyp, src2, BucketSpec::to200());
  EXPECT_EQ(r.uncovered, 1u);
  EXPECT_EQ(r.count, 2u);
  EXPECT_FALSE(r.per_bucket[3].score.has_value());
  EXPECT_EQ(r.per_bucket[0].count, 1u);
}

TEST(AverageRunsTest, MeanOfScoresPerBucket) {
  const auto spec = BucketSpec::parse("2,inf");
  const Lines src{"a", "a b c"};
  const Lines ref{"x y z w", "p q r s"};
  const auto r1 = bucketed_bleu(Lines{"x y z w", "p q r s"}, ref, src, spec);
  const auto r2 = bucketed_bleu(Lines{"x y z w", "p q k s"}, ref, src, spec);
  const auto avg = average_runs(std::vector<BleuReport>{r1, r2});
  EXPECT_NEAR(avg.overall, (r1.overall + r2.overall) / 2, 1e-12);
  EXPECT_NEAR(*avg.per_bucket[1].score, (*r1.per_bucket[1].score + *r2.per_bucket[1].score) / 2,
              1e-12);
  const auto other = bucketed_bleu(Lines{"x"}, Lines{"x"}, Lines{"a"}, spec);
  EXPECT_THROW(average_runs(std::vector<BleuReport>{r1, other}), InputError);
  EXPECT_THROW(average_runs(std::vector<BleuReport>{}), InputError);
}

BleuReport fixed(double overall, std::vector<std::optional<double>> scores) {
  BleuReport r;
  r.overall = overall;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    r.per_bucket.push_back({"b" + std::to_string(i), scores[i] ? 1u : 0u, scores[i]});
  }
  return r;
}

TEST(DiffTest, SubtractsAndKeepsAbsent) {
  const auto a = fixed(29.4, {1.0, std::nullopt, 3.5});
  const auto b = fixed(28.8, {0.5, std::nullopt, 4.0});
  const auto d = diff_by_bucket(a, b);
  EXPECT_NEAR(d.overall, 0.6, 1e-12);
  EXPECT_EQ(d.per_bucket[0], 0.5);
  EXPECT_FALSE(d.per_bucket[1]);
  EXPECT_EQ(d.per_bucket[2], -0.5);
  const auto e = diff_by_bucket(b, a);
  EXPECT_EQ(e.overall, -d.overall);
  EXPECT_EQ(*e.per_bucket[2], -*d.per_bucket[2]);
  EXPECT_THROW(diff_by_bucket(a, fixed(1, {1.0})), InputError);
}

TEST(ReportCsvTest, RoundTripsAtFullPrecision) {
  const Lines src{"a b", "a b c d e f g h i j k l"};
  const Lines hyp{"x y z", "p q r s"};
  const Lines ref{"x y z w", "p q r t"};
  const auto r = bucketed_bleu(hyp, ref, src, BucketSpec::to70());
  KeyValues meta;
  meta.set("system", "demo");
  const auto csv = report_to_csv(r, meta);
  EXPECT_NE(csv.find("bucket,count,score\nall,2,"), std::string::npos);
  EXPECT_NE(csv.find("\n21-30,0,\n"), std::string::npos);
  KeyValues back_meta;
  const auto back = report_from_csv(csv, &back_meta);
  EXPECT_EQ(back.overall, r.overall);
  EXPECT_EQ(back.bp, r.bp);
  EXPECT_EQ(back.precisions, r.precisions);
  EXPECT_EQ(back.labels(), r.labels());
  EXPECT_EQ(*back_meta.get("system"), "demo");
  for (std::size_t i = 0; i < r.per_bucket.size(); ++i) {
    EXPECT_EQ(back.per_bucket[i].score, r.per_bucket[i].score);
    EXPECT_EQ(back.per_bucket[i].count, r.per_bucket[i].count);
  }
  EXPECT_THROW(report_from_csv("a,b,c\n"), InputError);
  EXPECT_THROW(report_from_csv("bucket,count,score\n1-10,1,2\n"), InputError);
}

}  // namespace
}  // namespace concatmt
