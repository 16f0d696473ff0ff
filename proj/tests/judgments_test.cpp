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

#include "concatmt/judgments.hpp"
#include "support/reference_tables.hpp"

namespace concatmt {
namespace {

TEST(JudgmentSetTest, ParseAndRoundTrip) {
  const auto set = JudgmentSet::parse(
      "item_id,source_len,dimension,verdict\n"
      "# comment\n"
      "a,12,adequacy,win\n"
      "a,12,fluency,tie\n"
      "b,3,adequacy,lose\n");
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set.records()[2].verdict, Verdict::Lose);
  EXPECT_EQ(JudgmentSet::parse(set.to_csv()).to_csv(), set.to_csv());
}

TEST(JudgmentSetTest, RejectsMalformedInput) {
  const std::string h = "item_id,source_len,dimension,verdict\n";
  EXPECT_THROW(JudgmentSet::parse("a,1,adequacy,win\n"), InputError);
  EXPECT_THROW(JudgmentSet::parse(h + "a,1,adequacy,win\na,2,adequacy,lose\n"), InputError);
  EXPECT_THROW(JudgmentSet::parse(h + "a,x,adequacy,win\n"), InputError);
  EXPECT_THROW(JudgmentSet::parse(h + "a,1,style,win\n"), InputError);
  EXPECT_THROW(JudgmentSet::parse(h + "a,1,adequacy,draw\n"), InputError);
  EXPECT_THROW(JudgmentSet::parse(h + "a,1,adequacy\n"), InputError);
  EXPECT_EQ(JudgmentSet::parse(h).size(), 0u);
}

TEST(TallyTest, ReferenceRowsSumToOverall) {
  const auto set = JudgmentSet::parse(reference::judgment_csv());
  const auto t = tally_judgments(set, BucketSpec::to50());
  ASSERT_EQ(t.labels.size(), 6u);
  EXPECT_EQ(t.labels.back(), "51-");
  for (std::size_t b = 0; b < 6; ++b) {
    for (std::size_t d = 0; d < 2; ++d) {
      const auto& vc = t.at(b, static_cast<Dimension>(d));
      for (std::size_t v = 0; v < 3; ++v) EXPECT_EQ(vc.counts[v], reference::kJudgmentRows[b][d * 3 + v]);
    }
  }
  const auto& a = t.total(Dimension::Adequacy);
  const auto& f = t.total(Dimension::Fluency);
  EXPECT_EQ(a.win(), 97u);
  EXPECT_EQ(a.tie(), 111u);
  EXPECT_EQ(a.lose(), 93u);
  EXPECT_EQ(f.win(), 87u);
  EXPECT_EQ(f.tie(), 136u);
  EXPECT_EQ(f.lose(), 78u);
  EXPECT_EQ(t.uncovered, 0u);
}

TEST(TallyTest, UncoveredLengthsStillCountOverall) {
  JudgmentSet set;
  set.add({"a", 250, Dimension::Adequacy, Verdict::Win});
  set.add({"b", 0, Dimension::Adequacy, Verdict::Tie});
  const auto t = tally_judgments(set, BucketSpec::to200());
  EXPECT_EQ(t.uncovered, 2u);
  EXPECT_EQ(t.total(Dimension::Adequacy).total(), 2u);
}

}  // namespace
}  // namespace concatmt
