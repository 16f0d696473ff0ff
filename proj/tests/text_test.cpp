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

#include "concatmt/buckets.hpp"
#include "concatmt/kv.hpp"
#include "concatmt/text.hpp"

namespace concatmt {
namespace {

TEST(TextTest, SplitSkipsWhitespaceRuns) {
  const auto t = text::split("  a \t b\r\nc  ");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], "a");
  EXPECT_EQ(t[1], "b");
  EXPECT_EQ(t[2], "c");
  EXPECT_EQ(text::count_tokens("  a  b c "), 3u);
  EXPECT_EQ(text::count_tokens("   "), 0u);
  EXPECT_EQ(text::count_token("a <sep> b <sep>", "<sep>"), 2u);
  EXPECT_EQ(text::count_token("a <sep>x b", "<sep>"), 0u);
}

TEST(TextTest, Utf8Validation) {
  EXPECT_TRUE(text::valid_utf8("plain ascii"));
  EXPECT_TRUE(text::valid_utf8("ミャンマー は"));
  EXPECT_TRUE(text::valid_utf8("\xF0\x9F\x98\x80"));
  EXPECT_FALSE(text::valid_utf8("\xC0\xAF"));          // overlong '/'
  EXPECT_FALSE(text::valid_utf8("\xED\xA0\x80"));      // surrogate
  EXPECT_FALSE(text::valid_utf8("\xE3\x83"));          // truncated
  EXPECT_FALSE(text::valid_utf8("\xFF"));
  EXPECT_FALSE(text::valid_utf8("\xF4\x90\x80\x80"));  // > U+10FFFF
}

TEST(TextTest, RoundHalfEvenOnDecimalExpansion) {
  EXPECT_EQ(text::format_rounded(0.25), "0.2");
  EXPECT_EQ(text::format_rounded(0.35), "0.4");
  EXPECT_EQ(text::format_rounded(26.45), "26.4");
  EXPECT_EQ(text::format_rounded(26.55), "26.6");
  EXPECT_EQ(text::format_rounded(26.5333333), "26.5");
  EXPECT_EQ(text::format_rounded(29.4 - 28.8), "0.6");
  EXPECT_EQ(text::format_rounded(22.3 - 20.1), "2.2");
  EXPECT_EQ(text::format_rounded(9.96), "10.0");
  EXPECT_EQ(text::format_rounded(-0.04), "0.0");
  EXPECT_EQ(text::format_rounded(-1.25), "-1.2");
  EXPECT_EQ(text::format_rounded(100.0), "100.0");
  EXPECT_EQ(text::format_rounded(3.14159, 2), "3.14");
  EXPECT_EQ(text::format_rounded(7.0, 0), "7");
}

TEST(TextTest, FullPrecisionRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 68.72892787909723, 1e-9, 100.0}) {
    EXPECT_EQ(text::parse_number<double>(text::format_full(v), "v"), v);
  }
}

TEST(TextTest, ParseNumberRejectsGarbage) {
  EXPECT_THROW(text::parse_number<int>("12x", "n"), InputError);
  EXPECT_THROW(text::parse_number<int>("", "n"), InputError);
  EXPECT_EQ(text::parse_number<int>(" 42 ", "n"), 42);
}

TEST(KeyValuesTest, ParseAndWritePreserveOrder) {
  const auto kv = KeyValues::parse("# comment\nb = 2\n\na=1\nb=3\n");
  ASSERT_EQ(kv.entries().size(), 2u);
  EXPECT_EQ(kv.entries()[0].first, "b");
  EXPECT_EQ(*kv.get("b"), "3");
  EXPECT_EQ(kv.to_string(), "b=3\na=1\n");
  EXPECT_THROW(KeyValues::parse("novalue\n"), InputError);
  EXPECT_THROW(KeyValues::parse("=x\n"), InputError);
}

TEST(BucketSpecTest, BoundariesAreInclusiveUpperBounds) {
  const auto b = BucketSpec::to70();
  EXPECT_EQ(b.bucket_of(10), 0u);
  EXPECT_EQ(b.bucket_of(11), 1u);
  EXPECT_EQ(b.bucket_of(70), 6u);
  EXPECT_EQ(b.bucket_of(71), 7u);
  EXPECT_EQ(b.bucket_of(100000), 7u);
  EXPECT_FALSE(b.bucket_of(0));
  EXPECT_EQ(b.labels().front(), "1-10");
  EXPECT_EQ(b.labels().back(), "71-");
  EXPECT_TRUE(b.covers_all());
}

TEST(BucketSpecTest, Table3EndsAt200) {
  const auto b = BucketSpec::to200();
  EXPECT_EQ(b.labels()[7], "71-100");
  EXPECT_EQ(b.labels()[8], "101-200");
  EXPECT_EQ(b.bucket_of(200), 8u);
  EXPECT_FALSE(b.bucket_of(201));
  EXPECT_FALSE(b.covers_all());
}

TEST(BucketSpecTest, ParseCustomAndReject) {
  const auto b = BucketSpec::parse("5,15,inf");
  EXPECT_EQ(b.labels(), (std::vector<std::string>{"1-5", "6-15", "16-"}));
  EXPECT_EQ(BucketSpec::parse(b.to_string()), b);
  EXPECT_EQ(BucketSpec::parse("to70"), BucketSpec::to70());
  EXPECT_THROW(BucketSpec::parse("10,10"), InputError);
  EXPECT_THROW(BucketSpec::parse("0,10"), InputError);
  EXPECT_THROW(BucketSpec::parse(""), InputError);
}

}  // namespace
}  // namespace concatmt
