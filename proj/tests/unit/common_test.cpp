// Copyright 2026 The s3grl Authors.
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

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "s3grl/common.hpp"

namespace s3grl {
namespace {

std::uint64_t fnv_of(const std::string& s) {
  Fnv1a64 h;
  h.update({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  return h.digest();
}

TEST(Fnv1a64, PublishedVectors) {
  EXPECT_EQ(fnv_of(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv_of("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv_of("foobar"), 0x85944171f73967e8ULL);
}

TEST(Fnv1a64, HexIsSixteenLowercaseDigits) {
  EXPECT_EQ(to_hex(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
  EXPECT_EQ(to_hex(1), "0000000000000001");
}

TEST(SplitMix, ReferenceOutput) {
  // First output of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs |= x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(7);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto x = rng.below(7);
    ASSERT_LT(x, 7U);
    ++counts[x];
  }
  for (int c : counts) EXPECT_GT(c, 800);
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(3);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / 10000.0, 0.5, 0.02);
}

TEST(Shuffle, IsAPermutationAndSeeded) {
  std::vector<int> a(50), b;
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(5), r2(5);
  shuffle(a, r1);
  shuffle(b, r2);
  EXPECT_EQ(a, b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(MixSeed, DistinguishesStreams) {
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
  EXPECT_NE(mix_seed(0, 0, 1), mix_seed(0, 0, 2));
  EXPECT_EQ(mix_seed(9, 8, 7), mix_seed(9, 8, 7));
}

TEST(Edge, NormalizedOrdersEndpoints) {
  EXPECT_EQ((Edge{5, 2}.normalized()), (Edge{2, 5}));
  EXPECT_EQ((Edge{2, 5}.normalized()), (Edge{2, 5}));
}

TEST(ParseError, CarriesLineNumber) {
  const ParseError e("bad", 12);
  EXPECT_EQ(e.line(), 12U);
  EXPECT_NE(std::string(e.what()).find("line 12"), std::string::npos);
}

}  // namespace
}  // namespace s3grl
