/*
 * Copyright 2026 The trendpred Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "trendpred/temporal_index.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"

namespace trendpred {
namespace {

// Item 100 has links on days 1, 5, 9; item 200 on day 3.
InteractionLog fixture_log() {
  return make_log({{1, 100, 1, {}}, {2, 100, 5, {}}, {3, 100, 9, {}}, {1, 200, 3, {}}});
}

TEST(TemporalIndexTest, BuildsSortedPerItemLists) {
  const auto index = TemporalIndex::build(
      make_log({{1, 'a', 4, {}}, {2, 'a', 2, {}}, {3, 'b', 7, {}}}));
  ASSERT_EQ(index.n_items(), 2u);
  const auto a = index.days_of('a');
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0], 2);
  EXPECT_EQ(a[1], 4);
  EXPECT_EQ(index.days_of('b').size(), 1u);
  EXPECT_EQ(index.n_links(), 3u);
  EXPECT_EQ(index.min_day(), 2);
  EXPECT_EQ(index.max_day(), 7);
}

TEST(TemporalIndexTest, SingleEventRange) {
  const auto index = TemporalIndex::build(make_log({{1, 1, 6, {}}}));
  EXPECT_EQ(index.min_day(), 6);
  EXPECT_EQ(index.max_day(), 6);
}

TEST(TemporalIndexTest, EmptyLogIsAnError) {
  EXPECT_THROW(TemporalIndex::build(InteractionLog{}), EmptyInputError);
}

TEST(DegreeAtTest, InclusiveBoundary) {
  const auto index = TemporalIndex::build(fixture_log());
  EXPECT_EQ(index.degree_at(100, 5), 2);
  EXPECT_EQ(index.degree_at(100, 0), 0);
  EXPECT_EQ(index.degree_at(100, index.max_day()), 3);
  EXPECT_EQ(index.degree_at(999, 9), 0);
}

TEST(PastGainTest, WindowArithmetic) {
  const auto index = TemporalIndex::build(fixture_log());
  EXPECT_EQ(index.past_gain(100, CutSpec{9, 5, 1}), 2);
  // Window reaching before the first link covers the whole history.
  EXPECT_EQ(index.past_gain(100, CutSpec{9, 9, 1}), index.degree_at(100, 9));
  EXPECT_EQ(index.past_gain(200, CutSpec{9, 5, 1}), 0);
}

TEST(FutureGainTest, HalfOpenWindow) {
  const auto index = TemporalIndex::build(fixture_log());
  EXPECT_EQ(index.future_gain(100, CutSpec{5, 1, 4}), 1);
  EXPECT_EQ(index.future_gain(200, CutSpec{5, 1, 4}), 0);
  EXPECT_FALSE(index.truncated(CutSpec{5, 1, 4}));
  EXPECT_TRUE(index.truncated(CutSpec{6, 1, 4}));
}

TEST(DecayWeightSumTest, GammaZeroCountsLinks) {
  const auto index = TemporalIndex::build(fixture_log());
  EXPECT_EQ(index.decay_weight_sum(100, 9, 0.0), 3.0);
}

TEST(DecayWeightSumTest, LinkAtCutWeighsOne) {
  const auto index = TemporalIndex::build(make_log({{1, 1, 4, {}}}));
  for (const double gamma : {0.0, 0.1, 1.0, 50.0}) {
    EXPECT_EQ(index.decay_weight_sum(1, 4, gamma), 1.0);
  }
}

TEST(DecayWeightSumTest, HandEvaluatedExample) {
  const auto index = TemporalIndex::build(make_log({{1, 1, 1, {}}, {2, 1, 9, {}}}));
  // exp(-0.9) + exp(-0.1), evaluated independently.
  EXPECT_NEAR(index.decay_weight_sum(1, 10, 0.1), 1.3114070777765585, 1e-15);
}

TEST(DecayWeightSumTest, WindowedVariant) {
  const auto index = TemporalIndex::build(make_log({{1, 1, 1, {}}, {2, 1, 9, {}}}));
  EXPECT_NEAR(index.decay_weight_sum(1, 10, 0.1, DecayScope::kPastWindow, 5), std::exp(-0.1),
              1e-15);
  EXPECT_THROW(index.decay_weight_sum(1, 10, -0.1), ContractError);
}

TEST(CandidateItemsTest, Basics) {
  const auto index = TemporalIndex::build(fixture_log());
  EXPECT_TRUE(index.candidate_items(0).empty());
  EXPECT_EQ(index.candidate_items(2), std::vector<ItemId>{100});
  EXPECT_EQ(index.candidate_items(index.max_day()), (std::vector<ItemId>{100, 200}));
}

TEST(CutValidationTest, RejectsOutOfRange) {
  const auto index = TemporalIndex::build(fixture_log());
  EXPECT_NO_THROW(index.validate(CutSpec{1, 1, 1}));
  EXPECT_THROW(index.validate(CutSpec{0, 1, 1}), RangeError);
  EXPECT_THROW(index.validate(CutSpec{10, 1, 1}), RangeError);
  EXPECT_THROW(index.validate(CutSpec{5, 0, 1}), RangeError);
  EXPECT_THROW(index.validate(CutSpec{5, 1, 0}), RangeError);
}

TEST(IndexCacheTest, RoundTripsAndRejectsVersions) {
  Random rng(21);
  const auto log = oracle::random_log(rng, 80, 10, 12, 40);
  const auto index = TemporalIndex::build(log);
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  index.save(buf);
  const std::string bytes = buf.str();
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_EQ(TemporalIndex::load(in), index);

  std::string wrong_version = bytes;
  wrong_version[8] = 2;
  std::istringstream bad(wrong_version, std::ios::binary);
  EXPECT_THROW(TemporalIndex::load(bad), Error);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3), std::ios::binary);
  EXPECT_THROW(TemporalIndex::load(truncated), Error);

  std::istringstream junk("not an index", std::ios::binary);
  EXPECT_THROW(TemporalIndex::load(junk), Error);
}

// ============================================================================
// Properties against the linear-scan oracle
// ============================================================================

TEST(TemporalIndexPropertyTest, QueriesMatchLinearScan) {
  Random rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto log = oracle::random_log(rng, 50, 8, 10, 30);
    const auto index = TemporalIndex::build(log);
    std::size_t total = 0;
    for (const ItemId item : index.items()) total += index.days_of(item).size();
    ASSERT_EQ(total, log.n_links);

    for (Day t = index.min_day() - 1; t <= index.max_day() + 1; ++t) {
      const auto cands = index.candidate_items(t);
      const auto expect = oracle::candidates(log, t);
      ASSERT_EQ(std::set<ItemId>(cands.begin(), cands.end()), expect);
      for (ItemId item = 0; item < 10; ++item) {
        ASSERT_EQ(index.degree_at(item, t), oracle::degree(log, item, t));
        const Day tp = 1 + static_cast<Day>(rng.below(10));
        const Day tf = 1 + static_cast<Day>(rng.below(10));
        ASSERT_EQ(index.past_gain(item, CutSpec{t, tp, tf}),
                  oracle::window_count(log, item, t - tp, t));
        ASSERT_EQ(index.future_gain(item, CutSpec{t, tp, tf}),
                  oracle::window_count(log, item, t, t + tf));
        const double gamma = rng.uniform();
        ASSERT_NEAR(index.decay_weight_sum(item, t, gamma), oracle::decay_sum(log, item, t, gamma),
                    1e-12);
      }
    }
  }
}

TEST(TemporalIndexPropertyTest, MonotoneAndDecomposes) {
  Random rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto log = oracle::random_log(rng, 50, 8, 10, 30);
    const auto index = TemporalIndex::build(log);
    for (const ItemId item : index.items()) {
      for (Day t = index.min_day(); t <= index.max_day(); ++t) {
        ASSERT_LE(index.degree_at(item, t - 1), index.degree_at(item, t));
        for (Day tf = 1; tf <= 8; ++tf) {
          ASSERT_EQ(index.degree_at(item, t) + index.future_gain(item, CutSpec{t, 1, tf}),
                    index.degree_at(item, t + tf));
        }
        ASSERT_EQ(index.decay_weight_sum(item, t, 0.0),
                  static_cast<double>(index.degree_at(item, t)));
        double previous = index.decay_weight_sum(item, t, 0.0);
        for (const double gamma : {0.05, 0.1, 0.5, 1.0, 3.0}) {
          const double current = index.decay_weight_sum(item, t, gamma);
          ASSERT_LE(current, previous);
          previous = current;
        }
      }
    }
  }
}

}  // namespace
}  // namespace trendpred
