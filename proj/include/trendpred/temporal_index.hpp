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

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "trendpred/common.hpp"
#include "trendpred/event_log.hpp"

namespace trendpred {

/// Training cut: predictors see days <= t, ground truth lives in (t, t + future_window].
struct CutSpec {
  Day t = 0;
  Day past_window = 30;
  Day future_window = 30;

  friend bool operator==(const CutSpec&, const CutSpec&) = default;
};

/// Which links enter the exponential decay sum.
enum class DecayScope {
  kAllLinks,    ///< every link up to t
  kPastWindow,  ///< only links in (t - past_window, t]
};

/// Per-item sorted link days, stored contiguously.
///
/// Boundary conventions: degree_at counts days <= t, the past window is
/// (t - T_P, t] and the future window is (t, t + T_F]. With these the windows
/// are disjoint and degree_at(t) + future_gain == degree_at(t + T_F).
///
/// Immutable once built; all queries are const and safe to run concurrently.
class TemporalIndex {
 public:
  /// Throws EmptyInputError for an empty log.
  static TemporalIndex build(const InteractionLog& log);

  Day min_day() const { return min_day_; }
  Day max_day() const { return max_day_; }
  std::size_t n_links() const { return days_.size(); }
  std::size_t n_items() const { return items_.size(); }

  /// Item universe in ascending id order.
  std::span<const ItemId> items() const { return items_; }

  /// Link days of an item, ascending. Empty for unknown items.
  std::span<const Day> days_of(ItemId item) const;

  /// Throws RangeError unless min_day <= t <= max_day and both windows are >= 1.
  void validate(const CutSpec& cut) const;

  /// True when the future window reaches past the last recorded day.
  bool truncated(const CutSpec& cut) const { return cut.t + cut.future_window > max_day_; }

  std::int64_t degree_at(ItemId item, Day t) const;
  std::int64_t past_gain(ItemId item, const CutSpec& cut) const;
  std::int64_t future_gain(ItemId item, const CutSpec& cut) const;

  /// Sum over links with day d <= t of exp(gamma * (d - t)).
  /// kPastWindow restricts the sum to d > t - past_window.
  double decay_weight_sum(ItemId item, Day t, double gamma,
                          DecayScope scope = DecayScope::kAllLinks, Day past_window = 0) const;

  /// Items with at least one link on or before t, ascending.
  std::vector<ItemId> candidate_items(Day t) const;

  /// Binary cache. The stream must be opened in binary mode.
  void save(std::ostream& out) const;
  /// Throws Error on a bad magic, a version mismatch or truncated data.
  static TemporalIndex load(std::istream& in);

  static constexpr std::uint32_t kCacheVersion = 1;

  friend bool operator==(const TemporalIndex&, const TemporalIndex&) = default;

 private:
  std::vector<ItemId> items_;
  std::vector<std::size_t> offsets_;  // items_.size() + 1 entries into days_
  std::vector<Day> days_;
  std::vector<Day> first_day_;  // first link day per item, parallel to items_
  Day min_day_ = 0;
  Day max_day_ = 0;

  // Position of item in items_, or npos.
  std::size_t slot(ItemId item) const;
};

}  // namespace trendpred
