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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <map>

namespace trendpred {
namespace {

constexpr std::array<char, 8> kMagic = {'T', 'P', 'I', 'D', 'X', '\0', '\0', '\0'};
constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw Error("index cache truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

TemporalIndex TemporalIndex::build(const InteractionLog& log) {
  if (log.events.empty()) throw EmptyInputError("cannot index an empty interaction log");
  std::map<ItemId, std::vector<Day>> per_item;
  for (const auto& e : log.events) per_item[e.item].push_back(e.day);

  TemporalIndex index;
  index.items_.reserve(per_item.size());
  index.offsets_.reserve(per_item.size() + 1);
  index.days_.reserve(log.events.size());
  index.offsets_.push_back(0);
  for (auto& [item, days] : per_item) {
    std::sort(days.begin(), days.end());
    index.items_.push_back(item);
    index.first_day_.push_back(days.front());
    index.days_.insert(index.days_.end(), days.begin(), days.end());
    index.offsets_.push_back(index.days_.size());
  }
  const auto [lo, hi] = std::minmax_element(index.days_.begin(), index.days_.end());
  index.min_day_ = *lo;
  index.max_day_ = *hi;
  return index;
}

std::size_t TemporalIndex::slot(ItemId item) const {
  const auto it = std::lower_bound(items_.begin(), items_.end(), item);
  if (it == items_.end() || *it != item) return kNpos;
  return static_cast<std::size_t>(it - items_.begin());
}

std::span<const Day> TemporalIndex::days_of(ItemId item) const {
  const std::size_t s = slot(item);
  if (s == kNpos) return {};
  return std::span<const Day>(days_).subspan(offsets_[s], offsets_[s + 1] - offsets_[s]);
}

void TemporalIndex::validate(const CutSpec& cut) const {
  if (cut.t < min_day_ || cut.t > max_day_) {
    throw RangeError("cut day " + std::to_string(cut.t) + " outside data range [" +
                     std::to_string(min_day_) + ", " + std::to_string(max_day_) + "]");
  }
  if (cut.past_window < 1) throw RangeError("past window must be at least 1 day");
  if (cut.future_window < 1) throw RangeError("future window must be at least 1 day");
}

std::int64_t TemporalIndex::degree_at(ItemId item, Day t) const {
  const auto days = days_of(item);
  return std::upper_bound(days.begin(), days.end(), t) - days.begin();
}

std::int64_t TemporalIndex::past_gain(ItemId item, const CutSpec& cut) const {
  return degree_at(item, cut.t) - degree_at(item, cut.t - cut.past_window);
}

std::int64_t TemporalIndex::future_gain(ItemId item, const CutSpec& cut) const {
  return degree_at(item, cut.t + cut.future_window) - degree_at(item, cut.t);
}

double TemporalIndex::decay_weight_sum(ItemId item, Day t, double gamma, DecayScope scope,
                                       Day past_window) const {
  if (gamma < 0.0) throw ContractError("decay rate gamma must be nonnegative");
  const auto days = days_of(item);
  auto begin = days.begin();
  const auto end = std::upper_bound(days.begin(), days.end(), t);
  if (scope == DecayScope::kPastWindow) begin = std::upper_bound(days.begin(), end, t - past_window);
  if (gamma == 0.0) return static_cast<double>(end - begin);
  double sum = 0.0;
  for (auto it = begin; it != end; ++it) sum += std::exp(gamma * static_cast<double>(*it - t));
  return sum;
}

std::vector<ItemId> TemporalIndex::candidate_items(Day t) const {
  std::vector<ItemId> out;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (first_day_[i] <= t) out.push_back(items_[i]);
  }
  return out;
}

void TemporalIndex::save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, kCacheVersion);
  put_u64(out, items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    put_u64(out, items_[i]);
    put_u64(out, offsets_[i + 1] - offsets_[i]);
    Day previous = 0;
    for (std::size_t j = offsets_[i]; j < offsets_[i + 1]; ++j) {
      put_u64(out, static_cast<std::uint64_t>(days_[j] - previous));
      previous = days_[j];
    }
  }
  if (!out) throw Error("failed writing index cache");
}

TemporalIndex TemporalIndex::load(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error("not a temporal index cache");
  }
  const std::uint64_t version = get_u64(in);
  if (version != kCacheVersion) {
    throw Error("index cache version " + std::to_string(version) + " unsupported (expected " +
                std::to_string(kCacheVersion) + ")");
  }
  const std::uint64_t n_items = get_u64(in);
  TemporalIndex index;
  index.offsets_.push_back(0);
  for (std::uint64_t i = 0; i < n_items; ++i) {
    const ItemId item = get_u64(in);
    const std::uint64_t count = get_u64(in);
    if (count == 0) throw Error("index cache holds an item without links");
    if (!index.items_.empty() && item <= index.items_.back()) {
      throw Error("index cache items out of order");
    }
    Day day = 0;
    for (std::uint64_t j = 0; j < count; ++j) {
      day += static_cast<Day>(get_u64(in));
      index.days_.push_back(day);
    }
    index.items_.push_back(item);
    index.first_day_.push_back(index.days_[index.offsets_.back()]);
    index.offsets_.push_back(index.days_.size());
  }
  if (index.days_.empty()) throw EmptyInputError("index cache is empty");
  const auto [lo, hi] = std::minmax_element(index.days_.begin(), index.days_.end());
  index.min_day_ = *lo;
  index.max_day_ = *hi;
  return index;
}

}  // namespace trendpred
