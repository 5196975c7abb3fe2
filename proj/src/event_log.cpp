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

#include "trendpred/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "trendpred/random.hpp"

namespace trendpred {
namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

struct PairHash {
  std::size_t operator()(const std::pair<UserId, ItemId>& p) const noexcept {
    std::uint64_t h = p.first * 0x9E3779B97F4A7C15ULL;
    h ^= p.second + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

template <typename T>
std::optional<T> parse_integer(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// YYYY-MM-DD, optionally followed by [T| ]HH:MM[:SS][Z]. Returns epoch seconds (UTC).
std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_integer<int>(text.substr(0, 4));
  const auto m = parse_integer<unsigned>(text.substr(5, 2));
  const auto d = parse_integer<unsigned>(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m},
                                        std::chrono::day{*d}};
  if (!ymd.ok()) return std::nullopt;
  std::int64_t seconds =
      std::chrono::sys_days{ymd}.time_since_epoch().count() * kSecondsPerDay;
  std::string_view rest = text.substr(10);
  if (rest.empty()) return seconds;
  if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
  rest.remove_prefix(1);
  if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
  if (rest.size() != 5 && rest.size() != 8) return std::nullopt;
  if (rest[2] != ':' || (rest.size() == 8 && rest[5] != ':')) return std::nullopt;
  const auto hh = parse_integer<int>(rest.substr(0, 2));
  const auto mm = parse_integer<int>(rest.substr(3, 2));
  const auto ss = rest.size() == 8 ? parse_integer<int>(rest.substr(6, 2)) : std::optional<int>(0);
  if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;
  return seconds + *hh * 3600 + *mm * 60 + *ss;
}

std::string iso_date(std::int64_t epoch_seconds) {
  const std::chrono::sys_days days{std::chrono::days{floor_div(epoch_seconds, kSecondsPerDay)}};
  const std::chrono::year_month_day ymd{days};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

InteractionLog filtered(const InteractionLog& log, auto&& keep) {
  std::vector<InteractionEvent> events;
  events.reserve(log.events.size());
  std::copy_if(log.events.begin(), log.events.end(), std::back_inserter(events), keep);
  return make_log(std::move(events), log.epoch_label);
}

}  // namespace

Day InteractionLog::min_day() const {
  if (events.empty()) throw EmptyInputError("empty interaction log has no day range");
  return events.front().day;
}

Day InteractionLog::max_day() const {
  if (events.empty()) throw EmptyInputError("empty interaction log has no day range");
  return events.back().day;
}

TimeUnit parse_time_unit(const std::string& name) {
  if (name == "days") return TimeUnit::kDays;
  if (name == "epoch-seconds") return TimeUnit::kEpochSeconds;
  if (name == "iso8601") return TimeUnit::kIso8601;
  throw ContractError("unknown day granularity '" + name + "'");
}

std::string to_string(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::kDays:
      return "days";
    case TimeUnit::kEpochSeconds:
      return "epoch-seconds";
    case TimeUnit::kIso8601:
      return "iso8601";
  }
  return "unknown";
}

InteractionLog make_log(std::vector<InteractionEvent> events, std::string epoch_label) {
  std::stable_sort(events.begin(), events.end(),
                   [](const InteractionEvent& a, const InteractionEvent& b) {
                     return std::tie(a.day, a.user, a.item) < std::tie(b.day, b.user, b.item);
                   });
  std::unordered_set<std::pair<UserId, ItemId>, PairHash> seen;
  std::unordered_set<UserId> users;
  std::unordered_set<ItemId> items;
  InteractionLog log;
  log.epoch_label = std::move(epoch_label);
  log.events.reserve(events.size());
  for (const auto& e : events) {
    if (!seen.emplace(e.user, e.item).second) continue;
    users.insert(e.user);
    items.insert(e.item);
    log.events.push_back(e);
  }
  log.n_users = users.size();
  log.n_items = items.size();
  log.n_links = log.events.size();
  return log;
}

InteractionLog parse_events(std::istream& source, const InputFormat& format) {
  struct RawRecord {
    UserId user;
    ItemId item;
    std::int64_t time;
    std::optional<int> rating;
  };
  std::vector<RawRecord> records;
  std::optional<std::string> label;
  std::size_t min_fields = std::max({format.user_column, format.item_column, format.time_column}) + 1;

  std::string line;
  std::size_t line_no = 0;
  bool header_pending = format.has_header;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      constexpr std::string_view kEpoch = "# epoch=";
      if (view.substr(0, kEpoch.size()) == kEpoch) label = std::string(view.substr(kEpoch.size()));
      continue;
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split(view, format.delimiter);
    if (fields.size() < min_fields) {
      throw ParseError(line_no, "expected at least " + std::to_string(min_fields) +
                                    " fields, found " + std::to_string(fields.size()));
    }
    RawRecord rec{};
    const auto user = parse_integer<UserId>(fields[format.user_column]);
    if (!user) throw ParseError(line_no, "bad user_id '" + std::string(fields[format.user_column]) + "'");
    const auto item = parse_integer<ItemId>(fields[format.item_column]);
    if (!item) throw ParseError(line_no, "bad item_id '" + std::string(fields[format.item_column]) + "'");
    rec.user = *user;
    rec.item = *item;

    const std::string_view time_text = fields[format.time_column];
    std::optional<std::int64_t> time;
    switch (format.time_unit) {
      case TimeUnit::kDays:
        time = parse_integer<std::int64_t>(time_text);
        if (time && *time < 0) throw ParseError(line_no, "negative day index " + std::string(time_text));
        break;
      case TimeUnit::kEpochSeconds:
        time = parse_integer<std::int64_t>(time_text);
        break;
      case TimeUnit::kIso8601:
        time = parse_iso8601(time_text);
        break;
    }
    if (!time) {
      throw ParseError(line_no, "bad timestamp '" + std::string(time_text) + "' for granularity " +
                                    to_string(format.time_unit));
    }
    rec.time = *time;

    if (format.rating_column && *format.rating_column < fields.size() &&
        !fields[*format.rating_column].empty()) {
      const auto rating = parse_integer<int>(fields[*format.rating_column]);
      if (!rating || *rating < 1 || *rating > 5) {
        throw ParseError(line_no, "rating '" + std::string(fields[*format.rating_column]) +
                                      "' is not an integer in [1,5]");
      }
      rec.rating = *rating;
    }
    records.push_back(rec);
  }
  if (records.empty()) throw EmptyInputError("interaction source contains no records");

  std::vector<InteractionEvent> events;
  events.reserve(records.size());
  if (format.time_unit == TimeUnit::kDays) {
    for (const auto& r : records) events.push_back({r.user, r.item, r.time, r.rating});
    if (!label) label = "day-index";
  } else {
    const std::int64_t origin =
        std::min_element(records.begin(), records.end(), [](const auto& a, const auto& b) {
          return a.time < b.time;
        })->time;
    for (const auto& r : records) {
      events.push_back({r.user, r.item, floor_div(r.time - origin, kSecondsPerDay), r.rating});
    }
    if (!label) {
      label = "origin " + std::to_string(origin) + "s (" + iso_date(origin) + ")";
    }
  }
  return make_log(std::move(events), *label);
}

InteractionLog parse_events_string(const std::string& text, const InputFormat& format) {
  std::istringstream in(text);
  return parse_events(in, format);
}

InputFormat canonical_format() {
  InputFormat format;
  format.time_unit = TimeUnit::kDays;
  return format;
}

void write_canonical(std::ostream& out, const InteractionLog& log) {
  out << "# epoch=" << log.epoch_label << '\n';
  for (const auto& e : log.events) {
    out << e.user << ',' << e.item << ',' << e.day;
    if (e.rating) out << ',' << *e.rating;
    out << '\n';
  }
}

InteractionLog apply_rating_filter(const InteractionLog& log,
                                   std::optional<int> min_rating_exclusive) {
  if (!min_rating_exclusive) return log;
  const int threshold = *min_rating_exclusive;
  for (const auto& e : log.events) {
    if (!e.rating) {
      throw ContractError("rating filter enabled but event (user " + std::to_string(e.user) +
                          ", item " + std::to_string(e.item) + ") has no rating");
    }
  }
  return filtered(log, [threshold](const InteractionEvent& e) { return *e.rating > threshold; });
}

InteractionLog apply_min_user_activity(const InteractionLog& log, std::size_t min_events,
                                       const InteractionLog* count_basis) {
  if (min_events == 0) return log;
  std::unordered_map<UserId, std::size_t> counts;
  for (const auto& e : (count_basis ? *count_basis : log).events) ++counts[e.user];
  return filtered(log, [&](const InteractionEvent& e) {
    const auto it = counts.find(e.user);
    return it != counts.end() && it->second >= min_events;
  });
}

InteractionLog remove_self_links(const InteractionLog& log,
                                 const std::map<ItemId, UserId>& ownership) {
  for (const auto& e : log.events) {
    if (!ownership.contains(e.item)) {
      throw ContractError("item " + std::to_string(e.item) + " has no owner in the ownership map");
    }
  }
  return filtered(log, [&](const InteractionEvent& e) { return ownership.at(e.item) != e.user; });
}

InteractionLog sample_users(const InteractionLog& log, std::size_t count, std::uint64_t seed) {
  std::set<UserId> all;
  for (const auto& e : log.events) all.insert(e.user);
  if (count >= all.size()) return log;
  const std::vector<UserId> ordered(all.begin(), all.end());
  Random rng(seed);
  std::unordered_set<UserId> keep;
  for (const auto idx : rng.sample_without_replacement(ordered.size(), count)) {
    keep.insert(ordered[idx]);
  }
  return filtered(log, [&](const InteractionEvent& e) { return keep.contains(e.user); });
}

std::map<ItemId, UserId> parse_ownership(std::istream& source) {
  std::map<ItemId, UserId> ownership;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split(view, ',');
    if (fields.size() != 2) throw ParseError(line_no, "expected item_id,owner_user_id");
    const auto item = parse_integer<ItemId>(fields[0]);
    const auto owner = parse_integer<UserId>(fields[1]);
    if (!item || !owner) throw ParseError(line_no, "bad ownership record");
    ownership[*item] = *owner;
  }
  return ownership;
}

InteractionLog preprocess(const InteractionLog& log, const PreprocessOptions& options) {
  InteractionLog out = apply_rating_filter(log, options.min_rating_exclusive);
  out = apply_min_user_activity(out, options.min_user_events,
                                options.count_activity_before_rating_filter ? &log : nullptr);
  if (options.sample_users) out = sample_users(out, *options.sample_users, options.seed);
  if (options.ownership) out = remove_self_links(out, *options.ownership);
  return out;
}

}  // namespace trendpred
