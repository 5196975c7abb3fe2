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

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trendpred/common.hpp"

namespace trendpred {

struct InteractionEvent {
  UserId user = 0;
  ItemId item = 0;
  Day day = 0;
  std::optional<int> rating;

  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

/// Chronologically ordered user-item links with at most one link per (user, item).
///
/// Events are sorted by (day, user, item). Build through make_log() or one of
/// the parse/filter functions below; they keep the counts consistent.
struct InteractionLog {
  std::vector<InteractionEvent> events;
  std::string epoch_label;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t n_links = 0;

  bool empty() const { return events.empty(); }
  Day min_day() const;
  Day max_day() const;

  friend bool operator==(const InteractionLog&, const InteractionLog&) = default;
};

enum class TimeUnit {
  kDays,          ///< column already holds a day index; copied verbatim
  kEpochSeconds,  ///< rebased to the earliest event, floor division by 86400
  kIso8601,       ///< YYYY-MM-DD with optional THH:MM:SS[Z]; rebased like epoch seconds
};

TimeUnit parse_time_unit(const std::string& name);
std::string to_string(TimeUnit unit);

/// Column layout of a raw interaction file. Column indices are 0-based.
struct InputFormat {
  char delimiter = ',';
  bool has_header = false;
  TimeUnit time_unit = TimeUnit::kEpochSeconds;
  std::size_t user_column = 0;
  std::size_t item_column = 1;
  std::size_t time_column = 2;
  /// Unset means the file carries no rating. When set, a line may still omit
  /// the trailing rating field.
  std::optional<std::size_t> rating_column = 3;
};

/// Sorts, deduplicates (earliest link per pair wins) and recounts.
InteractionLog make_log(std::vector<InteractionEvent> events, std::string epoch_label = {});

/// Parses a line-oriented interaction file into a canonical log.
///
/// Blank lines are skipped, as are lines starting with '#'; a comment of the
/// form `# epoch=<label>` sets the epoch label. Throws ParseError naming the
/// line for malformed records and EmptyInputError when no record is found.
InteractionLog parse_events(std::istream& source, const InputFormat& format);
InteractionLog parse_events_string(const std::string& text, const InputFormat& format);

/// Writes `user_id,item_id,day[,rating]` lines preceded by the epoch comment.
/// Reading the result back with the default canonical_format() reproduces
/// the log exactly.
void write_canonical(std::ostream& out, const InteractionLog& log);
InputFormat canonical_format();

/// Keeps events whose rating exceeds the threshold; unset threshold disables
/// the filter. Throws ContractError if an event lacks a rating while enabled.
InteractionLog apply_rating_filter(const InteractionLog& log,
                                   std::optional<int> min_rating_exclusive);

/// Removes every event of users with fewer than min_events events. Single pass.
/// If count_basis is given, activity is counted there instead of in log.
InteractionLog apply_min_user_activity(const InteractionLog& log, std::size_t min_events,
                                       const InteractionLog* count_basis = nullptr);

/// Drops links from a user to an item that user owns (e.g. a post on their own wall).
InteractionLog remove_self_links(const InteractionLog& log,
                                 const std::map<ItemId, UserId>& ownership);

/// Keeps the events of `count` users drawn uniformly without replacement.
/// If count is at least the number of users the log is returned unchanged.
InteractionLog sample_users(const InteractionLog& log, std::size_t count, std::uint64_t seed);

/// Reads `item_id,owner_user_id` lines.
std::map<ItemId, UserId> parse_ownership(std::istream& source);

struct PreprocessOptions {
  std::optional<int> min_rating_exclusive;
  std::size_t min_user_events = 0;
  /// Count user activity before the rating filter instead of after it.
  bool count_activity_before_rating_filter = false;
  std::optional<std::size_t> sample_users;
  std::uint64_t seed = 42;
  std::optional<std::map<ItemId, UserId>> ownership;
};

/// rating filter -> user activity filter -> user subsampling -> self-link removal.
InteractionLog preprocess(const InteractionLog& log, const PreprocessOptions& options);

}  // namespace trendpred
