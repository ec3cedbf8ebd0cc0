#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfrca {

struct EventRecord {
    double timestamp = 0.0;  // seconds since epoch
    std::string event_id;
    std::string channel;
};

struct EventLog {
    std::vector<EventRecord> records;  // sorted by timestamp, stable on ties
};

// Multivariate event counts on a uniform slot grid. counts[v][k] is the
// number of events of variables[v] in slot k.
struct CountPanel {
    std::vector<std::string> variables;
    double slot_width = 1.0;
    double start_time = 0.0;
    std::vector<std::vector<std::int64_t>> counts;

    std::size_t n_vars() const { return variables.size(); }
    std::size_t n_slots() const { return counts.empty() ? 0 : counts.front().size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    // Throws ValidationError when the variable is absent.
    std::span<const std::int64_t> series(std::string_view name) const;

    void validate() const;
    bool operator==(const CountPanel&) const = default;
};

// Event-log CSV: optional header `timestamp,event_id,channel`, then one
// record per line. Blank lines are skipped.
EventLog parse_event_log(std::istream& in);
EventLog parse_event_log(std::string_view text);

struct CountOptions {
    // Grid origin; defaults to the first timestamp floored to the slot grid.
    std::optional<double> start_time;
    // Defaults to the number of slots needed to cover the last record.
    std::optional<std::size_t> n_slots;
};

// Half-open slots [start + k w, start + (k + 1) w). Records of channels
// not in `variables`, or outside the covered interval, are ignored.
CountPanel count_transform(const EventLog& log, double slot_width,
                           const std::vector<std::string>& variables,
                           const CountOptions& options = {});

// Keeps slots [failure_slot - history_len + 1, failure_slot].
CountPanel window_to_failure(const CountPanel& panel, std::size_t failure_slot,
                             std::size_t history_len);

// CountPanel CSV: header `slot,<var1>,...`, one row per slot, integer cells.
std::string panel_to_csv(const CountPanel& panel);
CountPanel panel_from_csv(std::string_view text);

}  // namespace cfrca
