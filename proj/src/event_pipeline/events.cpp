#include "event_pipeline/events.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "common/error.hpp"
#include "common/io_util.hpp"

namespace cfrca {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    std::int64_t value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace

std::optional<std::size_t> CountPanel::index_of(std::string_view name) const {
    const auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) return std::nullopt;
    return static_cast<std::size_t>(it - variables.begin());
}

std::span<const std::int64_t> CountPanel::series(std::string_view name) const {
    const auto idx = index_of(name);
    if (!idx) throw ValidationError("variable '" + std::string(name) + "' not in panel");
    return counts[*idx];
}

void CountPanel::validate() const {
    if (!(slot_width > 0.0) || !std::isfinite(slot_width)) {
        throw ValidationError("slot_width must be positive");
    }
    if (counts.size() != variables.size()) {
        throw ValidationError("panel has " + std::to_string(variables.size()) + " variables but " +
                              std::to_string(counts.size()) + " rows");
    }
    std::set<std::string_view> seen;
    for (const auto& v : variables) {
        if (!seen.insert(v).second) throw ValidationError("duplicate variable '" + v + "'");
    }
    for (std::size_t v = 0; v < counts.size(); ++v) {
        if (counts[v].size() != n_slots()) throw ValidationError("ragged panel row '" + variables[v] + "'");
        for (auto c : counts[v]) {
            if (c < 0) throw ValidationError("negative count in '" + variables[v] + "'");
        }
    }
}

EventLog parse_event_log(std::istream& in) {
    EventLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        if (line_no == 1 && body == "timestamp,event_id,channel") continue;
        const auto fields = io::split_csv_line(body);
        if (fields.size() != 3) {
            throw ParseError(line_no, "expected 3 fields (timestamp,event_id,channel), got " +
                                          std::to_string(fields.size()));
        }
        const auto ts = parse_number(fields[0]);
        if (!ts) throw ParseError(line_no, "timestamp '" + fields[0] + "' is not a number");
        if (!std::isfinite(*ts)) throw ParseError(line_no, "timestamp is not finite");
        if (*ts < 0.0) {
            throw ValidationError("line " + std::to_string(line_no) + ": negative timestamp");
        }
        EventRecord rec{*ts, std::string(trim(fields[1])), std::string(trim(fields[2]))};
        if (rec.event_id.empty()) throw ParseError(line_no, "empty event_id");
        if (rec.channel.empty()) throw ParseError(line_no, "empty channel");
        log.records.push_back(std::move(rec));
    }
    std::stable_sort(log.records.begin(), log.records.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
    return log;
}

EventLog parse_event_log(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_event_log(in);
}

CountPanel count_transform(const EventLog& log, double slot_width,
                           const std::vector<std::string>& variables, const CountOptions& options) {
    if (!(slot_width > 0.0) || !std::isfinite(slot_width)) {
        throw ValidationError("slot_width must be positive, got " + io::format_double(slot_width));
    }
    if (variables.empty()) throw ValidationError("count_transform needs at least one variable");

    CountPanel panel;
    panel.variables = variables;
    panel.slot_width = slot_width;
    if (options.start_time) {
        panel.start_time = *options.start_time;
    } else if (!log.records.empty()) {
        panel.start_time = std::floor(log.records.front().timestamp / slot_width) * slot_width;
    }

    std::size_t n_slots = 0;
    if (options.n_slots) {
        n_slots = *options.n_slots;
    } else if (!log.records.empty()) {
        const double last = log.records.back().timestamp;
        if (last >= panel.start_time) {
            n_slots = static_cast<std::size_t>(std::floor((last - panel.start_time) / slot_width)) + 1;
        }
    }
    panel.counts.assign(variables.size(), std::vector<std::int64_t>(n_slots, 0));
    panel.validate();

    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t v = 0; v < variables.size(); ++v) index.emplace(variables[v], v);
    for (const auto& rec : log.records) {
        const auto it = index.find(rec.channel);
        if (it == index.end() || rec.timestamp < panel.start_time) continue;
        const double k = std::floor((rec.timestamp - panel.start_time) / slot_width);
        if (k >= static_cast<double>(n_slots)) continue;
        ++panel.counts[it->second][static_cast<std::size_t>(k)];
    }
    return panel;
}

CountPanel window_to_failure(const CountPanel& panel, std::size_t failure_slot, std::size_t history_len) {
    if (failure_slot >= panel.n_slots()) {
        throw ValidationError("failure_slot " + std::to_string(failure_slot) + " outside panel of " +
                              std::to_string(panel.n_slots()) + " slots");
    }
    if (history_len == 0) throw ValidationError("history_len must be at least 1");
    if (history_len > failure_slot + 1) {
        throw ValidationError("history_len " + std::to_string(history_len) + " exceeds available past: only " +
                              std::to_string(failure_slot + 1) + " slots available");
    }
    const std::size_t first = failure_slot + 1 - history_len;
    CountPanel out;
    out.variables = panel.variables;
    out.slot_width = panel.slot_width;
    out.start_time = panel.start_time + static_cast<double>(first) * panel.slot_width;
    out.counts.reserve(panel.counts.size());
    for (const auto& row : panel.counts) {
        out.counts.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(first),
                                row.begin() + static_cast<std::ptrdiff_t>(failure_slot + 1));
    }
    return out;
}

std::string panel_to_csv(const CountPanel& panel) {
    std::string out = "slot";
    for (const auto& v : panel.variables) {
        out += ',';
        out += v;
    }
    out += '\n';
    for (std::size_t k = 0; k < panel.n_slots(); ++k) {
        out += std::to_string(k);
        for (const auto& row : panel.counts) {
            out += ',';
            out += std::to_string(row[k]);
        }
        out += '\n';
    }
    return out;
}

CountPanel panel_from_csv(std::string_view text) {
    CountPanel panel;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = io::split_csv_line(line);
        if (!have_header) {
            if (fields.empty() || trim(fields[0]) != "slot") throw ParseError(line_no, "missing 'slot' header");
            for (std::size_t i = 1; i < fields.size(); ++i) panel.variables.emplace_back(trim(fields[i]));
            panel.counts.resize(panel.variables.size());
            have_header = true;
            continue;
        }
        if (fields.size() != panel.variables.size() + 1) {
            throw ParseError(line_no, "expected " + std::to_string(panel.variables.size() + 1) + " fields");
        }
        const auto slot = parse_int(fields[0]);
        if (!slot) throw ParseError(line_no, "bad slot index '" + fields[0] + "'");
        if (panel.n_slots() == 0 && panel.counts.empty() == false && panel.counts[0].empty()) {
            panel.start_time = static_cast<double>(*slot);
        }
        for (std::size_t v = 0; v < panel.variables.size(); ++v) {
            const auto c = parse_int(fields[v + 1]);
            if (!c) throw ParseError(line_no, "count '" + fields[v + 1] + "' is not an integer");
            panel.counts[v].push_back(*c);
        }
    }
    if (!have_header) throw ParseError(1, "empty panel file");
    panel.validate();
    return panel;
}

}  // namespace cfrca
