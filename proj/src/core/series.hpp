#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/date.hpp"
#include "core/error.hpp"
#include "core/keys.hpp"

namespace edf {

struct DateInterval {
    CalendarDate start;
    CalendarDate end;  // inclusive

    bool contains(const CalendarDate& d) const { return d >= start && d <= end; }
};

/// One (ward, complexity) daily count series, one value per consecutive day.
struct DailySeries {
    SeriesKey key;
    CalendarDate start;
    std::vector<std::int64_t> counts;
    std::optional<DateInterval> anomaly_window;
    /// Set on aggregate series materialized before imputation; scopes the
    /// aggregation-identity check to non-imputed dates.
    bool derived_before_imputation = false;

    CalendarDate last_date() const { return start.plus_days(static_cast<std::int64_t>(counts.size()) - 1); }

    std::int64_t at(const CalendarDate& d) const {
        std::int64_t idx = d.serial() - start.serial();
        if (idx < 0 || idx >= static_cast<std::int64_t>(counts.size()))
            fail_data("date " + d.to_string() + " outside series " + key.to_string());
        return counts[static_cast<size_t>(idx)];
    }

    void validate() const {
        if (counts.empty()) fail_data("series " + key.to_string() + " is empty");
        for (auto v : counts)
            if (v < 0) fail_data("negative count in series " + key.to_string());
        if (anomaly_window) {
            if (anomaly_window->start > anomaly_window->end ||
                anomaly_window->start < start || anomaly_window->end > last_date())
                fail_data("anomaly window outside range of series " + key.to_string());
        }
    }
};

inline DailySeries slice(const DailySeries& s, const CalendarDate& from, const CalendarDate& to) {
    std::int64_t a = from.serial() - s.start.serial();
    std::int64_t b = to.serial() - s.start.serial();
    if (a < 0 || b >= static_cast<std::int64_t>(s.counts.size()) || a > b)
        fail_data("slice [" + from.to_string() + ", " + to.to_string() + "] out of range for " +
                  s.key.to_string());
    DailySeries out;
    out.key = s.key;
    out.start = from;
    out.counts.assign(s.counts.begin() + a, s.counts.begin() + b + 1);
    if (s.anomaly_window && s.anomaly_window->end >= from && s.anomaly_window->start <= to) {
        out.anomaly_window = DateInterval{std::max(s.anomaly_window->start, from),
                                          std::min(s.anomaly_window->end, to)};
    }
    out.derived_before_imputation = s.derived_before_imputation;
    return out;
}

}  // namespace edf
