#pragma once

#include <vector>

#include "core/date.hpp"
#include "core/error.hpp"

namespace edf {

struct CovariateRecord {
    double tmax = 0;          // degrees C
    double tmin = 0;          // degrees C
    double wind_mean = 0;     // m/s
    double precip_total = 0;  // mm
    bool is_holiday = false;
};

/// Per-date weather summaries and holiday flags, one record per consecutive
/// day, shared by all series.
struct CovariateTable {
    CalendarDate start;
    std::vector<CovariateRecord> records;

    CalendarDate last_date() const {
        return start.plus_days(static_cast<std::int64_t>(records.size()) - 1);
    }

    bool covers(const CalendarDate& from, const CalendarDate& to) const {
        return !records.empty() && start <= from && last_date() >= to;
    }

    const CovariateRecord& at(const CalendarDate& d) const {
        std::int64_t idx = d.serial() - start.serial();
        if (idx < 0 || idx >= static_cast<std::int64_t>(records.size()))
            fail_data("no covariate record for " + d.to_string());
        return records[static_cast<size_t>(idx)];
    }

    void validate() const {
        for (size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            CalendarDate d = start.plus_days(static_cast<std::int64_t>(i));
            if (r.tmax < r.tmin) fail_data("tmax < tmin at " + d.to_string());
            if (r.precip_total < 0) fail_data("negative precipitation at " + d.to_string());
        }
    }
};

}  // namespace edf
