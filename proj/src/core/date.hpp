#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace edf {

/// Proleptic Gregorian calendar date. Internally everything is driven by the
/// serial day number (days since 1970-01-01), so successor/ordering/arithmetic
/// are exact.
struct CalendarDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    static CalendarDate from_serial(std::int64_t days_since_epoch);
    static CalendarDate parse(const std::string& iso);  // "YYYY-MM-DD"

    std::int64_t serial() const;
    std::string to_string() const;

    CalendarDate next() const { return from_serial(serial() + 1); }
    CalendarDate plus_days(std::int64_t n) const { return from_serial(serial() + n); }

    /// 0 = Monday .. 6 = Sunday.
    int day_of_week() const;
    /// 1 = Jan 1.
    int day_of_year() const;

    friend bool operator==(const CalendarDate& a, const CalendarDate& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
    friend std::strong_ordering operator<=>(const CalendarDate& a, const CalendarDate& b) {
        return a.serial() <=> b.serial();
    }
};

bool is_valid_date(int year, int month, int day);

}  // namespace edf
