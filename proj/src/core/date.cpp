#include "core/date.hpp"

#include <array>
#include <cstdio>

#include "core/error.hpp"

namespace edf {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

// Howard Hinnant's civil-from-days / days-from-civil.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

bool is_valid_date(int year, int month, int day) {
    if (month < 1 || month > 12) return false;
    return day >= 1 && day <= days_in_month(year, month);
}

CalendarDate CalendarDate::from_serial(std::int64_t days) {
    CalendarDate out;
    civil_from_days(days, out.year, out.month, out.day);
    return out;
}

CalendarDate CalendarDate::parse(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3)
        fail_data("unparseable date: '" + iso + "' (expected YYYY-MM-DD)");
    if (!is_valid_date(y, m, d))
        fail_data("invalid calendar date: '" + iso + "'");
    return CalendarDate{y, m, d};
}

std::int64_t CalendarDate::serial() const { return days_from_civil(year, month, day); }

std::string CalendarDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

int CalendarDate::day_of_week() const {
    // 1970-01-01 was a Thursday (dow 3 with Monday = 0).
    std::int64_t s = serial();
    return static_cast<int>(((s % 7) + 7 + 3) % 7);
}

int CalendarDate::day_of_year() const {
    return static_cast<int>(serial() - days_from_civil(year, 1, 1)) + 1;
}

}  // namespace edf
