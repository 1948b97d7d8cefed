#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "error.hpp"

namespace tprune {

/// Days since 1970-01-01 (proleptic Gregorian). All time windows use it.
using Day = std::int32_t;

inline Day day_number(std::chrono::year_month_day ymd)
{
    if (!ymd.ok()) {
        throw parse_error("invalid calendar date");
    }
    return static_cast<Day>(std::chrono::sys_days{ymd}.time_since_epoch().count());
}

inline Day day_number(int year, unsigned month, unsigned day)
{
    return day_number(std::chrono::year_month_day{
        std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}});
}

inline std::chrono::year_month_day calendar_date(Day d)
{
    return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{d}}};
}

namespace detail {

inline bool parse_int(std::string_view s, int& out)
{
    if (s.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

/// Parses a strict ISO-8601 calendar date "YYYY-MM-DD".
inline Day parse_iso_date(std::string_view s)
{
    int y = 0;
    int m = 0;
    int d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !detail::parse_int(s.substr(0, 4), y)
        || !detail::parse_int(s.substr(5, 2), m) || !detail::parse_int(s.substr(8, 2), d) || m < 1
        || d < 1) {
        throw parse_error("not an ISO date: '" + std::string(s) + "'");
    }
    return day_number(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

inline std::string format_iso_date(Day d)
{
    auto ymd = calendar_date(d);
    char buf[16];
    std::snprintf(buf,
                  sizeof(buf),
                  "%04d-%02u-%02u",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

/// Floor of the midpoint, also for negative day numbers.
inline Day midpoint_day(Day a, Day b)
{
    auto sum = static_cast<std::int64_t>(a) + b;
    auto half = sum / 2;
    if (sum % 2 != 0 && sum < 0) {
        --half;
    }
    return static_cast<Day>(half);
}

}  // namespace tprune
