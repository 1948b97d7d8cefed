#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "date.hpp"
#include "error.hpp"

namespace tprune {

/// An uncertain time interval T = (b, e): the start date lies somewhere in
/// [b_lo, b_hi] and the end date somewhere in [e_lo, e_hi]. Day granularity.
struct TimeWindow {
    Day b_lo = 0;
    Day b_hi = 0;
    Day e_lo = 0;
    Day e_hi = 0;

    /// A window whose start and end are known exactly.
    static TimeWindow certain(Day begin, Day end) { return {begin, begin, end, end}; }

    /// A single known day.
    static TimeWindow on(Day d) { return {d, d, d, d}; }

    /// "Sometime within [first, last]": both bounds uncertain over the span.
    static TimeWindow within(Day first, Day last) { return {first, last, first, last}; }

    /// Covers every representable day.
    static TimeWindow unbounded()
    {
        constexpr Day lo = std::numeric_limits<Day>::min() / 2;
        constexpr Day hi = std::numeric_limits<Day>::max() / 2;
        return {lo, hi, lo, hi};
    }

    [[nodiscard]] bool valid() const noexcept
    {
        return b_lo <= b_hi && e_lo <= e_hi && b_lo <= e_hi;
    }

    /// Earliest and latest day the window can touch.
    [[nodiscard]] Day first_day() const noexcept { return b_lo; }
    [[nodiscard]] Day last_day() const noexcept { return e_hi; }

    /// Representative date used when building term time series.
    [[nodiscard]] Day representative_day() const noexcept { return midpoint_day(b_lo, e_hi); }

    /// True when `inner`'s possible span lies within this window's span.
    [[nodiscard]] bool contains(const TimeWindow& inner) const noexcept
    {
        return b_lo <= inner.b_lo && inner.e_hi <= e_hi;
    }

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
    friend auto operator<=>(const TimeWindow&, const TimeWindow&) = default;
};

inline void validate(const TimeWindow& w)
{
    if (!w.valid()) {
        throw parse_error("invalid time window: bounds out of order");
    }
}

/// Intersection of two windows: the period both can share. Starts are
/// pushed to the later of the two, ends to the earlier; the result is empty
/// when the latest possible start falls after the earliest possible end.
inline std::optional<TimeWindow> intersect(const TimeWindow& a, const TimeWindow& c)
{
    TimeWindow r{std::max(a.b_lo, c.b_lo),
                 std::max(a.b_hi, c.b_hi),
                 std::min(a.e_lo, c.e_lo),
                 std::min(a.e_hi, c.e_hi)};
    if (r.b_lo > r.e_hi) {
        return std::nullopt;
    }
    return r;
}

inline bool intersects(const TimeWindow& a, const TimeWindow& c)
{
    return std::max(a.b_lo, c.b_lo) <= std::min(a.e_hi, c.e_hi);
}

/// True if `x` intersects some window of `ys`.
inline bool any_intersect(const TimeWindow& x, const std::vector<TimeWindow>& ys)
{
    for (const auto& y : ys) {
        if (intersects(x, y)) {
            return true;
        }
    }
    return false;
}

/// True if some window of `xs` intersects some window of `ys`.
inline bool any_intersect(const std::vector<TimeWindow>& xs, const std::vector<TimeWindow>& ys)
{
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            if (intersects(x, y)) {
                return true;
            }
        }
    }
    return false;
}

/// Parses a query time constraint: either four comma-separated ISO dates
/// "b_lo,b_hi,e_lo,e_hi", or the shorthand "YYYY", "YYYY-MM", "YYYY-MM-DD"
/// which denotes "sometime within" that year, month or day.
inline TimeWindow parse_time_spec(std::string_view spec)
{
    if (spec.find(',') != std::string_view::npos) {
        std::vector<Day> parts;
        std::size_t start = 0;
        while (start <= spec.size()) {
            auto comma = spec.find(',', start);
            auto piece = spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start);
            parts.push_back(parse_iso_date(piece));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (parts.size() != 4) {
            throw parse_error("time window needs four dates: '" + std::string(spec) + "'");
        }
        TimeWindow w{parts[0], parts[1], parts[2], parts[3]};
        validate(w);
        return w;
    }
    int y = 0;
    int m = 0;
    if (spec.size() == 4 && detail::parse_int(spec, y)) {
        return TimeWindow::within(day_number(y, 1, 1), day_number(y, 12, 31));
    }
    if (spec.size() == 7 && spec[4] == '-' && detail::parse_int(spec.substr(0, 4), y)
        && detail::parse_int(spec.substr(5, 2), m) && m >= 1 && m <= 12) {
        using namespace std::chrono;
        auto month_end = year_month_day_last{year{y}, month_day_last{month{static_cast<unsigned>(m)}}};
        return TimeWindow::within(day_number(y, static_cast<unsigned>(m), 1),
                                  day_number(year_month_day{month_end}));
    }
    if (spec.size() == 10) {
        return TimeWindow::on(parse_iso_date(spec));
    }
    throw parse_error("unrecognised time specification: '" + std::string(spec) + "'");
}

}  // namespace tprune
