#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "date.hpp"
#include "index.hpp"

namespace tprune {

/// Day-granularity histogram of a term's occurrences over time.
struct TermTimeSeries {
    std::string term;
    std::map<Day, std::uint64_t> counts;  // every value >= 1
    std::uint64_t n_points = 0;

    [[nodiscard]] bool empty() const noexcept { return counts.empty(); }
    [[nodiscard]] Day first_day() const { return counts.begin()->first; }
    [[nodiscard]] Day last_day() const { return counts.rbegin()->first; }

    void add(Day d, std::uint64_t n)
    {
        if (n == 0) {
            return;
        }
        counts[d] += n;
        n_points += n;
    }
};

/// Sums the term's frequency (or presence) at the representative day of
/// each time window of each document containing it. Documents without a
/// temporal part contribute nothing.
inline TermTimeSeries term_time_series(const InvertedIndex& idx, std::string_view term, bool presence_only = false)
{
    const auto& pl = idx.at(term);
    TermTimeSeries s;
    s.term = std::string(term);
    for (const auto& p : pl.postings) {
        for (const auto& w : idx.doc_times[p.doc]) {
            s.add(w.representative_day(), presence_only ? 1 : p.tf);
        }
    }
    return s;
}

/// Value at 0-based rank `r` of the multiset where day d appears counts[d] times.
inline double nth_day(const TermTimeSeries& s, std::uint64_t r)
{
    std::uint64_t seen = 0;
    for (const auto& [day, c] : s.counts) {
        seen += c;
        if (r < seen) {
            return day;
        }
    }
    return s.last_day();
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7, the numpy/R default).
inline double quantile(const TermTimeSeries& s, double p)
{
    const double h = static_cast<double>(s.n_points - 1) * p;
    const auto lo = static_cast<std::uint64_t>(std::floor(h));
    const double x_lo = nth_day(s, lo);
    if (lo + 1 >= s.n_points) {
        return x_lo;
    }
    return x_lo + (h - static_cast<double>(lo)) * (nth_day(s, lo + 1) - x_lo);
}

inline double interquartile_range(const TermTimeSeries& s)
{
    return quantile(s, 0.75) - quantile(s, 0.25);
}

/// Freedman-Diaconis bin width 2 * IQR * n^(-1/3), rounded up to whole
/// days. Point masses (IQR = 0) and empty series fall back to one day.
inline Day fd_window_size(const TermTimeSeries& s)
{
    if (s.n_points == 0) {
        return 1;
    }
    const double iqr = interquartile_range(s);
    if (iqr <= 0.0) {
        return 1;
    }
    const double width = 2.0 * iqr * std::pow(static_cast<double>(s.n_points), -1.0 / 3.0);
    return std::max<Day>(1, static_cast<Day>(std::ceil(width)));
}

}  // namespace tprune
