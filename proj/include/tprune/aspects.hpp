#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "gmm.hpp"
#include "index.hpp"
#include "time_series.hpp"
#include "time_window.hpp"

namespace tprune {

enum class AspectModel { simple, sliding, dynamic };

inline AspectModel parse_aspect_model(std::string_view s)
{
    if (s == "simple") {
        return AspectModel::simple;
    }
    if (s == "sliding") {
        return AspectModel::sliding;
    }
    if (s == "dynamic") {
        return AspectModel::dynamic;
    }
    throw invalid_argument_error("unknown aspect model '" + std::string(s) + "'");
}

inline std::string_view to_string(AspectModel m)
{
    switch (m) {
    case AspectModel::simple: return "simple";
    case AspectModel::sliding: return "sliding";
    case AspectModel::dynamic: return "dynamic";
    }
    return "?";
}

/// A temporal aspect of a term with its probability P(w|t).
struct Aspect {
    TimeWindow window;
    double weight = 0.0;
    bool is_global = false;

    friend bool operator==(const Aspect&, const Aspect&) = default;
};

struct AspectSet {
    std::string term;
    std::vector<Aspect> aspects;
    /// Aspect indices each document of the term belongs to (sorted).
    std::map<DocId, std::vector<std::uint32_t>> doc_map;
    /// Component means for mixture-derived aspects (parallel to the
    /// non-global aspects); used to place documents no window covers.
    std::vector<double> centers;

    [[nodiscard]] double total_weight() const
    {
        double s = 0.0;
        for (const auto& a : aspects) {
            s += a.weight;
        }
        return s;
    }

    [[nodiscard]] std::optional<std::uint32_t> global_index() const
    {
        for (std::uint32_t i = 0; i < aspects.size(); ++i) {
            if (aspects[i].is_global) {
                return i;
            }
        }
        return std::nullopt;
    }
};

namespace detail {

inline void set_uniform_weights(AspectSet& set)
{
    for (auto& a : set.aspects) {
        a.weight = 1.0 / static_cast<double>(set.aspects.size());
    }
}

inline bool has_mass_in(const TermTimeSeries& s, Day first, Day last)
{
    auto it = s.counts.lower_bound(first);
    return it != s.counts.end() && it->first <= last;
}

inline Day floor_div(std::int64_t a, std::int64_t b)
{
    auto q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return static_cast<Day>(q);
}

}  // namespace detail

/// Non-overlapping windows [s + k*gamma, s + (k+1)*gamma) from the first
/// day s of the series; empty windows are dropped, the rest share equal weight.
inline AspectSet simple_windows(const TermTimeSeries& s, Day gamma)
{
    if (gamma < 1) {
        throw invalid_argument_error("window size must be at least one day");
    }
    AspectSet set;
    set.term = s.term;
    if (s.empty()) {
        return set;
    }
    const Day origin = s.first_day();
    std::set<Day> slots;
    for (const auto& [day, c] : s.counts) {
        slots.insert(detail::floor_div(static_cast<std::int64_t>(day) - origin, gamma));
    }
    for (auto k : slots) {
        const Day lo = origin + k * gamma;
        set.aspects.push_back({TimeWindow::certain(lo, lo + gamma - 1), 0.0, false});
    }
    detail::set_uniform_weights(set);
    return set;
}

/// Half-overlapping windows of width gamma. The step is ceil(gamma / 2) so
/// that no day falls in more than two windows.
inline AspectSet sliding_windows(const TermTimeSeries& s, Day gamma)
{
    if (gamma < 1) {
        throw invalid_argument_error("window size must be at least one day");
    }
    AspectSet set;
    set.term = s.term;
    if (s.empty()) {
        return set;
    }
    const Day step = (gamma + 1) / 2;
    const Day origin = s.first_day();
    for (Day lo = origin; lo <= s.last_day(); lo += step) {
        const Day hi = lo + gamma - 1;
        if (detail::has_mass_in(s, lo, hi)) {
            set.aspects.push_back({TimeWindow::certain(lo, hi), 0.0, false});
        }
    }
    detail::set_uniform_weights(set);
    return set;
}

/// One window [mu - sigma, mu + sigma] per mixture component, weighted by
/// its mixing coefficient; empty components are dropped and the remaining
/// weights renormalised.
inline AspectSet dynamic_windows(const GmmFit& fit, std::string term)
{
    AspectSet set;
    set.term = std::move(term);
    double total = 0.0;
    for (std::size_t k = 0; k < fit.K; ++k) {
        if (fit.weights[k] <= 0.0) {
            continue;
        }
        const double sigma = std::sqrt(fit.variances[k]);
        const auto lo = static_cast<Day>(std::lround(fit.means[k] - sigma));
        const auto hi = static_cast<Day>(std::lround(fit.means[k] + sigma));
        set.aspects.push_back({TimeWindow::certain(lo, hi), fit.weights[k], false});
        set.centers.push_back(fit.means[k]);
        total += fit.weights[k];
    }
    for (auto& a : set.aspects) {
        a.weight /= total;
    }
    return set;
}

inline AspectSet dynamic_windows(const TermTimeSeries& s, std::size_t K_max, std::uint64_t seed, const GmmOptions& opt = {})
{
    if (s.empty()) {
        AspectSet set;
        set.term = s.term;
        return set;
    }
    return dynamic_windows(select_k_bic(s, K_max, seed, opt), s.term);
}

/// Adds the global window G with P(G|t) = lambda_w and scales every other
/// aspect by (1 - lambda_w). lambda_w = 0 leaves the set unchanged.
inline AspectSet smooth(AspectSet set, double lambda_w, TimeWindow global_span)
{
    if (!(lambda_w >= 0.0 && lambda_w < 1.0)) {
        throw invalid_argument_error("lambda_w must lie in [0, 1)");
    }
    if (set.global_index()) {
        throw invalid_argument_error("aspect set is already smoothed");
    }
    if (lambda_w == 0.0) {
        return set;
    }
    for (auto& a : set.aspects) {
        a.weight *= 1.0 - lambda_w;
    }
    const auto g = static_cast<std::uint32_t>(set.aspects.size());
    set.aspects.push_back({global_span, lambda_w, true});
    for (auto& [doc, ws] : set.doc_map) {
        ws.push_back(g);
    }
    return set;
}

/// Global span of a series: every day from its first to its last observation.
inline TimeWindow series_span(const TermTimeSeries& s)
{
    return s.empty() ? TimeWindow::unbounded() : TimeWindow::certain(s.first_day(), s.last_day());
}

inline AspectSet smooth(AspectSet set, double lambda_w, const TermTimeSeries& s)
{
    return smooth(std::move(set), lambda_w, series_span(s));
}

/// Maps every document of `term` to the aspects whose window intersects
/// one of its time windows, plus the global aspect. Under mixture-derived
/// aspects a dated document no window covers goes to the nearest component.
inline AspectSet doc_aspect_map(AspectSet set, const InvertedIndex& idx, std::string_view term)
{
    const auto& pl = idx.at(term);
    const auto global = set.global_index();
    set.doc_map.clear();
    for (const auto& p : pl.postings) {
        const auto& times = idx.doc_times[p.doc];
        std::vector<std::uint32_t> ws;
        for (std::uint32_t i = 0; i < set.aspects.size(); ++i) {
            if (!set.aspects[i].is_global && any_intersect(set.aspects[i].window, times)) {
                ws.push_back(i);
            }
        }
        if (ws.empty() && !set.centers.empty() && !times.empty()) {
            std::uint32_t nearest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::uint32_t k = 0; k < set.centers.size(); ++k) {
                for (const auto& w : times) {
                    const double dist = std::abs(static_cast<double>(w.representative_day()) - set.centers[k]);
                    if (dist < best) {
                        best = dist;
                        nearest = k;
                    }
                }
            }
            ws.push_back(nearest);
        }
        if (global) {
            ws.push_back(*global);
        }
        set.doc_map.emplace(p.doc, std::move(ws));
    }
    return set;
}

/// The degenerate aspect set: one global aspect holding every document.
inline AspectSet global_only(const InvertedIndex& idx, std::string_view term, TimeWindow span = TimeWindow::unbounded())
{
    AspectSet set;
    set.term = std::string(term);
    set.aspects.push_back({span, 1.0, true});
    for (const auto& p : idx.at(term).postings) {
        set.doc_map.emplace(p.doc, std::vector<std::uint32_t>{0});
    }
    return set;
}

struct AspectConfig {
    AspectModel model = AspectModel::simple;
    double lambda_w = 0.3;
    std::size_t k_max = 10;
    std::uint64_t seed = 0;
    bool presence_only = false;
    GmmOptions gmm;
};

/// Full aspect pipeline for one term: time series, windows under the chosen
/// model, document mapping, smoothing. Terms without dated documents get a
/// single global aspect.
inline AspectSet build_aspect_set(const InvertedIndex& idx, std::string_view term, const AspectConfig& cfg)
{
    auto series = term_time_series(idx, term, cfg.presence_only);
    if (series.empty()) {
        return global_only(idx, term);
    }
    AspectSet set;
    switch (cfg.model) {
    case AspectModel::simple: set = simple_windows(series, fd_window_size(series)); break;
    case AspectModel::sliding: set = sliding_windows(series, fd_window_size(series)); break;
    case AspectModel::dynamic: set = dynamic_windows(series, cfg.k_max, cfg.seed, cfg.gmm); break;
    }
    set = doc_aspect_map(std::move(set), idx, term);
    return smooth(std::move(set), cfg.lambda_w, series);
}

}  // namespace tprune
