#pragma once

// Greedy maximisation of the expected DCG of a term's retained postings
// over its temporal aspects:
//
//   f(S) = sum_w P(w|t) sum_j c(j) P(d_j|t)
//
// where, for each aspect w, d_1, d_2, ... are the selected documents
// belonging to w in decreasing relevance order and c(j) = 1/ln(1+j).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aspects.hpp"
#include "error.hpp"
#include "relevance.hpp"

namespace tprune {

enum class Discount { ln, log2 };

inline Discount parse_discount(std::string_view s)
{
    if (s == "ln") {
        return Discount::ln;
    }
    if (s == "log2") {
        return Discount::log2;
    }
    throw invalid_argument_error("unknown discount '" + std::string(s) + "'");
}

/// c(j) for 1-based rank j.
inline double discount(Discount d, std::size_t rank)
{
    const double x = 1.0 + static_cast<double>(rank);
    return d == Discount::ln ? 1.0 / std::log(x) : 1.0 / std::log2(x);
}

/// Gains closer than this (relative to the best gain, or absolutely below
/// one) count as ties and fall back to the relevance order.
inline constexpr double gain_tie_tolerance = 1e-12;

/// One term's selection problem: relevance-ordered entries, the aspects each
/// entry belongs to, and the aspect distribution.
struct DiversityProblem {
    std::vector<ScoredDoc> entries;
    std::vector<std::vector<std::uint32_t>> aspects_of;
    std::vector<double> aspect_weight;
    Discount disc = Discount::ln;

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    [[nodiscard]] std::size_t n_aspects() const noexcept { return aspect_weight.size(); }
};

inline DiversityProblem make_problem(const RelevanceList& rel, const AspectSet& aspects, Discount disc = Discount::ln)
{
    DiversityProblem p;
    p.disc = disc;
    p.entries = rel.entries;
    p.aspects_of.reserve(rel.entries.size());
    for (const auto& e : rel.entries) {
        auto it = aspects.doc_map.find(e.doc);
        p.aspects_of.push_back(it == aspects.doc_map.end() ? std::vector<std::uint32_t>{} : it->second);
    }
    for (const auto& a : aspects.aspects) {
        p.aspect_weight.push_back(a.weight);
    }
    return p;
}

/// f(S) evaluated from its definition; `selected` holds entry positions.
inline double criterion(const DiversityProblem& p, std::span<const std::size_t> selected)
{
    std::vector<std::size_t> sorted(selected.begin(), selected.end());
    std::sort(sorted.begin(), sorted.end());
    double value = 0.0;
    for (std::uint32_t w = 0; w < p.n_aspects(); ++w) {
        std::size_t rank = 0;
        double sum = 0.0;
        // Entries are stored in relevance order, so position order is rank order.
        for (auto pos : sorted) {
            const auto& ws = p.aspects_of[pos];
            if (std::find(ws.begin(), ws.end(), w) != ws.end()) {
                sum += discount(p.disc, ++rank) * p.entries[pos].score;
            }
        }
        value += p.aspect_weight[w] * sum;
    }
    return value;
}

/// Per-aspect greedy bookkeeping. `selected_count` is t_w; `rank_cursor`
/// and `partial` are NextBest's r_w and Delta_w scratch.
struct SelectionState {
    std::vector<std::uint32_t> selected_count;
    std::vector<std::int64_t> rank_cursor;
    std::vector<double> partial;
    std::vector<bool> selected;
    std::vector<std::size_t> order;

    explicit SelectionState(const DiversityProblem& p)
        : selected_count(p.n_aspects(), 0),
          rank_cursor(p.n_aspects(), 0),
          partial(p.n_aspects(), 0.0),
          selected(p.size(), false)
    {}

    void select(const DiversityProblem& p, std::size_t pos)
    {
        selected[pos] = true;
        order.push_back(pos);
        for (auto w : p.aspects_of[pos]) {
            ++selected_count[w];
        }
    }
};

struct Pick {
    std::size_t position = 0;
    DocId doc = 0;
    double delta = 0.0;
};

/// Marginal gain of every unselected entry (NaN for selected ones), in one
/// bottom-up pass over the relevance list.
inline std::vector<double> marginal_gains(const DiversityProblem& p, SelectionState& st)
{
    for (std::size_t w = 0; w < p.n_aspects(); ++w) {
        st.rank_cursor[w] = st.selected_count[w];
        st.partial[w] = 0.0;
    }
    std::vector<double> gains(p.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = p.size(); i-- > 0;) {
        const double s = p.entries[i].score;
        if (st.selected[i]) {
            // Inserting anything above this entry pushes it from rank r_w to r_w + 1.
            for (auto w : p.aspects_of[i]) {
                const auto r = static_cast<std::size_t>(st.rank_cursor[w]);
                st.partial[w] += (discount(p.disc, r + 1) - discount(p.disc, r)) * s;
                --st.rank_cursor[w];
            }
        } else {
            double gain = 0.0;
            for (auto w : p.aspects_of[i]) {
                const auto r = static_cast<std::size_t>(st.rank_cursor[w]);
                gain += (st.partial[w] + discount(p.disc, r + 1) * s) * p.aspect_weight[w];
            }
            gains[i] = gain;
        }
    }
    return gains;
}

/// Position with the largest gain; near-ties go to the earlier (more
/// relevant) entry. `gains` is NaN at positions that are not candidates.
inline std::optional<std::size_t> best_gain_position(std::span<const double> gains)
{
    std::optional<double> best;
    for (double g : gains) {
        if (!std::isnan(g) && (!best || g > *best)) {
            best = g;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    const double cutoff = *best - gain_tie_tolerance * std::max(1.0, std::abs(*best));
    for (std::size_t i = 0; i < gains.size(); ++i) {
        if (!std::isnan(gains[i]) && gains[i] >= cutoff) {
            return i;
        }
    }
    return std::nullopt;
}

/// Selects the unselected posting that increases f the most, records it in
/// `st`, and returns it with its gain. Empty once every entry is selected.
inline std::optional<Pick> next_best(const DiversityProblem& p, SelectionState& st)
{
    auto gains = marginal_gains(p, st);
    auto pos = best_gain_position(gains);
    if (!pos) {
        return std::nullopt;
    }
    st.select(p, *pos);
    return Pick{*pos, p.entries[*pos].doc, gains[*pos]};
}

struct Diversification {
    std::vector<Pick> picks;
    double value = 0.0;
    std::size_t requested = 0;
    bool clamped = false;
};

/// Greedy selection of k postings (k larger than the list is clamped).
inline Diversification diversify(const DiversityProblem& p, std::size_t k)
{
    Diversification out;
    out.requested = k;
    if (k > p.size()) {
        out.clamped = true;
        k = p.size();
    }
    SelectionState st(p);
    for (std::size_t i = 0; i < k; ++i) {
        auto pick = next_best(p, st);
        if (!pick) {
            break;
        }
        out.picks.push_back(*pick);
    }
    out.value = criterion(p, st.order);
    return out;
}

}  // namespace tprune
