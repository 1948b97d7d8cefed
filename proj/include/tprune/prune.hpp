#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aspects.hpp"
#include "diversify.hpp"
#include "error.hpp"
#include "index.hpp"
#include "parallel.hpp"
#include "relevance.hpp"

namespace tprune {

enum class Method { tcp, ipu, n2p2, div_simple, div_sliding, div_dynamic };

inline Method parse_method(std::string_view s)
{
    if (s == "tcp") {
        return Method::tcp;
    }
    if (s == "ipu") {
        return Method::ipu;
    }
    if (s == "2n2p") {
        return Method::n2p2;
    }
    if (s == "div-simple") {
        return Method::div_simple;
    }
    if (s == "div-sliding") {
        return Method::div_sliding;
    }
    if (s == "div-dynamic") {
        return Method::div_dynamic;
    }
    throw invalid_argument_error("unknown pruning method '" + std::string(s) + "'");
}

inline std::string_view to_string(Method m)
{
    switch (m) {
    case Method::tcp: return "tcp";
    case Method::ipu: return "ipu";
    case Method::n2p2: return "2n2p";
    case Method::div_simple: return "div-simple";
    case Method::div_sliding: return "div-sliding";
    case Method::div_dynamic: return "div-dynamic";
    }
    return "?";
}

inline bool is_diversified(Method m)
{
    return m == Method::div_simple || m == Method::div_sliding || m == Method::div_dynamic;
}

inline AspectModel aspect_model_of(Method m)
{
    switch (m) {
    case Method::div_sliding: return AspectModel::sliding;
    case Method::div_dynamic: return AspectModel::dynamic;
    default: return AspectModel::simple;
    }
}

// ---------------------------------------------------------------------------
// Diversified top-k pruning

enum class BudgetMode { fixed_k, ratio };

struct PruneConfig {
    BudgetMode mode = BudgetMode::ratio;
    std::size_t k = 10;
    double target_ratio = 0.5;
    Discount disc = Discount::ln;
    /// Recompute document lengths and term statistics after pruning.
    bool recompute_stats = false;
    unsigned threads = 1;
};

inline void validate(const PruneConfig& cfg)
{
    if (cfg.mode == BudgetMode::fixed_k && cfg.k < 1) {
        throw invalid_argument_error("k must be at least 1");
    }
    if (cfg.mode == BudgetMode::ratio && !(cfg.target_ratio > 0.0 && cfg.target_ratio < 1.0)) {
        throw invalid_argument_error("target pruning ratio must lie in (0, 1)");
    }
}

/// Number of postings k_t kept for a list of `n` postings.
inline std::size_t term_budget(const PruneConfig& cfg, std::size_t n)
{
    if (n == 0) {
        return 0;
    }
    if (cfg.mode == BudgetMode::fixed_k) {
        return std::min(cfg.k, n);
    }
    const auto k = static_cast<std::size_t>(std::llround((1.0 - cfg.target_ratio) * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
}

using AspectSets = std::map<std::string, AspectSet, std::less<>>;

/// Aspect sets for every term of `idx`, built independently per term.
inline AspectSets build_aspect_sets(const InvertedIndex& idx, const AspectConfig& cfg, unsigned threads = 1)
{
    std::vector<const std::string*> terms;
    for (const auto& [term, _] : idx.lists) {
        terms.push_back(&term);
    }
    std::vector<AspectSet> built(terms.size());
    parallel_for(terms.size(), threads, [&](std::size_t i) { built[i] = build_aspect_set(idx, *terms[i], cfg); });
    AspectSets out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out.emplace(*terms[i], std::move(built[i]));
    }
    return out;
}

/// Postings of `pl` whose documents appear in `docs` (any order).
inline std::vector<Posting> keep_docs(const PostingList& pl, std::vector<DocId> docs)
{
    std::sort(docs.begin(), docs.end());
    std::vector<Posting> out;
    out.reserve(docs.size());
    for (const auto& p : pl.postings) {
        if (std::binary_search(docs.begin(), docs.end(), p.doc)) {
            out.push_back(p);
        }
    }
    return out;
}

/// Keeps, for every term, the k_t postings chosen greedily to maximise the
/// expected DCG over the term's temporal aspects.
inline InvertedIndex diversified_topk_prune(const InvertedIndex& idx, const AspectSets& sets, const PruneConfig& cfg)
{
    validate(cfg);
    std::vector<const PostingList*> lists;
    for (const auto& [term, pl] : idx.lists) {
        if (!sets.contains(term)) {
            throw not_found_error("no aspect set for term '" + term + "'");
        }
        lists.push_back(&pl);
    }
    std::vector<std::vector<Posting>> kept(lists.size());
    parallel_for(lists.size(), cfg.threads, [&](std::size_t i) {
        const auto& pl = *lists[i];
        const auto problem = make_problem(relevance_scores(idx, pl.term), sets.find(pl.term)->second, cfg.disc);
        const auto result = diversify(problem, term_budget(cfg, pl.size()));
        std::vector<DocId> docs;
        for (const auto& pick : result.picks) {
            docs.push_back(pick.doc);
        }
        kept[i] = keep_docs(pl, std::move(docs));
    });
    std::map<std::string, std::vector<Posting>, std::less<>> out;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        out.emplace(lists[i]->term, std::move(kept[i]));
    }
    return with_postings(idx, std::move(out), cfg.recompute_stats);
}

// ---------------------------------------------------------------------------
// Threshold baselines

inline constexpr std::size_t tcp_default_k = 10;

/// TF-IDF posting score tf * ln(N / df).
inline double tcp_score(double tf, double n_docs, double df)
{
    return tf * std::log(n_docs / df);
}

/// A posting is discarded when `value < epsilon * scale`, unless `undefined`.
struct ThresholdScores {
    std::string term;
    std::vector<double> value;  // parallel to the term's postings
    std::vector<bool> undefined;
    double scale = 1.0;

    [[nodiscard]] bool keep(std::size_t i, double epsilon) const
    {
        return undefined[i] || !(value[i] < epsilon * scale);
    }
};

inline ThresholdScores tcp_scores(const InvertedIndex& idx, std::string_view term, std::size_t k = tcp_default_k)
{
    const auto& pl = idx.at(term);
    ThresholdScores ts;
    ts.term = std::string(term);
    const double n = static_cast<double>(idx.stats.n_docs);
    const double df = idx.stats.df(term);
    for (const auto& p : pl.postings) {
        ts.value.push_back(tcp_score(p.tf, n, df));
    }
    ts.undefined.assign(pl.size(), false);
    if (!ts.value.empty()) {
        std::vector<double> sorted = ts.value;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        // z_t: the k-th best score, or the lowest one for short lists.
        ts.scale = sorted.size() >= k ? sorted[k - 1] : sorted.back();
    }
    return ts;
}

/// Entropy contribution A(d,t) = -q ln q with q = p(d|t) / sum_d' p(d'|t)
/// and p(d|t) the JM language-model score under a uniform document prior.
inline ThresholdScores ipu_scores(const InvertedIndex& idx, std::string_view term)
{
    const auto& pl = idx.at(term);
    ThresholdScores ts;
    ts.term = std::string(term);
    const double ctf = static_cast<double>(idx.stats.ctf(term));
    const double clen = static_cast<double>(idx.stats.total_len);
    std::vector<double> p;
    double total = 0.0;
    for (const auto& post : pl.postings) {
        p.push_back(jm_score(post.tf, idx.stats.doc_len[post.doc], ctf, clen));
        total += p.back();
    }
    for (double pd : p) {
        const double q = pd / total;
        ts.value.push_back(q > 0.0 ? -q * std::log(q) : 0.0);
    }
    ts.undefined.assign(pl.size(), false);
    return ts;
}

/// Two-proportion z statistic comparing tf/|d| with ctf/|C|. Empty when the
/// statistic is undefined (|d| = 0 or zero standard error).
inline std::optional<double> n2p2_statistic(double tf, double doc_len, double ctf, double collection_len)
{
    if (doc_len <= 0.0 || collection_len <= 0.0) {
        return std::nullopt;
    }
    const double p = (tf + ctf) / (doc_len + collection_len);
    const double e = std::sqrt(p * (1.0 - p) * (1.0 / doc_len + 1.0 / collection_len));
    if (!(e > 0.0)) {
        return std::nullopt;
    }
    return (tf / doc_len - ctf / collection_len) / e;
}

inline ThresholdScores n2p2_scores(const InvertedIndex& idx, std::string_view term)
{
    const auto& pl = idx.at(term);
    ThresholdScores ts;
    ts.term = std::string(term);
    const double ctf = static_cast<double>(idx.stats.ctf(term));
    const double clen = static_cast<double>(idx.stats.total_len);
    for (const auto& p : pl.postings) {
        auto z = n2p2_statistic(p.tf, idx.stats.doc_len[p.doc], ctf, clen);
        ts.value.push_back(z.value_or(0.0));
        ts.undefined.push_back(!z.has_value());
    }
    return ts;
}

/// Per-posting scores of one threshold method over the whole index.
class ThresholdTable {
public:
    ThresholdTable(const InvertedIndex& idx, Method method, std::size_t tcp_k = tcp_default_k) : m_method(method)
    {
        if (is_diversified(method)) {
            throw invalid_argument_error("not a threshold pruning method");
        }
        if (method == Method::tcp && tcp_k < 1) {
            throw invalid_argument_error("TCP k must be at least 1");
        }
        for (const auto& [term, pl] : idx.lists) {
            m_terms.push_back(&pl);
            switch (method) {
            case Method::tcp: m_scores.push_back(tcp_scores(idx, term, tcp_k)); break;
            case Method::ipu: m_scores.push_back(ipu_scores(idx, term)); break;
            default: m_scores.push_back(n2p2_scores(idx, term)); break;
            }
        }
        m_total = idx.total_postings();
    }

    [[nodiscard]] Method method() const noexcept { return m_method; }

    /// Postings whose statistic is undefined and are therefore always kept.
    [[nodiscard]] std::size_t undefined_count() const
    {
        std::size_t n = 0;
        for (const auto& s : m_scores) {
            n += static_cast<std::size_t>(std::count(s.undefined.begin(), s.undefined.end(), true));
        }
        return n;
    }

    [[nodiscard]] std::size_t kept_count(double epsilon) const
    {
        std::size_t n = 0;
        for (const auto& s : m_scores) {
            for (std::size_t i = 0; i < s.value.size(); ++i) {
                n += s.keep(i, epsilon) ? 1 : 0;
            }
        }
        return n;
    }

    [[nodiscard]] double ratio(double epsilon) const
    {
        return m_total == 0 ? 0.0
                            : static_cast<double>(m_total - kept_count(epsilon)) / static_cast<double>(m_total);
    }

    /// Epsilon interval spanning "nothing pruned" to "everything prunable pruned".
    [[nodiscard]] std::pair<double, double> epsilon_range() const
    {
        if (m_method == Method::tcp) {
            return {0.0, 1.0};
        }
        double lo = 0.0;
        double hi = 0.0;
        for (const auto& s : m_scores) {
            for (std::size_t i = 0; i < s.value.size(); ++i) {
                if (!s.undefined[i]) {
                    lo = std::min(lo, s.value[i]);
                    hi = std::max(hi, s.value[i]);
                }
            }
        }
        return {lo, std::nextafter(hi, std::numeric_limits<double>::infinity()) + 1e-12};
    }

    [[nodiscard]] InvertedIndex apply(const InvertedIndex& idx, double epsilon, bool recompute = false) const
    {
        std::map<std::string, std::vector<Posting>, std::less<>> kept;
        for (std::size_t t = 0; t < m_terms.size(); ++t) {
            const auto& pl = *m_terms[t];
            std::vector<Posting> keep;
            for (std::size_t i = 0; i < pl.postings.size(); ++i) {
                if (m_scores[t].keep(i, epsilon)) {
                    keep.push_back(pl.postings[i]);
                }
            }
            kept.emplace(pl.term, std::move(keep));
        }
        return with_postings(idx, std::move(kept), recompute);
    }

    [[nodiscard]] const std::vector<ThresholdScores>& scores() const noexcept { return m_scores; }

private:
    Method m_method;
    std::vector<const PostingList*> m_terms;
    std::vector<ThresholdScores> m_scores;
    std::size_t m_total = 0;
};

/// Carmel et al. term-centric pruning: drop postings scoring below
/// epsilon times the term's k-th best TF-IDF score.
inline InvertedIndex tcp_prune(const InvertedIndex& idx, std::size_t k, double epsilon, bool recompute = false)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw invalid_argument_error("TCP epsilon must lie in (0, 1]");
    }
    return ThresholdTable(idx, Method::tcp, k).apply(idx, epsilon, recompute);
}

/// Uniform entropy-contribution pruning: drop postings with A(d,t) < epsilon.
inline InvertedIndex ipu_prune(const InvertedIndex& idx, double epsilon, bool recompute = false)
{
    if (!(epsilon >= 0.0)) {
        throw invalid_argument_error("IP-u epsilon must be non-negative");
    }
    return ThresholdTable(idx, Method::ipu).apply(idx, epsilon, recompute);
}

/// Two-proportion z-test pruning: drop postings with Z < epsilon. Postings
/// whose statistic is undefined are kept and counted in `*undefined`.
inline InvertedIndex n2p2_prune(const InvertedIndex& idx,
                                double epsilon,
                                std::size_t* undefined = nullptr,
                                bool recompute = false)
{
    if (!(epsilon >= 0.0)) {
        throw invalid_argument_error("2N2P epsilon must be non-negative");
    }
    ThresholdTable table(idx, Method::n2p2);
    if (undefined != nullptr) {
        *undefined = table.undefined_count();
    }
    return table.apply(idx, epsilon, recompute);
}

struct TunedThreshold {
    double epsilon = 0.0;
    double achieved = 0.0;
    /// |achieved - target| exceeded the tolerance.
    bool missed = false;
};

/// Bisection on epsilon so that the pruning ratio approaches `target`.
inline TunedThreshold tune_threshold(const ThresholdTable& table,
                                     double target,
                                     int iterations = 30,
                                     double tolerance = 0.01)
{
    auto [lo, hi] = table.epsilon_range();
    TunedThreshold best{lo, table.ratio(lo), false};
    auto consider = [&](double eps, double r) {
        if (std::abs(r - target) < std::abs(best.achieved - target)) {
            best = {eps, r, false};
        }
    };
    consider(hi, table.ratio(hi));
    for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = table.ratio(mid);
        consider(mid, r);
        if (r < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best.missed = std::abs(best.achieved - target) > tolerance;
    return best;
}

}  // namespace tprune
