#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "index.hpp"
#include "time_window.hpp"
#include "tokenize.hpp"

namespace tprune {

enum class QueryKind { inclusive, exclusive };

inline QueryKind parse_query_kind(std::string_view s)
{
    if (s == "inclusive") {
        return QueryKind::inclusive;
    }
    if (s == "exclusive") {
        return QueryKind::exclusive;
    }
    throw invalid_argument_error("unknown query kind '" + std::string(s) + "'");
}

inline std::string_view to_string(QueryKind k)
{
    return k == QueryKind::inclusive ? "inclusive" : "exclusive";
}

/// Keywords plus, for exclusive queries, a set of time windows used as a
/// strict filter. Inclusive queries carry their dates as ordinary terms.
struct Query {
    std::string qid;
    std::vector<std::string> terms;
    std::vector<TimeWindow> time_constraint;
    QueryKind kind = QueryKind::inclusive;
    /// Topic the query was generated from, when it was.
    std::string topic;

    friend bool operator==(const Query&, const Query&) = default;
};

struct Hit {
    DocId doc = 0;
    double score = 0.0;

    friend bool operator==(const Hit&, const Hit&) = default;
};

struct RankedResult {
    std::string qid;
    std::vector<Hit> hits;  // decreasing score, ascending doc on ties
};

struct Bm25Params {
    double k1 = 2.0;
    double b = 0.75;
};

inline constexpr std::size_t default_depth = 1000;

/// ln((N - df + 0.5) / (df + 0.5)); negative once df > N/2.
inline double bm25_idf(double n_docs, double df)
{
    return std::log((n_docs - df + 0.5) / (df + 0.5));
}

inline double bm25_term_weight(double tf, double idf, double doc_len, double avgdl, const Bm25Params& prm)
{
    return idf * tf * (prm.k1 + 1.0) / (tf + prm.k1 * (1.0 - prm.b + prm.b * doc_len / avgdl));
}

inline std::uint32_t term_frequency(const PostingList& pl, DocId doc)
{
    auto it = std::lower_bound(pl.postings.begin(), pl.postings.end(), doc,
                               [](const Posting& p, DocId d) { return p.doc < d; });
    return it != pl.postings.end() && it->doc == doc ? it->tf : 0;
}

/// BM25 of one document against the query terms, using build-time lengths
/// and document frequencies. Terms the document lacks contribute zero.
inline double bm25_score(const InvertedIndex& idx,
                         const std::vector<std::string>& terms,
                         DocId doc,
                         const Bm25Params& prm = {})
{
    if (doc >= idx.n_docs()) {
        throw not_found_error("document id out of range");
    }
    double score = 0.0;
    const double n = static_cast<double>(idx.stats.n_docs);
    for (const auto& t : terms) {
        const auto* pl = idx.find(t);
        if (pl == nullptr) {
            continue;
        }
        const auto tf = term_frequency(*pl, doc);
        if (tf == 0) {
            continue;
        }
        score += bm25_term_weight(tf, bm25_idf(n, idx.stats.df(t)), idx.stats.doc_len[doc], idx.stats.avgdl, prm);
    }
    return score;
}

inline bool ranks_before(const Hit& a, const Hit& b)
{
    return a.score != b.score ? a.score > b.score : a.doc < b.doc;
}

/// Term-at-a-time BM25 over every document holding a query term, with the
/// exclusive time filter applied afterwards. Returns the top `depth` hits.
inline RankedResult run_query(const InvertedIndex& idx, const Query& q, std::size_t depth = default_depth, const Bm25Params& prm = {})
{
    if (q.terms.empty()) {
        throw invalid_argument_error("query '" + q.qid + "' has no terms");
    }
    if (depth < 1) {
        throw invalid_argument_error("retrieval depth must be at least 1");
    }
    if (q.kind == QueryKind::exclusive && q.time_constraint.empty()) {
        throw invalid_argument_error("exclusive query '" + q.qid + "' has no time constraint");
    }
    const double n = static_cast<double>(idx.stats.n_docs);
    std::unordered_map<DocId, double> acc;
    for (const auto& t : q.terms) {
        const auto* pl = idx.find(t);
        if (pl == nullptr) {
            continue;
        }
        const double idf = bm25_idf(n, idx.stats.df(t));
        for (const auto& p : pl->postings) {
            acc[p.doc] += bm25_term_weight(p.tf, idf, idx.stats.doc_len[p.doc], idx.stats.avgdl, prm);
        }
    }
    RankedResult out;
    out.qid = q.qid;
    out.hits.reserve(acc.size());
    for (const auto& [doc, score] : acc) {
        if (q.kind == QueryKind::exclusive && !any_intersect(q.time_constraint, idx.doc_times[doc])) {
            continue;
        }
        out.hits.push_back({doc, score});
    }
    std::sort(out.hits.begin(), out.hits.end(), ranks_before);
    if (out.hits.size() > depth) {
        out.hits.resize(depth);
    }
    return out;
}

/// Builds a query from free text with the index's tokenizer settings.
inline Query make_query(std::string qid,
                        std::string_view text,
                        QueryKind kind,
                        std::vector<TimeWindow> time_constraint,
                        const InvertedIndex& idx)
{
    Query q;
    q.qid = std::move(qid);
    q.terms = tokenize(text, TokenizerConfig{idx.stopwords_removed});
    q.kind = kind;
    q.time_constraint = std::move(time_constraint);
    return q;
}

/// TREC run lines: "qid Q0 docno rank score tag".
inline void write_trec_run(std::ostream& out, const RankedResult& r, const InvertedIndex& idx, std::string_view tag)
{
    char buf[64];
    for (std::size_t i = 0; i < r.hits.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f", r.hits[i].score);
        out << r.qid << " Q0 " << idx.doc_names[r.hits[i].doc] << ' ' << (i + 1) << ' ' << buf << ' ' << tag << '\n';
    }
}

}  // namespace tprune
