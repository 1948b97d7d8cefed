#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "index.hpp"

namespace tprune {

/// Jelinek-Mercer interpolation weight on the collection model.
inline constexpr double jm_lambda = 0.6;

/// p(t|d) = (1 - lambda) tf/|d| + lambda ctf/|C|.
inline double jm_score(double tf, double doc_len, double ctf, double collection_len, double lambda = jm_lambda)
{
    const double doc_part = doc_len > 0.0 ? tf / doc_len : 0.0;
    return (1.0 - lambda) * doc_part + lambda * ctf / collection_len;
}

struct ScoredDoc {
    DocId doc = 0;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Orders by decreasing score, then increasing document id.
inline bool relevance_order(const ScoredDoc& a, const ScoredDoc& b)
{
    return a.score != b.score ? a.score > b.score : a.doc < b.doc;
}

struct RelevanceList {
    std::string term;
    std::vector<ScoredDoc> entries;
};

/// Language-model relevance of every document in the term's posting list,
/// using the build-time document lengths and collection statistics.
inline RelevanceList relevance_scores(const InvertedIndex& idx, std::string_view term, double lambda = jm_lambda)
{
    const auto& pl = idx.at(term);
    const double ctf = static_cast<double>(idx.stats.ctf(term));
    const double clen = static_cast<double>(idx.stats.total_len);
    RelevanceList out;
    out.term = std::string(term);
    out.entries.reserve(pl.size());
    for (const auto& p : pl.postings) {
        out.entries.push_back({p.doc, jm_score(p.tf, idx.stats.doc_len[p.doc], ctf, clen, lambda)});
    }
    std::sort(out.entries.begin(), out.entries.end(), relevance_order);
    return out;
}

}  // namespace tprune
