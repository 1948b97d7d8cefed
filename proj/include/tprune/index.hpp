#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "time_window.hpp"

namespace tprune {

/// Position of a document in the collection, assigned in corpus order.
using DocId = std::uint32_t;

struct Posting {
    DocId doc = 0;
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct PostingList {
    std::string term;
    std::vector<Posting> postings;  // strictly increasing doc

    [[nodiscard]] std::size_t size() const noexcept { return postings.size(); }
    [[nodiscard]] bool empty() const noexcept { return postings.empty(); }

    friend bool operator==(const PostingList&, const PostingList&) = default;
};

struct TermStats {
    std::uint32_t df = 0;
    std::uint64_t ctf = 0;

    friend bool operator==(const TermStats&, const TermStats&) = default;
};

struct CollectionStats {
    std::uint64_t n_docs = 0;
    std::vector<std::uint32_t> doc_len;
    std::uint64_t total_len = 0;
    double avgdl = 0.0;
    std::map<std::string, TermStats, std::less<>> terms;

    [[nodiscard]] std::uint32_t df(std::string_view term) const
    {
        auto it = terms.find(term);
        return it == terms.end() ? 0 : it->second.df;
    }

    [[nodiscard]] std::uint64_t ctf(std::string_view term) const
    {
        auto it = terms.find(term);
        return it == terms.end() ? 0 : it->second.ctf;
    }

    friend bool operator==(const CollectionStats&, const CollectionStats&) = default;
};

struct InvertedIndex {
    std::vector<std::string> doc_names;
    std::vector<std::vector<TimeWindow>> doc_times;
    std::map<std::string, PostingList, std::less<>> lists;
    CollectionStats stats;
    /// Tokenizer setting the index was built with; queries must agree.
    bool stopwords_removed = true;
    /// Set once postings were removed while keeping build-time statistics.
    bool stats_frozen = false;

    [[nodiscard]] std::size_t n_docs() const noexcept { return doc_names.size(); }

    [[nodiscard]] const PostingList* find(std::string_view term) const
    {
        auto it = lists.find(term);
        return it == lists.end() ? nullptr : &it->second;
    }

    [[nodiscard]] const PostingList& at(std::string_view term) const
    {
        if (const auto* pl = find(term)) {
            return *pl;
        }
        throw not_found_error("term '" + std::string(term) + "' not in index");
    }

    [[nodiscard]] std::size_t total_postings() const noexcept
    {
        std::size_t n = 0;
        for (const auto& [_, pl] : lists) {
            n += pl.size();
        }
        return n;
    }

    /// Earliest and latest day touched by any document window.
    [[nodiscard]] std::optional<std::pair<Day, Day>> time_span() const
    {
        std::optional<std::pair<Day, Day>> span;
        for (const auto& ws : doc_times) {
            for (const auto& w : ws) {
                if (!span) {
                    span = std::pair{w.first_day(), w.last_day()};
                } else {
                    span->first = std::min(span->first, w.first_day());
                    span->second = std::max(span->second, w.last_day());
                }
            }
        }
        return span;
    }

    friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;
};

inline InvertedIndex build_index(const Corpus& corpus, bool stopwords_removed = true)
{
    if (corpus.documents.empty()) {
        throw empty_corpus_error("cannot index an empty corpus");
    }
    InvertedIndex idx;
    idx.stopwords_removed = stopwords_removed;
    idx.doc_names.reserve(corpus.documents.size());
    idx.doc_times.reserve(corpus.documents.size());
    std::vector<std::string> sorted;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const auto& d = corpus.documents[i];
        const auto doc = static_cast<DocId>(i);
        idx.doc_names.push_back(d.doc_id);
        idx.doc_times.push_back(d.time_part);
        idx.stats.doc_len.push_back(static_cast<std::uint32_t>(d.tokens.size()));
        idx.stats.total_len += d.tokens.size();

        sorted = d.tokens;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t b = 0; b < sorted.size();) {
            auto e = b;
            while (e < sorted.size() && sorted[e] == sorted[b]) {
                ++e;
            }
            auto& pl = idx.lists[sorted[b]];
            if (pl.term.empty()) {
                pl.term = sorted[b];
            }
            pl.postings.push_back({doc, static_cast<std::uint32_t>(e - b)});
            auto& ts = idx.stats.terms[sorted[b]];
            ts.df += 1;
            ts.ctf += e - b;
            b = e;
        }
    }
    idx.stats.n_docs = idx.doc_names.size();
    idx.stats.avgdl = static_cast<double>(idx.stats.total_len) / static_cast<double>(idx.stats.n_docs);
    return idx;
}

/// Recomputes document lengths, df and ctf from the postings that remain.
inline void recompute_stats(InvertedIndex& idx)
{
    auto& st = idx.stats;
    std::fill(st.doc_len.begin(), st.doc_len.end(), 0);
    st.total_len = 0;
    for (auto& [term, ts] : st.terms) {
        ts = {};
    }
    for (const auto& [term, pl] : idx.lists) {
        auto& ts = st.terms[term];
        for (const auto& p : pl.postings) {
            st.doc_len[p.doc] += p.tf;
            ts.df += 1;
            ts.ctf += p.tf;
            st.total_len += p.tf;
        }
    }
    st.avgdl = st.n_docs == 0 ? 0.0 : static_cast<double>(st.total_len) / static_cast<double>(st.n_docs);
    idx.stats_frozen = false;
}

/// Returns a copy of `original` with each term's postings replaced by
/// `kept[term]` (terms absent from `kept` keep an empty list). Collection
/// statistics stay those of the original unless `recompute` is set.
inline InvertedIndex with_postings(const InvertedIndex& original,
                                   std::map<std::string, std::vector<Posting>, std::less<>> kept,
                                   bool recompute = false)
{
    InvertedIndex out;
    out.doc_names = original.doc_names;
    out.doc_times = original.doc_times;
    out.stats = original.stats;
    out.stopwords_removed = original.stopwords_removed;
    for (const auto& [term, pl] : original.lists) {
        PostingList np{term, {}};
        if (auto it = kept.find(term); it != kept.end()) {
            np.postings = std::move(it->second);
        }
        out.lists.emplace(term, std::move(np));
    }
    out.stats_frozen = out.total_postings() < original.total_postings() || original.stats_frozen;
    if (recompute) {
        recompute_stats(out);
    }
    return out;
}

/// Structural and statistical consistency problems; empty when sound.
inline std::vector<std::string> verify_index(const InvertedIndex& idx)
{
    std::vector<std::string> problems;
    const auto& st = idx.stats;
    const auto n = idx.doc_names.size();
    if (st.n_docs != n || st.doc_len.size() != n || idx.doc_times.size() != n) {
        problems.push_back("document table sizes disagree with N");
    }
    std::uint64_t len_sum = 0;
    for (auto l : st.doc_len) {
        len_sum += l;
    }
    if (len_sum != st.total_len) {
        problems.push_back("total length differs from the sum of document lengths");
    }
    if (n > 0 && st.avgdl != static_cast<double>(st.total_len) / static_cast<double>(n)) {
        problems.push_back("avgdl differs from total_len / N");
    }
    for (std::size_t d = 0; d < idx.doc_times.size(); ++d) {
        for (const auto& w : idx.doc_times[d]) {
            if (!w.valid()) {
                problems.push_back("document " + idx.doc_names[d] + " has an invalid time window");
            }
        }
    }
    if (st.terms.size() != idx.lists.size()) {
        problems.push_back("term statistics and posting lists cover different vocabularies");
    }
    for (const auto& [term, pl] : idx.lists) {
        if (pl.term != term) {
            problems.push_back("list keyed '" + term + "' names term '" + pl.term + "'");
        }
        std::uint64_t ctf = 0;
        for (std::size_t i = 0; i < pl.postings.size(); ++i) {
            const auto& p = pl.postings[i];
            if (p.tf < 1) {
                problems.push_back("term '" + term + "' has a posting with tf 0");
            }
            if (p.doc >= n) {
                problems.push_back("term '" + term + "' references unknown document");
            }
            if (i > 0 && pl.postings[i - 1].doc >= p.doc) {
                problems.push_back("term '" + term + "' postings not strictly increasing");
            }
            ctf += p.tf;
        }
        auto it = st.terms.find(term);
        if (it == st.terms.end()) {
            problems.push_back("term '" + term + "' lacks statistics");
            continue;
        }
        const auto& ts = it->second;
        if (idx.stats_frozen) {
            if (ts.df < pl.size() || ts.ctf < ctf) {
                problems.push_back("term '" + term + "' frozen statistics smaller than its postings");
            }
        } else if (ts.df != pl.size() || ts.ctf != ctf) {
            problems.push_back("term '" + term + "' df/ctf disagree with its postings");
        }
    }
    return problems;
}

inline void check_index(const InvertedIndex& idx)
{
    auto problems = verify_index(idx);
    if (!problems.empty()) {
        throw consistency_error("index inconsistent: " + problems.front());
    }
}

/// Fraction of the original postings that `pruned` no longer holds.
inline double pruning_ratio(const InvertedIndex& original, const InvertedIndex& pruned)
{
    if (original.n_docs() != pruned.n_docs()) {
        throw consistency_error("pruned index has a different document table");
    }
    std::size_t orig_total = original.total_postings();
    std::size_t kept = 0;
    for (const auto& [term, pl] : pruned.lists) {
        if (pl.empty()) {
            continue;
        }
        const auto* ol = original.find(term);
        if (ol == nullptr) {
            throw consistency_error("pruned index has term '" + term + "' missing from original");
        }
        auto it = ol->postings.begin();
        for (const auto& p : pl.postings) {
            it = std::lower_bound(it, ol->postings.end(), p.doc,
                                  [](const Posting& a, DocId d) { return a.doc < d; });
            if (it == ol->postings.end() || !(*it == p)) {
                throw consistency_error("pruned posting for '" + term + "' not in original");
            }
        }
        kept += pl.size();
    }
    if (orig_total == 0) {
        throw consistency_error("original index has no postings");
    }
    return static_cast<double>(orig_total - kept) / static_cast<double>(orig_total);
}

}  // namespace tprune
