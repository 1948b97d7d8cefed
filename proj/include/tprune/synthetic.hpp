#pragma once

// Seeded synthetic collections for tests, demos and the bundled data set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "date.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "gmm.hpp"
#include "search.hpp"
#include "time_window.hpp"

namespace tprune {

/// Filler vocabulary word for Zipf rank r (0-based).
inline std::string filler_word(std::size_t r)
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%03zu", r);
    return buf;
}

namespace detail {

class ZipfWords {
public:
    ZipfWords(std::size_t vocab, double exponent)
    {
        if (vocab == 0) {
            throw invalid_argument_error("vocabulary must not be empty");
        }
        std::vector<double> w(vocab);
        for (std::size_t r = 0; r < vocab; ++r) {
            w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
        }
        m_dist = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }

    template <typename Rng>
    std::string operator()(Rng& rng)
    {
        return filler_word(m_dist(rng));
    }

private:
    std::discrete_distribution<std::size_t> m_dist;
};

inline std::string synthetic_id(char prefix, std::size_t n)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%c%05zu", prefix, n);
    return buf;
}

}  // namespace detail

struct SyntheticConfig {
    std::size_t n_docs = 200;
    std::size_t vocab = 150;
    double zipf_exponent = 1.0;
    std::size_t min_len = 5;
    std::size_t max_len = 60;
    Day first_day = day_number(1990, 1, 1);
    Day n_days = 365;
    /// Share of documents without a time part.
    double undated_fraction = 0.0;
    /// Probability that a token repeats an earlier token of the same
    /// document, which gives term frequencies a heavy tail.
    double repeat_prob = 0.0;
};

/// Documents of Zipf-distributed filler words, each dated on one uniformly
/// drawn day (or undated).
inline Corpus random_corpus(const SyntheticConfig& cfg, std::uint64_t seed)
{
    if (cfg.n_docs == 0 || cfg.min_len == 0 || cfg.min_len > cfg.max_len || cfg.n_days < 1) {
        throw invalid_argument_error("invalid synthetic corpus configuration");
    }
    auto rng = detail::seeded_rng(seed, 0x5e, 1);
    detail::ZipfWords words(cfg.vocab, cfg.zipf_exponent);
    std::uniform_int_distribution<std::size_t> len(cfg.min_len, cfg.max_len);
    std::uniform_int_distribution<Day> day(cfg.first_day, cfg.first_day + cfg.n_days - 1);
    std::bernoulli_distribution undated(cfg.undated_fraction);
    std::bernoulli_distribution repeat(cfg.repeat_prob);
    Corpus c;
    for (std::size_t i = 0; i < cfg.n_docs; ++i) {
        Document d;
        d.doc_id = detail::synthetic_id('d', i);
        const auto n = len(rng);
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0 && repeat(rng)) {
                d.tokens.push_back(d.tokens[std::uniform_int_distribution<std::size_t>(0, j - 1)(rng)]);
            } else {
                d.tokens.push_back(words(rng));
            }
        }
        const Day when = day(rng);
        if (!undated(rng)) {
            d.time_part.push_back(TimeWindow::on(when));
        }
        c.documents.push_back(std::move(d));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Two-burst collection
//
// Every event term occurs in a large burst A on a single day, in short
// documents with a high term frequency, and in a small burst B a few weeks
// later, one document every other day, with term frequency 1. B documents
// are shorter still, so their language-model relevance stays close to (but
// below) the A documents' while their TF-IDF is far lower.

inline const std::vector<std::string>& event_terms()
{
    static const std::vector<std::string> terms{"quake",   "flood", "strike", "summit",
                                                "eclipse", "merger", "riot",  "blizzard"};
    return terms;
}

struct TwoBurstConfig {
    std::size_t n_events = 8;
    std::size_t n_a = 36;
    std::size_t n_b = 4;
    std::uint32_t tf_a = 8;
    std::size_t len_a = 32;
    std::size_t len_b = 5;
    Day b_offset = 21;
    SyntheticConfig filler{2000, 400, 1.0, 10, 200, day_number(1990, 1, 1), 365, 0.0, 0.7};
};

struct TwoBurstData {
    Corpus corpus;
    std::vector<Topic> topics;
    /// One exclusive query per event term covering its B week.
    std::vector<Query> b_queries;
    std::vector<Day> a_days;
    std::vector<TimeWindow> b_weeks;
};

inline TwoBurstData two_burst_corpus(const TwoBurstConfig& cfg, std::uint64_t seed)
{
    if (cfg.n_events == 0 || cfg.n_events > event_terms().size() || cfg.n_b == 0 || cfg.n_b > 4 ||
        cfg.len_a <= cfg.tf_a || cfg.len_b < 1 || cfg.n_a < 1) {
        throw invalid_argument_error("invalid two-burst configuration");
    }
    TwoBurstData out;
    out.corpus = random_corpus(cfg.filler, seed);
    auto rng = detail::seeded_rng(seed, 0x2b, 2);
    detail::ZipfWords words(cfg.filler.vocab, cfg.filler.zipf_exponent);
    std::size_t next_id = 0;
    const Day spacing = std::max<Day>(1, (cfg.filler.n_days - cfg.b_offset - 7) / static_cast<Day>(cfg.n_events));

    auto add = [&](std::vector<std::string> tokens, Day day) {
        std::shuffle(tokens.begin(), tokens.end(), rng);
        out.corpus.documents.push_back({detail::synthetic_id('e', next_id++), std::move(tokens), {TimeWindow::on(day)}});
    };

    for (std::size_t e = 0; e < cfg.n_events; ++e) {
        const auto& term = event_terms()[e];
        const Day a_day = cfg.filler.first_day + 3 + static_cast<Day>(e) * spacing;
        const Day b_start = a_day + cfg.b_offset;
        out.a_days.push_back(a_day);
        out.b_weeks.push_back(TimeWindow::certain(b_start, b_start + 6));
        for (std::size_t i = 0; i < cfg.n_a; ++i) {
            std::vector<std::string> t(cfg.tf_a, term);
            while (t.size() < cfg.len_a) {
                t.push_back(words(rng));
            }
            add(std::move(t), a_day);
        }
        for (std::size_t i = 0; i < cfg.n_b; ++i) {
            std::vector<std::string> t{term};
            while (t.size() < cfg.len_b) {
                t.push_back(words(rng));
            }
            add(std::move(t), b_start + 2 * static_cast<Day>(i));
        }
        out.topics.push_back({"T" + std::to_string(e + 1), term, "reports on the " + term + " and its aftermath"});
        Query q;
        q.qid = "B" + std::to_string(e + 1);
        q.topic = out.topics.back().qid;
        q.terms = {term};
        q.kind = QueryKind::exclusive;
        q.time_constraint = {out.b_weeks.back()};
        out.b_queries.push_back(std::move(q));
    }
    return out;
}

}  // namespace tprune
