#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tprune/prune.hpp"
#include "tprune/synthetic.hpp"

using namespace tprune;

namespace {

InvertedIndex toy_index()
{
    return build_index(parse_corpus(TPRUNE_TEST_DATA "/toy5.jsonl", CorpusFormat::jsonl));
}

InvertedIndex seeded_index(std::uint64_t seed)
{
    SyntheticConfig cfg;
    cfg.n_docs = 150;
    cfg.vocab = 60;
    cfg.repeat_prob = 0.4;
    return build_index(random_corpus(cfg, seed));
}

struct OracleRow {
    std::string term;
    std::string doc;
    double tcp = 0.0;
    bool tcp_k10 = false;
    bool tcp_k2 = false;
    double ipu = 0.0;
    bool ipu_keep = false;
    double z = 0.0;
    bool z_keep = false;
};

std::vector<OracleRow> baseline_oracle()
{
    std::ifstream in(TPRUNE_TEST_DATA "/baseline_oracle.csv");
    std::string line;
    std::getline(in, line);
    std::vector<OracleRow> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            f.push_back(cell);
        }
        rows.push_back({f[0], f[1], std::stod(f[4]), f[5] == "1", f[6] == "1", std::stod(f[7]), f[8] == "1",
                        std::stod(f[9]), f[10] == "1"});
    }
    return rows;
}

std::set<std::pair<std::string, std::string>> retained(const InvertedIndex& idx)
{
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& [term, pl] : idx.lists) {
        for (const auto& p : pl.postings) {
            out.emplace(term, idx.doc_names[p.doc]);
        }
    }
    return out;
}

std::set<std::pair<std::string, std::string>> oracle_set(const std::vector<OracleRow>& rows, bool OracleRow::*keep)
{
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& r : rows) {
        if (r.*keep) {
            out.emplace(r.term, r.doc);
        }
    }
    return out;
}

AspectSets global_sets(const InvertedIndex& idx)
{
    AspectSets sets;
    for (const auto& [term, pl] : idx.lists) {
        sets.emplace(term, global_only(idx, term));
    }
    return sets;
}

bool is_subset(const InvertedIndex& pruned, const InvertedIndex& original)
{
    for (const auto& [term, pl] : pruned.lists) {
        const auto& o = original.at(term).postings;
        if (!std::includes(o.begin(), o.end(), pl.postings.begin(), pl.postings.end(),
                           [](const Posting& a, const Posting& b) { return a.doc < b.doc; })) {
            return false;
        }
        for (const auto& p : pl.postings) {
            if (std::find(o.begin(), o.end(), p) == o.end()) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST(Relevance, Examples)
{
    EXPECT_DOUBLE_EQ(jm_score(2, 4, 10, 100), 0.26);
    Corpus c;
    c.documents.push_back({"b", {"x", "y"}, {}});
    c.documents.push_back({"a", {"x", "y"}, {}});
    c.documents.push_back({"c", {"x", "x"}, {}});
    auto rel = relevance_scores(build_index(c), "x");
    ASSERT_EQ(rel.entries.size(), 3u);
    EXPECT_EQ(rel.entries[0].doc, 2u);
    EXPECT_EQ(rel.entries[1].doc, 0u);
    EXPECT_EQ(rel.entries[2].doc, 1u);
    EXPECT_EQ(rel.entries[1].score, rel.entries[2].score);
}

TEST(Relevance, ToyCorpusMatchesHandComputation)
{
    auto idx = toy_index();
    // |C| = 22 tokens; war: ctf 7, d1 tf 2 / 4, d2 tf 3 / 5, d4 1 / 6, d5 1 / 3
    auto rel = relevance_scores(idx, "war");
    const double bg = 0.6 * 7.0 / 22.0;
    std::vector<std::pair<std::string, double>> expect{
        {"d2", 0.4 * 3 / 5 + bg}, {"d1", 0.4 * 2 / 4 + bg}, {"d5", 0.4 * 1 / 3 + bg}, {"d4", 0.4 * 1 / 6 + bg}};
    ASSERT_EQ(rel.entries.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        EXPECT_EQ(idx.doc_names[rel.entries[i].doc], expect[i].first);
        EXPECT_NEAR(rel.entries[i].score, expect[i].second, 1e-15);
    }
}

TEST(Criterion, Examples)
{
    DiversityProblem p;
    p.entries = {{0, 0.5}};
    p.aspects_of = {{0}};
    p.aspect_weight = {1.0};
    EXPECT_EQ(criterion(p, std::vector<std::size_t>{}), 0.0);
    EXPECT_NEAR(criterion(p, std::vector<std::size_t>{0}), 0.5 / std::log(2.0), 1e-15);
    EXPECT_NEAR(0.5 / std::log(2.0), 0.7213, 1e-4);
}

TEST(Criterion, MatchesDirectSumOracle)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        auto p = oracle::random_problem(rng, 8, 3);
        std::vector<bool> in(p.size());
        std::vector<std::size_t> sel;
        for (std::size_t j = 0; j < p.size(); ++j) {
            in[j] = rng() % 2 == 0;
            if (in[j]) {
                sel.push_back(j);
            }
        }
        EXPECT_NEAR(criterion(p, sel), oracle::value(p, in), 1e-12);
    }
}

TEST(NextBest, FirstPickIsClosedForm)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        auto p = oracle::random_problem(rng, 10, 4);
        double best = -1.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            double g = 0.0;
            for (auto w : p.aspects_of[j]) {
                g += p.aspect_weight[w] * p.entries[j].score / std::log(2.0);
            }
            best = std::max(best, g);
        }
        SelectionState st(p);
        auto pick = next_best(p, st);
        ASSERT_TRUE(pick);
        EXPECT_NEAR(pick->delta, best, 1e-12);
    }
}

TEST(NextBest, MatchesReevaluationOracle)
{
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 200; ++i) {
        auto p = oracle::random_problem(rng, 10, 4);
        SelectionState st(p);
        std::vector<bool> in(p.size(), false);
        for (std::size_t step = 0; step < p.size(); ++step) {
            auto want = oracle::next_best(p, in);
            auto got = next_best(p, st);
            ASSERT_TRUE(want && got);
            ASSERT_EQ(got->position, want->position) << "instance " << i << " step " << step;
            EXPECT_NEAR(got->delta, want->delta, 1e-12);
            in[want->position] = true;
        }
        EXPECT_FALSE(next_best(p, st));
    }
}

TEST(NextBest, OneAspectFollowsRelevanceOrder)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        auto p = oracle::random_problem(rng, 10, 1);
        for (auto& ws : p.aspects_of) {
            ws = {0};
        }
        auto d = diversify(p, p.size());
        for (std::size_t j = 0; j < d.picks.size(); ++j) {
            EXPECT_EQ(d.picks[j].position, j);
        }
    }
}

TEST(Diversify, FullSelectionAndClamping)
{
    std::mt19937_64 rng(3);
    auto p = oracle::random_problem(rng, 9, 3);
    auto all = diversify(p, p.size() + 4);
    EXPECT_TRUE(all.clamped);
    EXPECT_EQ(all.requested, p.size() + 4);
    EXPECT_EQ(all.picks.size(), p.size());
    EXPECT_NEAR(all.value, oracle::value(p, std::vector<bool>(p.size(), true)), 1e-12);
}

TEST(Diversify, GreedyWithinBoundOfOptimum)
{
    std::mt19937_64 rng(99);
    const double bound = 1.0 - 1.0 / std::exp(1.0);
    for (int i = 0; i < 60; ++i) {
        auto p = oracle::random_problem(rng, 12, 4);
        const std::size_t k = 1 + rng() % 4;
        EXPECT_GE(diversify(p, k).value, bound * oracle::optimum(p, k) - 1e-12);
    }
}

TEST(Diversify, BimodalInstanceSplitsAcrossAspects)
{
    // Aspect 0 holds the four most relevant documents. The second pick from
    // aspect 0 gains 0.5 * 0.9 / ln 3 = 0.41; the first from aspect 1 gains
    // 0.5 * 0.6 / ln 2 = 0.43.
    DiversityProblem p;
    p.entries = {{0, 1.0}, {1, 0.9}, {2, 0.8}, {3, 0.7}, {4, 0.6}, {5, 0.5}};
    p.aspects_of = {{0}, {0}, {0}, {0}, {1}, {1}};
    p.aspect_weight = {0.5, 0.5};
    auto d = diversify(p, 2);
    ASSERT_EQ(d.picks.size(), 2u);
    EXPECT_EQ(d.picks[0].doc, 0u);
    EXPECT_EQ(d.picks[1].doc, 4u);
    EXPECT_NEAR(d.value, oracle::optimum(p, 2), 1e-12);
}

TEST(DiversifiedPrune, FullBudgetLeavesIndexUnchanged)
{
    auto idx = seeded_index(1);
    PruneConfig cfg;
    cfg.mode = BudgetMode::fixed_k;
    cfg.k = 100000;
    auto pruned = diversified_topk_prune(idx, build_aspect_sets(idx, AspectConfig{}), cfg);
    EXPECT_EQ(pruning_ratio(idx, pruned), 0.0);
    EXPECT_EQ(pruned.lists, idx.lists);
}

TEST(DiversifiedPrune, GlobalAspectDegeneratesToRelevanceTopK)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto idx = seeded_index(seed);
        PruneConfig cfg;
        cfg.mode = BudgetMode::fixed_k;
        cfg.k = 4;
        auto pruned = diversified_topk_prune(idx, global_sets(idx), cfg);
        for (const auto& [term, pl] : idx.lists) {
            auto rel = relevance_scores(idx, term);
            std::set<DocId> top;
            for (std::size_t i = 0; i < std::min<std::size_t>(4, rel.entries.size()); ++i) {
                top.insert(rel.entries[i].doc);
            }
            std::set<DocId> kept;
            for (const auto& p : pruned.at(term).postings) {
                kept.insert(p.doc);
            }
            EXPECT_EQ(kept, top) << term;
        }
    }
}

TEST(DiversifiedPrune, RatioModeBudgetsMatchRecount)
{
    auto idx = seeded_index(4);
    auto sets = build_aspect_sets(idx, AspectConfig{});
    for (double r : {0.1, 0.5, 0.9}) {
        PruneConfig cfg;
        cfg.target_ratio = r;
        auto pruned = diversified_topk_prune(idx, sets, cfg);
        EXPECT_TRUE(is_subset(pruned, idx));
        for (const auto& [term, pl] : idx.lists) {
            const double n = static_cast<double>(pl.size());
            const auto want = std::max(1.0, std::min(n, std::round((1.0 - r) * n)));
            EXPECT_EQ(static_cast<double>(pruned.at(term).size()), want) << term << " at " << r;
        }
    }
}

TEST(DiversifiedPrune, NearGlobalSmoothingAndErrors)
{
    auto idx = seeded_index(2);
    AspectConfig acfg;
    acfg.lambda_w = 0.999;
    auto sets = build_aspect_sets(idx, acfg);
    PruneConfig cfg;
    cfg.target_ratio = 0.5;
    auto pruned = diversified_topk_prune(idx, sets, cfg);
    EXPECT_TRUE(verify_index(pruned).empty());
    EXPECT_TRUE(is_subset(pruned, idx));

    sets.erase(sets.begin());
    EXPECT_THROW(diversified_topk_prune(idx, sets, cfg), not_found_error);
    cfg.target_ratio = 1.0;
    EXPECT_THROW(diversified_topk_prune(idx, global_sets(idx), cfg), invalid_argument_error);
}

TEST(Baselines, ScoresMatchSpreadsheetOracle)
{
    auto idx = toy_index();
    const auto rows = baseline_oracle();
    ASSERT_EQ(rows.size(), idx.total_postings());
    for (const auto& [term, pl] : idx.lists) {
        auto tcp = tcp_scores(idx, term);
        auto ipu = ipu_scores(idx, term);
        auto z = n2p2_scores(idx, term);
        for (std::size_t i = 0; i < pl.size(); ++i) {
            const auto& doc = idx.doc_names[pl.postings[i].doc];
            auto row = std::find_if(rows.begin(), rows.end(), [&](const OracleRow& r) { return r.term == term && r.doc == doc; });
            ASSERT_NE(row, rows.end());
            EXPECT_NEAR(tcp.value[i], row->tcp, 1e-12);
            EXPECT_NEAR(ipu.value[i], row->ipu, 1e-12);
            EXPECT_NEAR(z.value[i], row->z, 1e-12);
            EXPECT_FALSE(z.undefined[i]);
        }
    }
}

TEST(Baselines, RetainedSetsMatchSpreadsheetOracle)
{
    auto idx = toy_index();
    const auto rows = baseline_oracle();
    EXPECT_EQ(retained(tcp_prune(idx, 10, 0.8)), oracle_set(rows, &OracleRow::tcp_k10));
    EXPECT_EQ(retained(tcp_prune(idx, 2, 0.8)), oracle_set(rows, &OracleRow::tcp_k2));
    EXPECT_EQ(retained(ipu_prune(idx, 0.35)), oracle_set(rows, &OracleRow::ipu_keep));
    EXPECT_EQ(retained(n2p2_prune(idx, 0.5)), oracle_set(rows, &OracleRow::z_keep));

    std::set<std::pair<std::string, std::string>> z_at_one;
    for (const auto& r : rows) {
        if (!(r.z < 1.0)) {
            z_at_one.emplace(r.term, r.doc);
        }
    }
    EXPECT_EQ(retained(n2p2_prune(idx, 1.0)), z_at_one);
}

TEST(Baselines, BoundaryExamples)
{
    auto idx = seeded_index(3);
    // At epsilon = 1 the k-th best posting sits exactly on the threshold and stays.
    auto tcp = tcp_prune(idx, 10, 1.0);
    for (const auto& [term, pl] : idx.lists) {
        EXPECT_GE(tcp.at(term).size(), std::min<std::size_t>(10, pl.size())) << term;
    }
    auto short_lists = tcp_prune(idx, 100000, 1.0);
    EXPECT_EQ(pruning_ratio(idx, short_lists), 0.0);
    EXPECT_EQ(pruning_ratio(idx, ipu_prune(idx, 0.0)), 0.0);
    EXPECT_THROW(tcp_prune(idx, 10, 0.0), invalid_argument_error);
    EXPECT_THROW(tcp_prune(idx, 10, 1.5), invalid_argument_error);
    EXPECT_THROW(ipu_prune(idx, -1.0), invalid_argument_error);

    // Uniform scores: A = ln(n) / n for every posting.
    Corpus c;
    for (int i = 0; i < 4; ++i) {
        c.documents.push_back({"d" + std::to_string(i), {"x", "y"}, {}});
    }
    auto flat = build_index(c);
    for (double a : ipu_scores(flat, "x").value) {
        EXPECT_NEAR(a, std::log(4.0) / 4.0, 1e-15);
    }
    EXPECT_EQ(ipu_prune(flat, std::log(4.0) / 4.0 - 1e-9).at("x").size(), 4u);

    // Equal proportions give Z = 0, pruned for any positive epsilon; at epsilon 0
    // only negative statistics go.
    auto zero = n2p2_scores(flat, "x");
    for (double z : zero.value) {
        EXPECT_NEAR(z, 0.0, 1e-15);
    }
    EXPECT_TRUE(n2p2_prune(flat, 1e-6).at("x").empty());
    auto n2 = n2p2_prune(idx, 0.0);
    for (const auto& [term, pl] : idx.lists) {
        auto z = n2p2_scores(idx, term);
        std::size_t nonneg = 0;
        for (double v : z.value) {
            nonneg += v >= 0.0 ? 1 : 0;
        }
        EXPECT_EQ(n2.at(term).size(), nonneg);
    }
}

TEST(Baselines, UndefinedStatisticIsKept)
{
    EXPECT_FALSE(n2p2_statistic(1, 0, 3, 10));
    EXPECT_FALSE(n2p2_statistic(4, 4, 4, 4));
    // A one-word collection has p = 1 everywhere, so E = 0.
    Corpus c;
    c.documents.push_back({"a", {"x"}, {}});
    c.documents.push_back({"b", {"x", "x"}, {}});
    auto idx = build_index(c);
    std::size_t undefined = 0;
    auto pruned = n2p2_prune(idx, 5.0, &undefined);
    EXPECT_EQ(undefined, 2u);
    EXPECT_EQ(pruned.at("x").size(), 2u);
}

TEST(Baselines, RetainedSetsShrinkAsThresholdGrows)
{
    auto idx = seeded_index(7);
    for (auto m : {Method::tcp, Method::ipu, Method::n2p2}) {
        ThresholdTable table(idx, m);
        auto [lo, hi] = table.epsilon_range();
        auto prev = retained(table.apply(idx, lo));
        double prev_ratio = table.ratio(lo);
        for (int i = 1; i <= 25; ++i) {
            const double eps = lo + (hi - lo) * i / 25.0;
            auto cur = retained(table.apply(idx, eps));
            EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) << to_string(m);
            EXPECT_GE(table.ratio(eps), prev_ratio);
            EXPECT_TRUE(is_subset(table.apply(idx, eps), idx));
            prev = std::move(cur);
            prev_ratio = table.ratio(eps);
        }
    }
}

TEST(Baselines, BisectionReachesTargets)
{
    SyntheticConfig cfg;
    cfg.n_docs = 600;
    cfg.vocab = 200;
    cfg.repeat_prob = 0.5;
    auto idx = build_index(random_corpus(cfg, 12));
    for (auto m : {Method::ipu, Method::n2p2}) {
        ThresholdTable table(idx, m);
        for (double target : {0.3, 0.5, 0.7}) {
            auto t = tune_threshold(table, target);
            EXPECT_FALSE(t.missed) << to_string(m) << " " << target << " got " << t.achieved;
            EXPECT_DOUBLE_EQ(t.achieved, pruning_ratio(idx, table.apply(idx, t.epsilon)));
        }
    }
}
