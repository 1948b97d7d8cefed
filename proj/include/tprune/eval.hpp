#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "diversify.hpp"
#include "error.hpp"
#include "gmm.hpp"
#include "index.hpp"
#include "parallel.hpp"
#include "prune.hpp"
#include "search.hpp"

namespace tprune {

// ---------------------------------------------------------------------------
// Relevance judgments

/// Graded judgments; pairs that are absent have grade 0.
struct Qrels {
    std::map<std::string, std::map<std::string, int>> grades;

    void set(const std::string& qid, const std::string& docno, int grade)
    {
        if (grade < 0) {
            throw invalid_argument_error("relevance grades must be non-negative");
        }
        grades[qid][docno] = grade;
    }

    [[nodiscard]] int grade(const std::string& qid, const std::string& docno) const
    {
        auto q = grades.find(qid);
        if (q == grades.end()) {
            return 0;
        }
        auto d = q->second.find(docno);
        return d == q->second.end() ? 0 : d->second;
    }

    [[nodiscard]] std::size_t relevant_count(const std::string& qid) const
    {
        auto q = grades.find(qid);
        if (q == grades.end()) {
            return 0;
        }
        return static_cast<std::size_t>(
            std::count_if(q->second.begin(), q->second.end(), [](const auto& kv) { return kv.second >= 1; }));
    }

    friend bool operator==(const Qrels&, const Qrels&) = default;
};

/// TREC qrels: "qid iteration docno grade" per line.
inline Qrels read_qrels(std::istream& in)
{
    Qrels q;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string qid;
        std::string iter;
        std::string docno;
        int grade = 0;
        if (!(ss >> qid)) {
            continue;
        }
        if (!(ss >> iter >> docno >> grade) || grade < 0) {
            throw parse_error("qrels line " + std::to_string(lineno) + " is malformed");
        }
        q.set(qid, docno, grade);
    }
    return q;
}

inline Qrels read_qrels(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open qrels file '" + path + "'");
    }
    return read_qrels(in);
}

inline void write_qrels(std::ostream& out, const Qrels& q)
{
    for (const auto& [qid, docs] : q.grades) {
        for (const auto& [docno, grade] : docs) {
            out << qid << " 0 " << docno << ' ' << grade << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Metrics

/// Binary-relevance average precision (grade >= 1 is relevant). Zero when
/// the query has no relevant documents.
inline double average_precision(const std::vector<std::string>& ranking, const Qrels& qrels, const std::string& qid)
{
    const auto r = qrels.relevant_count(qid);
    if (r == 0) {
        return 0.0;
    }
    double sum = 0.0;
    std::size_t found = 0;
    for (std::size_t k = 0; k < ranking.size(); ++k) {
        if (qrels.grade(qid, ranking[k]) >= 1) {
            ++found;
            sum += static_cast<double>(found) / static_cast<double>(k + 1);
        }
    }
    return sum / static_cast<double>(r);
}

/// Graded NDCG at `depth` with gain = grade and discount c(j); zero when
/// the ideal DCG is zero.
inline double ndcg(const std::vector<std::string>& ranking,
                   const Qrels& qrels,
                   const std::string& qid,
                   std::size_t depth,
                   Discount disc = Discount::ln)
{
    double dcg = 0.0;
    for (std::size_t j = 0; j < std::min(depth, ranking.size()); ++j) {
        dcg += discount(disc, j + 1) * qrels.grade(qid, ranking[j]);
    }
    std::vector<int> ideal;
    if (auto q = qrels.grades.find(qid); q != qrels.grades.end()) {
        for (const auto& [_, g] : q->second) {
            ideal.push_back(g);
        }
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t j = 0; j < std::min(depth, ideal.size()); ++j) {
        idcg += discount(disc, j + 1) * ideal[j];
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

inline std::vector<std::string> ranked_docnos(const RankedResult& r, const InvertedIndex& idx)
{
    std::vector<std::string> out;
    out.reserve(r.hits.size());
    for (const auto& h : r.hits) {
        out.push_back(idx.doc_names[h.doc]);
    }
    return out;
}

struct QueryScore {
    std::string qid;
    double ap = 0.0;
    double ndcg = 0.0;
    bool judged = false;
};

struct Effectiveness {
    double map = 0.0;
    double ndcg = 0.0;
    /// Queries with at least one relevant document; the others are excluded.
    std::size_t n_queries = 0;
    std::vector<QueryScore> per_query;
};

inline Effectiveness evaluate(const InvertedIndex& idx,
                              const std::vector<Query>& queries,
                              const Qrels& qrels,
                              std::size_t depth = default_depth,
                              Discount disc = Discount::ln,
                              unsigned threads = 1)
{
    Effectiveness out;
    out.per_query.resize(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) {
        const auto& q = queries[i];
        auto& s = out.per_query[i];
        s.qid = q.qid;
        s.judged = qrels.relevant_count(q.qid) > 0;
        if (!s.judged) {
            return;
        }
        const auto ranking = ranked_docnos(run_query(idx, q, depth), idx);
        s.ap = average_precision(ranking, qrels, q.qid);
        s.ndcg = ndcg(ranking, qrels, q.qid, depth, disc);
    });
    for (const auto& s : out.per_query) {
        if (s.judged) {
            out.map += s.ap;
            out.ndcg += s.ndcg;
            ++out.n_queries;
        }
    }
    if (out.n_queries > 0) {
        out.map /= static_cast<double>(out.n_queries);
        out.ndcg /= static_cast<double>(out.n_queries);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Topics, query files and query generation

struct Topic {
    std::string qid;
    std::string title;
    std::string description;
};

/// One JSON object per line: {"qid": ..., "title": ..., "description": ...}.
inline std::vector<Topic> read_topics(std::istream& in)
{
    std::vector<Topic> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            auto j = nlohmann::json::parse(line);
            out.push_back({j.at("qid").get<std::string>(), j.at("title").get<std::string>(),
                           j.value("description", std::string{})});
        } catch (const std::exception& e) {
            throw parse_error("topics line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<Topic> read_topics(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open topics file '" + path + "'");
    }
    return read_topics(in);
}

inline void write_queries(std::ostream& out, const std::vector<Query>& queries)
{
    for (const auto& q : queries) {
        nlohmann::json j;
        j["qid"] = q.qid;
        j["topic"] = q.topic;
        j["kind"] = std::string(to_string(q.kind));
        j["terms"] = q.terms;
        j["time"] = time_part_json(q.time_constraint);
        out << j.dump() << '\n';
    }
}

/// Reads a query file. Each line holds either pre-tokenized "terms" or a
/// free "text" field that is tokenized like the index.
inline std::vector<Query> read_queries(std::istream& in, const TokenizerConfig& tok = {})
{
    std::vector<Query> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            auto j = nlohmann::json::parse(line);
            Query q;
            q.qid = j.at("qid").get<std::string>();
            q.topic = j.value("topic", std::string{});
            q.kind = parse_query_kind(j.value("kind", std::string{"inclusive"}));
            if (j.contains("terms")) {
                q.terms = j.at("terms").get<std::vector<std::string>>();
            } else {
                q.terms = tokenize(j.at("text").get<std::string>(), tok);
            }
            if (auto t = j.find("time"); t != j.end()) {
                for (const auto& w : *t) {
                    TimeWindow tw{detail::json_day(w.at(0)), detail::json_day(w.at(1)), detail::json_day(w.at(2)),
                                  detail::json_day(w.at(3))};
                    validate(tw);
                    q.time_constraint.push_back(tw);
                }
            }
            out.push_back(std::move(q));
        } catch (const std::exception& e) {
            throw parse_error("queries line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<Query> read_queries(const std::string& path, const TokenizerConfig& tok = {})
{
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open queries file '" + path + "'");
    }
    return read_queries(in, tok);
}

enum class Interval { daily, weekly, monthly };

inline Interval parse_interval(std::string_view s)
{
    if (s == "daily") {
        return Interval::daily;
    }
    if (s == "weekly") {
        return Interval::weekly;
    }
    if (s == "monthly") {
        return Interval::monthly;
    }
    throw invalid_argument_error("unknown interval '" + std::string(s) + "'");
}

inline Day interval_days(Interval i)
{
    switch (i) {
    case Interval::daily: return 1;
    case Interval::weekly: return 7;
    case Interval::monthly: return 30;
    }
    return 1;
}

inline char interval_tag(Interval i)
{
    return i == Interval::daily ? 'd' : i == Interval::weekly ? 'w' : 'm';
}

inline constexpr std::size_t query_attempts_per_topic = 100;

struct QueryGeneration {
    /// Short (title) and long (title + description) variant per kept window.
    std::vector<Query> queries;
    std::size_t kept = 0;
    std::size_t attempts = 0;
};

/// Draws random windows of 1, 7 or 30 days inside `span` for each topic,
/// keeping those whose exclusive title query retrieves at least one
/// document from `idx`. Topics are visited round-robin until `n_target`
/// windows are kept or every topic used up its attempt budget.
inline QueryGeneration generate_temporal_queries(const std::vector<Topic>& topics,
                                                 std::pair<Day, Day> span,
                                                 Interval interval,
                                                 std::size_t n_target,
                                                 std::uint64_t seed,
                                                 const InvertedIndex& idx,
                                                 std::size_t attempts_per_topic = query_attempts_per_topic)
{
    if (span.first > span.second) {
        throw invalid_argument_error("empty corpus time span");
    }
    const Day len = interval_days(interval);
    const Day last_start = std::max(span.first, span.second - len + 1);
    auto rng = detail::seeded_rng(seed, static_cast<std::uint64_t>(len), 0x51);
    std::uniform_int_distribution<Day> start_dist(span.first, last_start);
    const TokenizerConfig tok{idx.stopwords_removed};

    struct TopicState {
        std::vector<std::string> short_terms;
        std::vector<std::string> long_terms;
        std::size_t attempts = 0;
        std::size_t kept = 0;
    };
    std::vector<TopicState> state;
    for (const auto& t : topics) {
        TopicState s;
        s.short_terms = tokenize(t.title, tok);
        s.long_terms = tokenize(t.title + " " + t.description, tok);
        if (s.short_terms.empty()) {
            s.attempts = attempts_per_topic;
        }
        state.push_back(std::move(s));
    }

    QueryGeneration out;
    bool progress = true;
    while (out.kept < n_target && progress) {
        progress = false;
        for (std::size_t i = 0; i < topics.size() && out.kept < n_target; ++i) {
            auto& s = state[i];
            if (s.attempts >= attempts_per_topic) {
                continue;
            }
            progress = true;
            ++s.attempts;
            ++out.attempts;
            const Day start = start_dist(rng);
            const auto window = TimeWindow::certain(start, start + len - 1);
            Query q;
            q.topic = topics[i].qid;
            q.kind = QueryKind::exclusive;
            q.terms = s.short_terms;
            q.time_constraint = {window};
            q.qid = "probe";
            if (run_query(idx, q, 1).hits.empty()) {
                continue;
            }
            char id[64];
            std::snprintf(id, sizeof(id), "%s-%c%03zu", topics[i].qid.c_str(), interval_tag(interval), s.kept);
            ++s.kept;
            ++out.kept;
            q.qid = std::string(id) + "-s";
            out.queries.push_back(q);
            q.qid = std::string(id) + "-l";
            q.terms = s.long_terms;
            out.queries.push_back(std::move(q));
        }
    }
    return out;
}

/// Every document that passes a query's time filter and contains at least
/// one of its terms is relevant (grade 1).
inline Qrels all_relevant_qrels(const std::vector<Query>& queries, const InvertedIndex& idx)
{
    Qrels out;
    for (const auto& q : queries) {
        for (const auto& t : q.terms) {
            const auto* pl = idx.find(t);
            if (pl == nullptr) {
                continue;
            }
            for (const auto& p : pl->postings) {
                if (q.kind == QueryKind::exclusive && !any_intersect(q.time_constraint, idx.doc_times[p.doc])) {
                    continue;
                }
                out.set(q.qid, idx.doc_names[p.doc], 1);
            }
        }
    }
    return out;
}

/// Projects topic-level judgments onto generated queries: a document keeps
/// its grade only if one of its windows meets the query's time constraint.
/// Judgments are looked up under the query's topic (or its own id).
inline Qrels time_filtered_qrels(const Qrels& original, const std::vector<Query>& queries, const InvertedIndex& idx)
{
    std::unordered_map<std::string_view, DocId> by_name;
    for (DocId d = 0; d < idx.n_docs(); ++d) {
        by_name.emplace(idx.doc_names[d], d);
    }
    Qrels out;
    for (const auto& q : queries) {
        const auto& source = q.topic.empty() ? q.qid : q.topic;
        auto judged = original.grades.find(source);
        if (judged == original.grades.end()) {
            continue;
        }
        for (const auto& [docno, grade] : judged->second) {
            if (grade <= 0) {
                continue;
            }
            if (q.kind == QueryKind::exclusive) {
                auto d = by_name.find(docno);
                if (d == by_name.end() || !any_intersect(q.time_constraint, idx.doc_times[d->second])) {
                    continue;
                }
            }
            out.set(q.qid, docno, grade);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pruning-ratio sweeps

struct SweepConfig {
    std::vector<Method> methods;
    std::vector<double> ratios;
    std::size_t tcp_k = tcp_default_k;
    AspectConfig aspects;
    Discount disc = Discount::ln;
    std::size_t depth = default_depth;
    int bisection_iterations = 30;
    double ratio_tolerance = 0.01;
    unsigned threads = 1;
};

struct SweepRow {
    std::string method;
    double target = 0.0;
    double achieved = 0.0;
    double map = 0.0;
    double ndcg = 0.0;
    std::size_t n_queries = 0;
    std::optional<double> epsilon;
    /// The achieved ratio missed the target by more than the tolerance.
    bool flagged = false;
};

struct EvalReport {
    std::vector<SweepRow> rows;

    void write_csv(std::ostream& out) const
    {
        out << "method,ratio,map,ndcg,n_queries\n";
        char buf[256];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%s,%.4f,%.6f,%.6f,%zu\n", r.method.c_str(), r.achieved, r.map, r.ndcg,
                          r.n_queries);
            out << buf;
        }
    }

    [[nodiscard]] nlohmann::json details() const
    {
        auto arr = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json j;
            j["method"] = r.method;
            j["target_ratio"] = r.target;
            j["achieved_ratio"] = r.achieved;
            j["epsilon"] = r.epsilon ? nlohmann::json(*r.epsilon) : nlohmann::json(nullptr);
            j["flagged"] = r.flagged;
            arr.push_back(std::move(j));
        }
        return arr;
    }

    [[nodiscard]] const SweepRow* find(std::string_view method, double target) const
    {
        for (const auto& r : rows) {
            if (r.method == method && std::abs(r.target - target) < 1e-12) {
                return &r;
            }
        }
        return nullptr;
    }
};

/// Prunes `idx` with every method at every target ratio and measures
/// retrieval effectiveness. Threshold methods reach the ratio by bisection
/// on epsilon; diversified methods use per-term ratio budgets. Ratio 0 is
/// the unpruned index. Rows come out ordered by (method, target ratio).
inline EvalReport sweep(const InvertedIndex& idx,
                        const std::vector<Query>& queries,
                        const Qrels& qrels,
                        const SweepConfig& cfg,
                        std::uint64_t seed)
{
    std::vector<Method> methods = cfg.methods;
    std::sort(methods.begin(), methods.end(), [](Method a, Method b) { return to_string(a) < to_string(b); });
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    std::vector<double> ratios = cfg.ratios;
    std::sort(ratios.begin(), ratios.end());
    ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
    for (double r : ratios) {
        if (!(r >= 0.0 && r < 1.0)) {
            throw invalid_argument_error("sweep ratios must lie in [0, 1)");
        }
    }

    const auto baseline = evaluate(idx, queries, qrels, cfg.depth, cfg.disc, cfg.threads);
    std::map<AspectModel, AspectSets> aspect_cache;
    EvalReport report;
    for (auto m : methods) {
        std::optional<ThresholdTable> table;
        if (!is_diversified(m)) {
            table.emplace(idx, m, cfg.tcp_k);
        } else if (!aspect_cache.contains(aspect_model_of(m))) {
            auto acfg = cfg.aspects;
            acfg.model = aspect_model_of(m);
            acfg.seed = seed;
            aspect_cache.emplace(acfg.model, build_aspect_sets(idx, acfg, cfg.threads));
        }
        for (double target : ratios) {
            SweepRow row;
            row.method = std::string(to_string(m));
            row.target = target;
            if (target == 0.0) {
                row.map = baseline.map;
                row.ndcg = baseline.ndcg;
                row.n_queries = baseline.n_queries;
                report.rows.push_back(row);
                continue;
            }
            InvertedIndex pruned;
            if (table) {
                auto tuned = tune_threshold(*table, target, cfg.bisection_iterations, cfg.ratio_tolerance);
                pruned = table->apply(idx, tuned.epsilon);
                row.epsilon = tuned.epsilon;
            } else {
                PruneConfig pc;
                pc.mode = BudgetMode::ratio;
                pc.target_ratio = target;
                pc.disc = cfg.disc;
                pc.threads = cfg.threads;
                pruned = diversified_topk_prune(idx, aspect_cache.at(aspect_model_of(m)), pc);
            }
            row.achieved = pruning_ratio(idx, pruned);
            row.flagged = std::abs(row.achieved - target) > cfg.ratio_tolerance;
            const auto eff = evaluate(pruned, queries, qrels, cfg.depth, cfg.disc, cfg.threads);
            row.map = eff.map;
            row.ndcg = eff.ndcg;
            row.n_queries = eff.n_queries;
            report.rows.push_back(row);
        }
    }
    return report;
}

}  // namespace tprune
