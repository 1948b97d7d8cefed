// tprune: build, prune, query and evaluate temporal inverted indexes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tprune/tprune.hpp"

using nlohmann::json;
using namespace tprune;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error("cannot write '" + path + "'");
    }
    return out;
}

// Everything needed to re-run a command. Thread counts are left out: they
// never change results.
class Manifest {
public:
    explicit Manifest(std::string subcommand)
    {
        m_doc["tool"] = "tprune";
        m_doc["version"] = tprune::version;
        m_doc["subcommand"] = std::move(subcommand);
        m_doc["parameters"] = json::object();
        m_doc["inputs"] = json::array();
        m_doc["outputs"] = json::array();
    }

    json& param(const std::string& key) { return m_doc["parameters"][key]; }
    json& result(const std::string& key) { return m_doc["results"][key]; }

    void input(const std::string& path)
    {
        char crc[16];
        std::snprintf(crc, sizeof(crc), "%08x", detail::crc32_of(slurp(path)));
        m_doc["inputs"].push_back({{"path", path}, {"crc32", crc}});
    }

    void output(const std::string& path) { m_doc["outputs"].push_back(path); }

    [[nodiscard]] std::string dump() const { return m_doc.dump(2) + "\n"; }

    /// Writes `<primary>.manifest.json`.
    void write_beside(const std::string& primary) const { open_out(primary + ".manifest.json") << dump(); }

private:
    json m_doc;
};

std::vector<double> parse_ratio_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw invalid_argument_error("bad ratio '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<Method> parse_method_list(const std::string& s)
{
    std::vector<Method> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_method(item));
    }
    return out;
}

json aspects_json(const AspectSet& set, const InvertedIndex& idx)
{
    json j;
    j["term"] = set.term;
    j["aspects"] = json::array();
    for (const auto& a : set.aspects) {
        j["aspects"].push_back({{"window", time_part_json({a.window})[0]}, {"weight", a.weight}, {"global", a.is_global}});
    }
    j["doc_map"] = json::object();
    for (const auto& [doc, ws] : set.doc_map) {
        j["doc_map"][idx.doc_names[doc]] = ws;
    }
    return j;
}

struct Common {
    unsigned threads = default_threads();
    std::uint64_t seed = 0;
};

struct AspectOptions {
    double lambda_w = 0.3;
    std::size_t k_max = 10;
    bool presence_only = false;

    void add(CLI::App* cmd)
    {
        const CLI::Validator half_open(
            [](std::string& v) {
                const double x = std::stod(v);
                return x >= 0.0 && x < 1.0 ? std::string() : "must lie in [0, 1)";
            },
            "in [0, 1)");
        cmd->add_option("--lambda-w", lambda_w, "Weight of the global aspect G")
            ->capture_default_str()
            ->check(CLI::Number)
            ->check(half_open);
        cmd->add_option("--k-max", k_max, "Largest mixture size tried for dynamic windows")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--presence-only", presence_only, "Count documents rather than term frequencies in time series");
    }

    [[nodiscard]] AspectConfig config(AspectModel model, std::uint64_t seed) const
    {
        AspectConfig c;
        c.model = model;
        c.lambda_w = lambda_w;
        c.k_max = k_max;
        c.seed = seed;
        c.presence_only = presence_only;
        return c;
    }

    void record(Manifest& m) const
    {
        m.param("lambda_w") = lambda_w;
        m.param("k_max") = k_max;
        m.param("presence_only") = presence_only;
    }
};

// ---------------------------------------------------------------------------

struct BuildCmd {
    std::string corpus;
    std::string format = "jsonl";
    std::string out;
    bool keep_stopwords = false;

    int run(const Common&) const
    {
        const TokenizerConfig tok{!keep_stopwords};
        auto c = parse_corpus(corpus, parse_corpus_format(format), tok);
        for (const auto& d : c.diagnostics) {
            std::cerr << "warning: " << d << '\n';
        }
        auto idx = build_index(c, tok.remove_stopwords);
        write_index(idx, out);
        Manifest m("build");
        m.input(corpus);
        m.param("format") = format;
        m.param("stopwords") = tok.remove_stopwords;
        m.output(out);
        m.result("documents") = idx.n_docs();
        m.result("malformed") = c.malformed;
        m.result("terms") = idx.lists.size();
        m.result("postings") = idx.total_postings();
        m.write_beside(out);
        return 0;
    }
};

struct VerifyCmd {
    std::string index;

    int run(const Common&) const
    {
        auto idx = read_index(index);
        auto problems = verify_index(idx);
        Manifest m("verify");
        m.input(index);
        m.result("documents") = idx.n_docs();
        m.result("terms") = idx.lists.size();
        m.result("postings") = idx.total_postings();
        m.result("stats_frozen") = idx.stats_frozen;
        m.result("problems") = problems;
        m.result("ok") = problems.empty();
        std::cout << m.dump();
        return problems.empty() ? 0 : 1;
    }
};

struct WindowsCmd {
    std::string index;
    std::string term;
    std::string model = "simple";
    AspectOptions aspects;
    std::string out;
    std::string histogram;

    int run(const Common& common) const
    {
        auto idx = read_index(index);
        const auto mdl = parse_aspect_model(model);
        const auto series = term_time_series(idx, term, aspects.presence_only);
        json j;
        j["term"] = term;
        j["series"] = json::array();
        for (const auto& [day, n] : series.counts) {
            j["series"].push_back({{"day", day}, {"date", format_iso_date(day)}, {"count", n}});
        }
        j["n_points"] = series.n_points;
        if (!series.empty()) {
            j["fd_window_size"] = fd_window_size(series);
        }
        if (mdl == AspectModel::dynamic && !series.empty()) {
            auto fit = select_k_bic(series, aspects.k_max, common.seed);
            j["gmm"] = {{"K", fit.K},
                        {"weights", fit.weights},
                        {"means", fit.means},
                        {"variances", fit.variances},
                        {"log_likelihood", fit.log_likelihood},
                        {"bic", fit.bic}};
        }
        j["aspect_set"] = aspects_json(build_aspect_set(idx, term, aspects.config(mdl, common.seed)), idx);

        Manifest m("windows");
        m.input(index);
        m.param("term") = term;
        m.param("model") = model;
        m.param("seed") = common.seed;
        aspects.record(m);
        if (!histogram.empty()) {
            auto h = open_out(histogram);
            h << "day,date,count\n";
            for (const auto& [day, n] : series.counts) {
                h << day << ',' << format_iso_date(day) << ',' << n << '\n';
            }
            m.output(histogram);
        }
        if (out.empty()) {
            j["manifest"] = json::parse(m.dump());
            std::cout << j.dump(2) << '\n';
        } else {
            open_out(out) << j.dump(2) << '\n';
            m.output(out);
            m.write_beside(out);
        }
        return 0;
    }
};

struct PruneCmd {
    std::string in;
    std::string out;
    std::string method;
    std::size_t k = 0;
    double ratio = -1.0;
    double epsilon = -1.0;
    std::size_t tcp_k = tcp_default_k;
    std::string discount = "ln";
    bool recompute = false;
    AspectOptions aspects;

    int run(const Common& common) const
    {
        const auto m = parse_method(method);
        const int given = (k > 0 ? 1 : 0) + (ratio >= 0.0 ? 1 : 0) + (epsilon >= 0.0 ? 1 : 0);
        if (given != 1) {
            throw invalid_argument_error("give exactly one of --k, --ratio, --epsilon");
        }
        auto idx = read_index(in);
        Manifest man("prune");
        man.input(in);
        man.param("method") = method;
        man.param("recompute_stats") = recompute;
        InvertedIndex pruned;
        if (is_diversified(m)) {
            if (epsilon >= 0.0) {
                throw invalid_argument_error("diversified pruning takes --k or --ratio, not --epsilon");
            }
            PruneConfig cfg;
            cfg.mode = k > 0 ? BudgetMode::fixed_k : BudgetMode::ratio;
            cfg.k = k;
            cfg.target_ratio = ratio;
            cfg.disc = parse_discount(discount);
            cfg.recompute_stats = recompute;
            cfg.threads = common.threads;
            validate(cfg);
            const auto sets = build_aspect_sets(idx, aspects.config(aspect_model_of(m), common.seed), common.threads);
            pruned = diversified_topk_prune(idx, sets, cfg);
            man.param(k > 0 ? "k" : "ratio") = k > 0 ? json(k) : json(ratio);
            man.param("discount") = discount;
            man.param("seed") = common.seed;
            aspects.record(man);
        } else {
            if (k > 0) {
                throw invalid_argument_error("threshold pruning takes --epsilon or --ratio, not --k");
            }
            if (m == Method::tcp) {
                man.param("tcp_k") = tcp_k;
            }
            ThresholdTable table(idx, m, tcp_k);
            double eps = epsilon;
            if (ratio >= 0.0) {
                if (!(ratio > 0.0 && ratio < 1.0)) {
                    throw invalid_argument_error("target pruning ratio must lie in (0, 1)");
                }
                auto tuned = tune_threshold(table, ratio);
                eps = tuned.epsilon;
                man.param("ratio") = ratio;
                man.result("target_missed") = tuned.missed;
            } else {
                man.param("epsilon") = epsilon;
                if (m == Method::tcp && !(epsilon > 0.0 && epsilon <= 1.0)) {
                    throw invalid_argument_error("TCP epsilon must lie in (0, 1]");
                }
            }
            pruned = table.apply(idx, eps, recompute);
            man.result("epsilon") = eps;
            if (m == Method::n2p2) {
                man.result("undefined_statistic_kept") = table.undefined_count();
            }
        }
        write_index(pruned, out);
        man.output(out);
        man.result("postings_before") = idx.total_postings();
        man.result("postings_after") = pruned.total_postings();
        man.result("achieved_ratio") = pruning_ratio(idx, pruned);
        man.write_beside(out);
        return 0;
    }
};

struct QueryCmd {
    std::string index;
    std::string text;
    std::vector<std::string> times;
    std::string kind;
    std::size_t depth = default_depth;
    std::string qid = "q1";
    std::string tag = "tprune";
    std::string out;

    int run(const Common&) const
    {
        auto idx = read_index(index);
        std::vector<TimeWindow> windows;
        for (const auto& t : times) {
            windows.push_back(parse_time_spec(t));
        }
        const auto k = kind.empty() ? (windows.empty() ? QueryKind::inclusive : QueryKind::exclusive)
                                    : parse_query_kind(kind);
        auto q = make_query(qid, text, k, windows, idx);
        auto result = run_query(idx, q, depth);
        Manifest m("query");
        m.input(index);
        m.param("q") = text;
        m.param("terms") = q.terms;
        m.param("time") = time_part_json(windows);
        m.param("kind") = std::string(to_string(k));
        m.param("depth") = depth;
        m.param("qid") = qid;
        m.param("tag") = tag;
        m.result("hits") = result.hits.size();
        if (out.empty()) {
            write_trec_run(std::cout, result, idx, tag);
            std::cerr << m.dump();
        } else {
            auto o = open_out(out);
            write_trec_run(o, result, idx, tag);
            m.output(out);
            m.write_beside(out);
        }
        return 0;
    }
};

struct GenQueriesCmd {
    std::string index;
    std::string topics;
    std::string interval = "weekly";
    std::size_t n = 100;
    std::string out;
    std::string qrels_out;
    std::string topic_qrels;

    int run(const Common& common) const
    {
        auto idx = read_index(index);
        const auto tps = read_topics(topics);
        const auto span = idx.time_span();
        if (!span) {
            throw invalid_argument_error("index has no dated documents");
        }
        Manifest m("genqueries");
        m.input(index);
        m.input(topics);
        m.param("interval") = interval;
        m.param("n") = n;
        m.param("seed") = common.seed;
        std::vector<Interval> intervals;
        if (interval == "all") {
            intervals = {Interval::daily, Interval::weekly, Interval::monthly};
        } else {
            intervals = {parse_interval(interval)};
        }
        std::vector<Query> queries;
        std::size_t attempts = 0;
        for (auto iv : intervals) {
            auto gen = generate_temporal_queries(tps, *span, iv, n, common.seed, idx);
            attempts += gen.attempts;
            if (gen.kept < n) {
                std::cerr << "warning: kept " << gen.kept << " of " << n << " requested windows\n";
            }
            queries.insert(queries.end(), gen.queries.begin(), gen.queries.end());
        }
        auto o = open_out(out);
        write_queries(o, queries);
        m.output(out);
        m.result("queries") = queries.size();
        m.result("attempts") = attempts;
        if (!qrels_out.empty()) {
            Qrels q;
            if (topic_qrels.empty()) {
                q = all_relevant_qrels(queries, idx);
                m.param("qrels") = "all-relevant";
            } else {
                m.input(topic_qrels);
                q = time_filtered_qrels(read_qrels(topic_qrels), queries, idx);
                m.param("qrels") = "time-filtered";
            }
            auto qo = open_out(qrels_out);
            write_qrels(qo, q);
            m.output(qrels_out);
        }
        m.write_beside(out);
        return 0;
    }
};

struct EvalCmd {
    std::string index;
    std::string queries;
    std::string qrels;
    std::size_t depth = default_depth;
    std::string discount = "ln";
    std::string out;
    std::string run_out;

    int run(const Common& common) const
    {
        auto idx = read_index(index);
        const auto qs = read_queries(queries, TokenizerConfig{idx.stopwords_removed});
        const auto judged = read_qrels(qrels);
        const auto disc = parse_discount(discount);
        const auto eff = evaluate(idx, qs, judged, depth, disc, common.threads);
        json j;
        j["map"] = eff.map;
        j["ndcg"] = eff.ndcg;
        j["n_queries"] = eff.n_queries;
        j["per_query"] = json::array();
        for (const auto& s : eff.per_query) {
            j["per_query"].push_back({{"qid", s.qid}, {"ap", s.ap}, {"ndcg", s.ndcg}, {"judged", s.judged}});
        }
        Manifest m("eval");
        m.input(index);
        m.input(queries);
        m.input(qrels);
        m.param("depth") = depth;
        m.param("discount") = discount;
        if (!run_out.empty()) {
            auto ro = open_out(run_out);
            for (const auto& q : qs) {
                write_trec_run(ro, run_query(idx, q, depth), idx, "tprune");
            }
            m.output(run_out);
        }
        if (out.empty()) {
            j["manifest"] = json::parse(m.dump());
            std::cout << j.dump(2) << '\n';
        } else {
            open_out(out) << j.dump(2) << '\n';
            m.output(out);
            m.write_beside(out);
        }
        return 0;
    }
};

struct SweepCmd {
    std::string index;
    std::string queries;
    std::string qrels;
    std::string methods = "tcp,ipu,2n2p,div-simple,div-sliding,div-dynamic";
    std::string ratios = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::size_t tcp_k = tcp_default_k;
    std::size_t depth = default_depth;
    std::string discount = "ln";
    AspectOptions aspects;
    std::string out;

    int run(const Common& common) const
    {
        auto idx = read_index(index);
        const auto qs = read_queries(queries, TokenizerConfig{idx.stopwords_removed});
        const auto judged = read_qrels(qrels);
        SweepConfig cfg;
        cfg.methods = parse_method_list(methods);
        cfg.ratios = parse_ratio_list(ratios);
        cfg.tcp_k = tcp_k;
        cfg.aspects = aspects.config(AspectModel::simple, common.seed);
        cfg.disc = parse_discount(discount);
        cfg.depth = depth;
        cfg.threads = common.threads;
        const auto report = sweep(idx, qs, judged, cfg, common.seed);
        auto o = open_out(out);
        report.write_csv(o);
        Manifest m("sweep");
        m.input(index);
        m.input(queries);
        m.input(qrels);
        m.param("methods") = methods;
        m.param("ratios") = ratios;
        m.param("tcp_k") = tcp_k;
        m.param("depth") = depth;
        m.param("discount") = discount;
        m.param("seed") = common.seed;
        aspects.record(m);
        m.output(out);
        m.result("rows") = report.details();
        m.write_beside(out);
        for (const auto& r : report.rows) {
            if (r.flagged) {
                std::fprintf(stderr, "warning: %s missed target ratio %.2f (achieved %.4f)\n", r.method.c_str(),
                             r.target, r.achieved);
            }
        }
        return 0;
    }
};

struct SynthCmd {
    std::string kind = "two-burst";
    std::string out;
    std::string topics_out;
    std::string queries_out;
    std::size_t n_docs = 200;
    std::size_t vocab = 150;

    int run(const Common& common) const
    {
        Manifest m("synth");
        m.param("kind") = kind;
        m.param("seed") = common.seed;
        Corpus c;
        if (kind == "random") {
            SyntheticConfig cfg;
            cfg.n_docs = n_docs;
            cfg.vocab = vocab;
            m.param("n_docs") = n_docs;
            m.param("vocab") = vocab;
            c = random_corpus(cfg, common.seed);
        } else if (kind == "two-burst") {
            auto data = two_burst_corpus(TwoBurstConfig{}, common.seed);
            c = std::move(data.corpus);
            if (!topics_out.empty()) {
                auto t = open_out(topics_out);
                for (const auto& tp : data.topics) {
                    t << json{{"qid", tp.qid}, {"title", tp.title}, {"description", tp.description}}.dump() << '\n';
                }
                m.output(topics_out);
            }
            if (!queries_out.empty()) {
                auto q = open_out(queries_out);
                write_queries(q, data.b_queries);
                m.output(queries_out);
            }
        } else {
            throw invalid_argument_error("unknown synthetic corpus kind '" + kind + "'");
        }
        write_jsonl_corpus(out, c);
        m.output(out);
        m.result("documents") = c.documents.size();
        m.write_beside(out);
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Temporal index pruning toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tprune::version));
    Common common;
    app.add_option("--threads", common.threads, "Worker threads (default: $TPRUNE_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", common.seed, "Seed for every randomised step")->capture_default_str();
    app.fallthrough();

    BuildCmd build;
    auto* c_build = app.add_subcommand("build", "Build an index from a corpus");
    c_build->add_option("--corpus", build.corpus, "Corpus file")->required();
    c_build->add_option("--format", build.format, "jsonl or trec")->capture_default_str();
    c_build->add_option("--out", build.out, "Index file to write")->required();
    c_build->add_flag("--keep-stopwords", build.keep_stopwords, "Index stopwords too");

    VerifyCmd verify;
    auto* c_verify = app.add_subcommand("verify", "Check an index for internal consistency");
    c_verify->add_option("index", verify.index, "Index file")->required();

    WindowsCmd windows;
    auto* c_windows = app.add_subcommand("windows", "Dump a term's time series and temporal aspects");
    c_windows->add_option("--index", windows.index, "Index file")->required();
    c_windows->add_option("--term", windows.term, "Term to inspect")->required();
    c_windows->add_option("--model", windows.model, "simple, sliding or dynamic")->capture_default_str();
    windows.aspects.add(c_windows);
    c_windows->add_option("--out", windows.out, "JSON output (default: stdout)");
    c_windows->add_option("--histogram", windows.histogram, "Also write the time series as CSV");

    PruneCmd prune;
    auto* c_prune = app.add_subcommand("prune", "Statically prune an index");
    c_prune->add_option("--in", prune.in, "Index to prune")->required();
    c_prune->add_option("--out", prune.out, "Pruned index to write")->required();
    c_prune->add_option("--method", prune.method, "tcp, ipu, 2n2p, div-simple, div-sliding or div-dynamic")
        ->required();
    auto* budget = c_prune->add_option_group("budget", "Exactly one of --k, --ratio, --epsilon");
    budget->add_option("--k", prune.k, "Postings kept per term (diversified methods)");
    budget->add_option("--ratio", prune.ratio, "Target pruning ratio");
    budget->add_option("--epsilon", prune.epsilon, "Threshold (tcp, ipu, 2n2p)");
    budget->require_option(1);
    c_prune->add_option("--tcp-k", prune.tcp_k, "Rank of the TCP reference score")->capture_default_str();
    c_prune->add_option("--discount", prune.discount, "Rank discount: ln or log2")->capture_default_str();
    c_prune->add_flag("--recompute-stats", prune.recompute, "Recompute document lengths and statistics");
    prune.aspects.add(c_prune);

    QueryCmd query;
    auto* c_query = app.add_subcommand("query", "Run one BM25 query");
    c_query->add_option("--index", query.index, "Index file")->required();
    c_query->add_option("--q", query.text, "Query text")->required();
    c_query->add_option("--time", query.times, "b_lo,b_hi,e_lo,e_hi or YYYY[-MM[-DD]]; repeatable");
    c_query->add_option("--kind", query.kind, "inclusive or exclusive (default: exclusive when --time is given)");
    c_query->add_option("--depth", query.depth, "Results to return")->capture_default_str();
    c_query->add_option("--qid", query.qid, "Query id in the run output")->capture_default_str();
    c_query->add_option("--tag", query.tag, "Run tag")->capture_default_str();
    c_query->add_option("--out", query.out, "Run file (default: stdout)");

    GenQueriesCmd gen;
    auto* c_gen = app.add_subcommand("genqueries", "Generate random exclusive temporal queries from topics");
    c_gen->add_option("--index", gen.index, "Unpruned index")->required();
    c_gen->add_option("--topics", gen.topics, "Topics JSONL (qid, title, description)")->required();
    c_gen->add_option("--interval", gen.interval, "daily, weekly, monthly or all")->capture_default_str();
    c_gen->add_option("--n", gen.n, "Windows to keep per interval")->capture_default_str();
    c_gen->add_option("--out", gen.out, "Queries JSONL to write")->required();
    c_gen->add_option("--qrels-out", gen.qrels_out, "Also write qrels for the generated queries");
    c_gen->add_option("--topic-qrels", gen.topic_qrels,
                      "Topic judgments to time-filter (default: every matching document is relevant)");

    EvalCmd eval;
    auto* c_eval = app.add_subcommand("eval", "Compute MAP and NDCG of an index on a query set");
    c_eval->add_option("--index", eval.index, "Index file")->required();
    c_eval->add_option("--queries", eval.queries, "Queries JSONL")->required();
    c_eval->add_option("--qrels", eval.qrels, "TREC qrels")->required();
    c_eval->add_option("--depth", eval.depth, "Ranking depth")->capture_default_str();
    c_eval->add_option("--discount", eval.discount, "NDCG discount: ln or log2")->capture_default_str();
    c_eval->add_option("--out", eval.out, "JSON report (default: stdout)");
    c_eval->add_option("--run-out", eval.run_out, "Also write a TREC run file");

    SweepCmd sw;
    auto* c_sweep = app.add_subcommand("sweep", "MAP/NDCG against pruning ratio for several methods");
    c_sweep->add_option("--index", sw.index, "Unpruned index")->required();
    c_sweep->add_option("--queries", sw.queries, "Queries JSONL")->required();
    c_sweep->add_option("--qrels", sw.qrels, "TREC qrels")->required();
    c_sweep->add_option("--methods", sw.methods, "Comma-separated methods")->capture_default_str();
    c_sweep->add_option("--ratios", sw.ratios, "Comma-separated target ratios in [0, 1)")->capture_default_str();
    c_sweep->add_option("--tcp-k", sw.tcp_k, "Rank of the TCP reference score")->capture_default_str();
    c_sweep->add_option("--depth", sw.depth, "Ranking depth")->capture_default_str();
    c_sweep->add_option("--discount", sw.discount, "Rank discount: ln or log2")->capture_default_str();
    sw.aspects.add(c_sweep);
    c_sweep->add_option("--out", sw.out, "CSV report")->required();

    SynthCmd synth;
    auto* c_synth = app.add_subcommand("synth", "Write a seeded synthetic corpus");
    c_synth->add_option("--kind", synth.kind, "two-burst or random")->capture_default_str();
    c_synth->add_option("--out", synth.out, "Corpus JSONL to write")->required();
    c_synth->add_option("--topics-out", synth.topics_out, "Topics JSONL (two-burst only)");
    c_synth->add_option("--queries-out", synth.queries_out, "Burst-B queries JSONL (two-burst only)");
    c_synth->add_option("--n-docs", synth.n_docs, "Documents (random only)")->capture_default_str();
    c_synth->add_option("--vocab", synth.vocab, "Vocabulary size (random only)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_build->parsed()) {
            return build.run(common);
        }
        if (c_verify->parsed()) {
            return verify.run(common);
        }
        if (c_windows->parsed()) {
            return windows.run(common);
        }
        if (c_prune->parsed()) {
            return prune.run(common);
        }
        if (c_query->parsed()) {
            return query.run(common);
        }
        if (c_gen->parsed()) {
            return gen.run(common);
        }
        if (c_eval->parsed()) {
            return eval.run(common);
        }
        if (c_sweep->parsed()) {
            return sw.run(common);
        }
        if (c_synth->parsed()) {
            return synth.run(common);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
