#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "tprune/aspects.hpp"
#include "tprune/synthetic.hpp"
#include "tprune/time_series.hpp"

using namespace tprune;

namespace {

TermTimeSeries series_of(std::map<Day, std::uint64_t> counts)
{
    TermTimeSeries s;
    s.term = "t";
    for (auto [d, c] : counts) {
        s.add(d, c);
    }
    return s;
}

TimeWindow random_window(std::mt19937_64& rng)
{
    std::uniform_int_distribution<Day> day(0, 60);
    std::uniform_int_distribution<Day> len(0, 10);
    TimeWindow w;
    w.b_lo = day(rng);
    w.b_hi = w.b_lo + len(rng);
    w.e_lo = w.b_lo + len(rng);
    w.e_hi = std::max(w.e_lo, w.b_hi) + len(rng);
    return w;
}

// Days a window can touch, enumerated.
std::set<Day> span_days(const TimeWindow& w)
{
    std::set<Day> out;
    for (Day d = w.b_lo; d <= w.e_hi; ++d) {
        out.insert(d);
    }
    return out;
}

bool share_a_day(const TimeWindow& a, const TimeWindow& b)
{
    for (Day d : span_days(a)) {
        if (d >= b.b_lo && d <= b.e_hi) {
            return true;
        }
    }
    return false;
}

InvertedIndex dated_index(std::uint64_t seed)
{
    SyntheticConfig cfg;
    cfg.n_docs = 120;
    cfg.vocab = 40;
    cfg.n_days = 200;
    cfg.undated_fraction = 0.1;
    auto c = random_corpus(cfg, seed);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Day> extra(0, 20);
    for (std::size_t i = 0; i < c.documents.size(); i += 7) {
        auto& tp = c.documents[i].time_part;
        if (!tp.empty()) {
            // some documents span several days or carry a second window
            tp[0].e_lo += extra(rng);
            tp[0].e_hi = tp[0].e_lo + extra(rng);
            tp.push_back(TimeWindow::on(tp[0].b_lo + 90));
        }
    }
    return build_index(c);
}

}  // namespace

TEST(Intersect, Examples)
{
    auto r = intersect(TimeWindow::certain(0, 10), TimeWindow::certain(5, 20));
    ASSERT_TRUE(r);
    EXPECT_EQ(*r, TimeWindow::certain(5, 10));
    EXPECT_FALSE(intersect(TimeWindow::certain(0, 4), TimeWindow::certain(5, 9)));
    const auto in_2013 = TimeWindow::within(day_number(2013, 1, 1), day_number(2013, 12, 31));
    const auto june = TimeWindow::certain(day_number(2013, 6, 1), day_number(2013, 6, 30));
    EXPECT_TRUE(intersect(in_2013, june));
    EXPECT_EQ(parse_time_spec("2013"), in_2013);
    EXPECT_EQ(parse_time_spec("2013-06"), TimeWindow::within(day_number(2013, 6, 1), day_number(2013, 6, 30)));
    EXPECT_EQ(parse_time_spec("2013-06-01"), TimeWindow::on(day_number(2013, 6, 1)));
    EXPECT_EQ(parse_time_spec("2013-06-01,2013-06-01,2013-06-30,2013-06-30"), june);
    EXPECT_THROW(parse_time_spec("2013-06-30,2013-06-30,2013-06-01,2013-06-01"), parse_error);
    EXPECT_THROW(parse_time_spec("June"), parse_error);
}

TEST(Intersect, CommutativeIdempotentAndContained)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const auto a = random_window(rng);
        const auto b = random_window(rng);
        ASSERT_TRUE(a.valid());
        EXPECT_EQ(intersect(a, a), a);
        const auto ab = intersect(a, b);
        EXPECT_EQ(ab, intersect(b, a));
        EXPECT_EQ(ab.has_value(), intersects(a, b));
        EXPECT_EQ(ab.has_value(), share_a_day(a, b));
        if (ab) {
            EXPECT_TRUE(ab->valid());
            EXPECT_TRUE(a.contains(*ab));
            EXPECT_TRUE(b.contains(*ab));
        }
    }
}

TEST(TimeSeries, Examples)
{
    Corpus c;
    c.documents.push_back({"d1", {"quake", "quake", "quake", "city"}, {TimeWindow::on(100)}});
    auto idx = build_index(c);
    auto s = term_time_series(idx, "quake");
    EXPECT_EQ(s.counts, (std::map<Day, std::uint64_t>{{100, 3}}));
    EXPECT_EQ(s.n_points, 3u);

    c.documents.push_back({"d2", {"quake", "city"}, {TimeWindow::on(100)}});
    c.documents[0].tokens = {"quake", "city"};
    c.documents[1].tokens = {"quake", "quake", "city"};
    idx = build_index(c);
    EXPECT_EQ(term_time_series(idx, "quake").counts, (std::map<Day, std::uint64_t>{{100, 3}}));
    EXPECT_EQ(term_time_series(idx, "quake", true).counts, (std::map<Day, std::uint64_t>{{100, 2}}));
    EXPECT_THROW(term_time_series(idx, "absent"), not_found_error);
}

TEST(TimeSeries, MatchesRecountOverCorpus)
{
    auto data = two_burst_corpus(TwoBurstConfig{}, 3);
    auto idx = build_index(data.corpus);
    for (const std::string term : {"quake", "flood", "w007", "w123"}) {
        std::map<Day, std::uint64_t> expect;
        for (const auto& d : data.corpus.documents) {
            const auto tf = static_cast<std::uint64_t>(std::count(d.tokens.begin(), d.tokens.end(), term));
            for (const auto& w : d.time_part) {
                if (tf > 0) {
                    expect[(w.b_lo + w.e_hi) / 2] += tf;
                }
            }
        }
        EXPECT_EQ(term_time_series(idx, term).counts, expect) << term;
    }
}

TEST(FreedmanDiaconis, Examples)
{
    // Type-7 quartiles of {0,1,2,3} are 0.75 and 2.25: 2 * 1.5 * 4^(-1/3) = 1.89.
    EXPECT_DOUBLE_EQ(interquartile_range(series_of({{0, 1}, {1, 1}, {2, 1}, {3, 1}})), 1.5);
    EXPECT_EQ(fd_window_size(series_of({{0, 1}, {1, 1}, {2, 1}, {3, 1}})), 2);
    EXPECT_EQ(fd_window_size(series_of({{42, 17}})), 1);
    EXPECT_EQ(fd_window_size(series_of({{0, 1}, {50, 100}, {99, 1}})), 1);
}

TEST(FreedmanDiaconis, MatchesNumpyOnSeededUniformSample)
{
    std::ifstream days(TPRUNE_TEST_DATA "/fd_uniform_days.txt");
    std::ifstream ref(TPRUNE_TEST_DATA "/stats_oracles.json");
    ASSERT_TRUE(days && ref);
    auto oracle = nlohmann::json::parse(ref)["fd_uniform"];
    TermTimeSeries s;
    Day d = 0;
    while (days >> d) {
        s.add(d, 1);
    }
    ASSERT_EQ(s.n_points, 1000u);
    EXPECT_DOUBLE_EQ(interquartile_range(s), oracle["iqr"].get<double>());
    EXPECT_EQ(fd_window_size(s), oracle["gamma"].get<Day>());
}

TEST(SimpleWindows, Examples)
{
    auto set = simple_windows(series_of({{0, 1}, {1, 1}, {9, 1}}), 5);
    ASSERT_EQ(set.aspects.size(), 2u);
    EXPECT_EQ(set.aspects[0].window, TimeWindow::certain(0, 4));
    EXPECT_EQ(set.aspects[1].window, TimeWindow::certain(5, 9));
    EXPECT_DOUBLE_EQ(set.aspects[0].weight, 0.5);
    EXPECT_DOUBLE_EQ(set.aspects[1].weight, 0.5);

    auto one = simple_windows(series_of({{7, 4}}), 3);
    ASSERT_EQ(one.aspects.size(), 1u);
    EXPECT_DOUBLE_EQ(one.aspects[0].weight, 1.0);
    EXPECT_THROW(simple_windows(series_of({{7, 4}}), 0), invalid_argument_error);
}

TEST(SimpleWindows, MatchesRetilingAndPartitionsDays)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<Day, std::uint64_t> counts;
        std::uniform_int_distribution<Day> day(-50, 300);
        for (int i = 0; i < 30; ++i) {
            counts[day(rng)] += 1 + rng() % 4;
        }
        const Day gamma = 1 + static_cast<Day>(rng() % 40);
        auto set = simple_windows(series_of(counts), gamma);
        const Day s = counts.begin()->first;
        std::set<std::pair<Day, Day>> expect;
        for (const auto& [d, c] : counts) {
            const Day k = (d - s) / gamma;
            expect.emplace(s + k * gamma, s + k * gamma + gamma - 1);
        }
        std::set<std::pair<Day, Day>> got;
        for (const auto& a : set.aspects) {
            got.emplace(a.window.b_lo, a.window.e_hi);
            EXPECT_DOUBLE_EQ(a.weight, 1.0 / static_cast<double>(expect.size()));
        }
        EXPECT_EQ(got, expect);
        for (const auto& [d, c] : counts) {
            int n = 0;
            for (const auto& a : set.aspects) {
                n += (d >= a.window.b_lo && d <= a.window.e_hi) ? 1 : 0;
            }
            EXPECT_EQ(n, 1);
        }
    }
}

TEST(SlidingWindows, Examples)
{
    std::map<Day, std::uint64_t> ten;
    for (Day d = 0; d < 10; ++d) {
        ten[d] = 1;
    }
    auto set = sliding_windows(series_of(ten), 4);
    std::vector<Day> starts;
    for (const auto& a : set.aspects) {
        starts.push_back(a.window.b_lo);
        EXPECT_EQ(a.window.e_hi - a.window.b_lo, 3);
    }
    EXPECT_EQ(starts, (std::vector<Day>{0, 2, 4, 6, 8}));

    auto unit = sliding_windows(series_of({{0, 1}, {1, 1}, {2, 1}}), 1);
    ASSERT_EQ(unit.aspects.size(), 3u);
    for (const auto& a : unit.aspects) {
        EXPECT_EQ(a.window.b_lo, a.window.e_hi);
    }
}

TEST(SlidingWindows, MatchesOracleAndCoversEachDayAtMostTwice)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<Day, std::uint64_t> counts;
        std::uniform_int_distribution<Day> day(0, 400);
        for (int i = 0; i < 25; ++i) {
            counts[day(rng)] += 1;
        }
        const Day gamma = 1 + static_cast<Day>(rng() % 30);
        const Day step = gamma % 2 == 0 ? gamma / 2 : gamma / 2 + 1;
        auto set = sliding_windows(series_of(counts), gamma);
        std::vector<std::pair<Day, Day>> expect;
        for (Day lo = counts.begin()->first; lo <= counts.rbegin()->first; lo += step) {
            auto it = counts.lower_bound(lo);
            if (it != counts.end() && it->first <= lo + gamma - 1) {
                expect.emplace_back(lo, lo + gamma - 1);
            }
        }
        std::vector<std::pair<Day, Day>> got;
        for (const auto& a : set.aspects) {
            got.emplace_back(a.window.b_lo, a.window.e_hi);
        }
        EXPECT_EQ(got, expect);
        for (const auto& [d, c] : counts) {
            int n = 0;
            for (const auto& a : set.aspects) {
                n += (d >= a.window.b_lo && d <= a.window.e_hi) ? 1 : 0;
            }
            EXPECT_GE(n, 1);
            EXPECT_LE(n, 2);
        }
    }
}

TEST(DynamicWindows, Examples)
{
    GmmFit fit;
    fit.K = 1;
    fit.weights = {1.0};
    fit.means = {50.0};
    fit.variances = {100.0};
    auto set = dynamic_windows(fit, "t");
    ASSERT_EQ(set.aspects.size(), 1u);
    EXPECT_EQ(set.aspects[0].window, TimeWindow::certain(40, 60));
    EXPECT_DOUBLE_EQ(set.aspects[0].weight, 1.0);

    // A document outside every window goes to the component with the nearest mean.
    Corpus c;
    c.documents.push_back({"a", {"t"}, {TimeWindow::on(50)}});
    c.documents.push_back({"b", {"t"}, {TimeWindow::on(100)}});
    c.documents.push_back({"far", {"t"}, {TimeWindow::on(200)}});
    c.documents.push_back({"undated", {"t"}, {}});
    auto idx = build_index(c);
    fit.K = 2;
    fit.weights = {0.5, 0.5};
    fit.means = {50.0, 100.0};
    fit.variances = {100.0, 100.0};
    auto mapped = doc_aspect_map(dynamic_windows(fit, "t"), idx, "t");
    EXPECT_EQ(mapped.doc_map.at(0), (std::vector<std::uint32_t>{0}));
    EXPECT_EQ(mapped.doc_map.at(1), (std::vector<std::uint32_t>{1}));
    EXPECT_EQ(mapped.doc_map.at(2), (std::vector<std::uint32_t>{1}));
    EXPECT_TRUE(mapped.doc_map.at(3).empty());
}

TEST(DynamicWindows, WeightsFollowTheFit)
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> a(100.0, 4.0);
    std::normal_distribution<double> b(300.0, 6.0);
    TermTimeSeries s;
    s.term = "t";
    for (int i = 0; i < 300; ++i) {
        s.add(static_cast<Day>(std::lround(i % 3 == 0 ? b(rng) : a(rng))), 1);
    }
    auto fit = select_k_bic(s, 5, 9);
    auto set = dynamic_windows(fit, "t");
    ASSERT_EQ(fit.K, 2u);
    ASSERT_EQ(set.aspects.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(set.aspects[k].weight, fit.weights[k], 1e-6);
    }
    EXPECT_NEAR(set.total_weight(), 1.0, 1e-9);
}

TEST(Smooth, Examples)
{
    auto base = simple_windows(series_of({{0, 1}, {10, 1}}), 5);
    auto same = smooth(base, 0.0, TimeWindow::certain(0, 10));
    EXPECT_EQ(same.aspects, base.aspects);
    EXPECT_FALSE(same.global_index());

    auto sm = smooth(base, 0.3, TimeWindow::certain(0, 10));
    ASSERT_EQ(sm.aspects.size(), 3u);
    EXPECT_DOUBLE_EQ(sm.aspects[0].weight, 0.35);
    EXPECT_DOUBLE_EQ(sm.aspects[1].weight, 0.35);
    EXPECT_DOUBLE_EQ(sm.aspects[2].weight, 0.3);
    EXPECT_TRUE(sm.aspects[2].is_global);
    EXPECT_EQ(sm.aspects[2].window, TimeWindow::certain(0, 10));
    EXPECT_NEAR(sm.total_weight(), 1.0, 1e-9);

    EXPECT_THROW(smooth(base, 1.0, TimeWindow::certain(0, 10)), invalid_argument_error);
    EXPECT_THROW(smooth(base, -0.1, TimeWindow::certain(0, 10)), invalid_argument_error);
    EXPECT_THROW(smooth(sm, 0.3, TimeWindow::certain(0, 10)), invalid_argument_error);
}

TEST(DocAspectMap, Examples)
{
    Corpus c;
    c.documents.push_back({"inside", {"t"}, {TimeWindow::on(2)}});
    c.documents.push_back({"spanning", {"t"}, {TimeWindow::certain(3, 5)}});
    c.documents.push_back({"undated", {"t"}, {}});
    c.documents.push_back({"late", {"t"}, {TimeWindow::on(9)}});
    auto idx = build_index(c);

    auto simple = smooth(doc_aspect_map(simple_windows(term_time_series(idx, "t"), 4), idx, "t"), 0.3,
                         term_time_series(idx, "t"));
    // windows [2,5], [6,9], then G
    EXPECT_EQ(simple.doc_map.at(0), (std::vector<std::uint32_t>{0, 2}));
    EXPECT_EQ(simple.doc_map.at(3), (std::vector<std::uint32_t>{1, 2}));
    EXPECT_EQ(simple.doc_map.at(2), (std::vector<std::uint32_t>{2}));

    auto sliding = sliding_windows(term_time_series(idx, "t"), 4);
    auto mapped = smooth(doc_aspect_map(sliding, idx, "t"), 0.3, term_time_series(idx, "t"));
    // sliding windows [2,5], [4,7], [6,9], [8,11]; the spanning document meets the first two
    EXPECT_EQ(mapped.doc_map.at(1), (std::vector<std::uint32_t>{0, 1, 4}));
}

TEST(DocAspectMap, MatchesBruteForceScan)
{
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto idx = dated_index(seed);
        for (auto model : {AspectModel::simple, AspectModel::sliding, AspectModel::dynamic}) {
            AspectConfig cfg;
            cfg.model = model;
            cfg.seed = seed;
            for (const std::string term : {"w000", "w005", "w017"}) {
                auto set = build_aspect_set(idx, term, cfg);
                ASSERT_NEAR(set.total_weight(), 1.0, 1e-9);
                const auto g = set.global_index();
                ASSERT_TRUE(g);
                for (const auto& p : idx.at(term).postings) {
                    std::vector<std::uint32_t> expect;
                    for (std::uint32_t i = 0; i < set.aspects.size(); ++i) {
                        if (set.aspects[i].is_global) {
                            continue;
                        }
                        for (const auto& w : idx.doc_times[p.doc]) {
                            if (share_a_day(set.aspects[i].window, w)) {
                                expect.push_back(i);
                                break;
                            }
                        }
                    }
                    const auto& got = set.doc_map.at(p.doc);
                    if (expect.empty() && model == AspectModel::dynamic && !idx.doc_times[p.doc].empty()) {
                        // nearest component stands in for an uncovered dated document
                        ASSERT_EQ(got.size(), 2u);
                        EXPECT_EQ(got.back(), *g);
                        continue;
                    }
                    expect.push_back(*g);
                    EXPECT_EQ(got, expect) << term << " doc " << p.doc;
                }
            }
        }
    }
}

TEST(BuildAspectSet, UndatedTermGetsGlobalAspectOnly)
{
    Corpus c;
    c.documents.push_back({"a", {"t", "u"}, {}});
    c.documents.push_back({"b", {"t"}, {}});
    auto idx = build_index(c);
    auto set = build_aspect_set(idx, "t", AspectConfig{});
    ASSERT_EQ(set.aspects.size(), 1u);
    EXPECT_TRUE(set.aspects[0].is_global);
    EXPECT_DOUBLE_EQ(set.aspects[0].weight, 1.0);
    EXPECT_EQ(set.doc_map.size(), 2u);
}
