#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tprune/index_io.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        m_dir = fs::temp_directory_path() / (std::string("tprune_cli_") + info->name());
        fs::remove_all(m_dir);
        fs::create_directories(m_dir);
    }

    void TearDown() override { fs::remove_all(m_dir); }

    /// Runs the tool inside the scratch directory (or a subdirectory of it);
    /// stdout and stderr go to files there.
    int run(const std::string& args, const std::string& sub = ".")
    {
        const std::string cmd = "cd '" + (m_dir / sub).string() + "' && '" TPRUNE_BIN "' " + args +
                                " > stdout.txt 2> stderr.txt";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string slurp(const std::string& name) const
    {
        std::ifstream in(m_dir / name, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    nlohmann::json json(const std::string& name) const { return nlohmann::json::parse(slurp(name)); }

    void make_index()
    {
        ASSERT_EQ(run("--seed 2 synth --out corpus.jsonl --topics-out topics.jsonl --queries-out bq.jsonl"), 0);
        ASSERT_EQ(run("build --corpus corpus.jsonl --out index.bin"), 0);
    }

    fs::path m_dir;
};

}  // namespace

TEST_F(Cli, BuildThenVerify)
{
    make_index();
    EXPECT_EQ(run("verify index.bin"), 0);
    auto report = json("stdout.txt");
    EXPECT_TRUE(report["results"]["ok"].get<bool>());
    EXPECT_EQ(report["results"]["documents"].get<std::size_t>(), 2320u);
    auto manifest = json("index.bin.manifest.json");
    EXPECT_EQ(manifest["subcommand"], "build");
    EXPECT_EQ(manifest["inputs"][0]["path"], "corpus.jsonl");
}

TEST_F(Cli, PruneRecordsAchievedRatio)
{
    make_index();
    ASSERT_EQ(run("prune --in index.bin --out div.bin --method div-simple --ratio 0.5"), 0);
    auto m = json("div.bin.manifest.json");
    const double achieved = m["results"]["achieved_ratio"].get<double>();
    EXPECT_NEAR(achieved, 0.5, 0.01);
    auto full = tprune::read_index((m_dir / "index.bin").string());
    auto pruned = tprune::read_index((m_dir / "div.bin").string());
    EXPECT_DOUBLE_EQ(tprune::pruning_ratio(full, pruned), achieved);
    EXPECT_EQ(run("verify div.bin"), 0);

    ASSERT_EQ(run("prune --in index.bin --out tcp.bin --method tcp --epsilon 0.5"), 0);
    EXPECT_EQ(json("tcp.bin.manifest.json")["parameters"]["epsilon"].get<double>(), 0.5);
}

TEST_F(Cli, QueryWritesTrecRun)
{
    make_index();
    ASSERT_EQ(run("query --index index.bin --q quake --time 1990-01-01,1990-01-01,1990-12-31,1990-12-31 --depth 3"), 0);
    std::istringstream lines(slurp("stdout.txt"));
    std::string qid, q0, docno, tag;
    int rank = 0;
    double score = 0.0;
    int n = 0;
    while (lines >> qid >> q0 >> docno >> rank >> score >> tag) {
        EXPECT_EQ(q0, "Q0");
        EXPECT_EQ(rank, ++n);
    }
    EXPECT_EQ(n, 3);
}

TEST_F(Cli, UsageAndDomainErrors)
{
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run("build --no-such-flag"), 2);
    EXPECT_EQ(run("build --corpus x.jsonl"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("build --corpus missing.jsonl --out i.bin"), 1);
    EXPECT_NE(slurp("stderr.txt").find("error:"), std::string::npos);

    make_index();
    EXPECT_EQ(run("prune --in index.bin --out p.bin --method tcp --ratio 0.5 --epsilon 0.3"), 2);
    EXPECT_EQ(run("prune --in index.bin --out p.bin --method tcp --epsilon 1.5"), 1);
    EXPECT_EQ(run("prune --in index.bin --out p.bin --method bogus --ratio 0.5"), 1);
    EXPECT_FALSE(fs::exists(m_dir / "p.bin"));

    std::ofstream(m_dir / "broken.bin", std::ios::binary) << slurp("index.bin").substr(0, 100);
    EXPECT_EQ(run("verify broken.bin"), 1);
}

TEST_F(Cli, PipelineIsByteIdenticalAcrossRuns)
{
    make_index();
    // Each run starts from its own copy of the inputs under the same names,
    // so manifests must match too.
    auto pipeline = [&](const std::string& dir) {
        fs::create_directory(m_dir / dir);
        fs::copy_file(m_dir / "index.bin", m_dir / dir / "index.bin");
        fs::copy_file(m_dir / "topics.jsonl", m_dir / dir / "topics.jsonl");
        EXPECT_EQ(run("windows --index index.bin --term quake --model dynamic --out windows.json", dir), 0);
        EXPECT_EQ(run("prune --in index.bin --out pruned.bin --method div-sliding --ratio 0.4", dir), 0);
        EXPECT_EQ(run("genqueries --index index.bin --topics topics.jsonl --interval weekly --n 6 --out queries.jsonl "
                      "--qrels-out queries.qrels",
                      dir),
                  0);
        EXPECT_EQ(run("eval --index pruned.bin --queries queries.jsonl --qrels queries.qrels --out eval.json", dir), 0);
        EXPECT_EQ(run("sweep --index index.bin --queries queries.jsonl --qrels queries.qrels --methods tcp,div-simple "
                      "--ratios 0,0.5 --out sweep.csv",
                      dir),
                  0);
    };
    pipeline("a");
    pipeline("b");
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(m_dir / "a")) {
        const auto name = entry.path().filename().string();
        EXPECT_EQ(slurp("a/" + name), slurp("b/" + name)) << name;
        ++compared;
    }
    EXPECT_EQ(compared, 15u);
    const auto csv = slurp("a/sweep.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,ratio,map,ndcg,n_queries");
}
