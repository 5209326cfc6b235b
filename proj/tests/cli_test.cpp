#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hodc/cli.hpp"

using namespace hodc;

namespace {

struct Run {
    int code;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "hodc");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, Increments) {
    auto r = run({"increments", "2", "9"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto d = r.doc();
    EXPECT_EQ(d["command"], "increments");
    EXPECT_EQ(d["version"], kVersion);
    const auto& adm = d["result"]["admissible"];
    ASSERT_EQ(adm.size(), 4u);
    EXPECT_EQ(adm[1]["l"], 2);
    EXPECT_EQ(adm[1]["N"], 5);
}

TEST(Cli, InvalidInputExitsWithTwo) {
    auto r = run({"increments", "1", "3"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("error"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(run({"laplacian", "2", "2", "5", "0"}).code, 2);
    EXPECT_NE(run({"increments", "2"}).code, 0);
    EXPECT_NE(run({"increments", "2", "2", "--format", "xml"}).code, 0);
}

TEST(Cli, LaplacianUnitIncrementIsKronecker) {
    auto r = run({"laplacian", "2", "2", "1", "1", "--ordering", "diagonal"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto d = r.doc();
    EXPECT_EQ(d["config"]["N"], 3);
    EXPECT_TRUE(d["result"]["kronecker"].get<bool>());
    auto e = run({"laplacian", "3", "2", "2", "1"}).doc();
    EXPECT_FALSE(e["result"]["kronecker"].get<bool>());
    EXPECT_TRUE(e["result"]["closed_form_matches"].get<bool>());
}

TEST(Cli, ChainedSymbolVanishesAtProbe) {
    auto d = run({"symbol", "2", "2", "1", "0", "--ordering", "chained", "--source"}).doc();
    EXPECT_TRUE(d["result"]["probe"]["vanishes"].get<bool>());
    auto g = run({"symbol", "2", "2", "1", "0", "--ordering", "diagonal", "--source"}).doc();
    EXPECT_FALSE(g["result"]["probe"]["vanishes"].get<bool>());
}

TEST(Cli, OutputIsDeterministic) {
    auto a = run({"--seed", "7", "laplacian", "2", "2", "2", "1", "--ordering", "random"});
    auto b = run({"laplacian", "2", "2", "2", "1", "--ordering", "random", "--seed", "7"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    auto c = run({"--seed", "8", "laplacian", "2", "2", "2", "1", "--ordering", "random"});
    EXPECT_EQ(c.doc()["config"]["seed"], 8);
}

TEST(Cli, OrderingFileRoundTrip) {
    const std::string path = testing::TempDir() + "hodc_ordering.json";
    {
        std::ofstream f(path);
        f << to_json(random_ordering(2, 2, 2, 3, 3)).dump();
    }
    auto a = run({"laplacian", "2", "2", "2", "0", "--ordering", path});
    auto b = run({"--seed", "3", "laplacian", "2", "2", "2", "0", "--ordering", "random"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.doc()["result"]["tensor"], b.doc()["result"]["tensor"]);
    std::remove(path.c_str());
}

TEST(Cli, Formats) {
    auto t = run({"increments", "2", "2", "--format", "text"});
    EXPECT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("command: increments"), std::string::npos);
    auto c = run({"increments", "2", "2", "--format", "csv"});
    EXPECT_EQ(c.out.rfind("path,value", 0), 0u);
    const std::string path = testing::TempDir() + "hodc_out.json";
    auto o = run({"increments", "2", "2", "--out", path});
    EXPECT_TRUE(o.out.empty());
    std::ifstream in(path);
    EXPECT_EQ(json::parse(in)["command"], "increments");
    std::remove(path.c_str());
}

TEST(Cli, VerifySmallScopes) {
    auto s = run({"verify", "--scope", "symbol", "--max-n", "2", "--max-k", "2"});
    ASSERT_EQ(s.code, 0) << s.err;
    auto d = s.doc();
    EXPECT_TRUE(d["result"]["pass"].get<bool>());
    EXPECT_FALSE(d["result"].contains("exact"));
    auto e = run({"verify", "--scope", "exact", "--max-n", "2", "--max-k", "2", "--forms", "3", "--random-orderings", "1"});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_FALSE(e.doc()["result"]["exact"]["specs"].empty());
}

TEST(Cli, SignFaultIsCaught) {
    auto r = run({"verify", "--scope", "exact", "--max-n", "2", "--max-k", "2", "--forms", "3", "--random-orderings", "1",
                  "--inject-sign-fault"});
    EXPECT_EQ(r.code, 1);
    auto d = r.doc();
    EXPECT_FALSE(d["result"]["pass"].get<bool>());
    bool witness = false;
    for (const auto& c : d["result"]["exact"]["checks"])
        if (c["failed"].get<int>() > 0 && c.contains("counterexample")) witness = true;
    EXPECT_TRUE(witness);
}

TEST(Cli, EmptySuiteConfig) {
    const std::string path = testing::TempDir() + "hodc_empty.json";
    {
        json cfg = default_suite_config();
        cfg["specs"] = json::array();
        cfg["classical"]["n"] = json::array();
        std::ofstream f(path);
        f << cfg.dump();
    }
    auto r = run({"ineq", "--config", path});
    ASSERT_EQ(r.code, 0) << r.err;
    auto d = r.doc();
    EXPECT_TRUE(d["result"]["specs"].empty());
    EXPECT_TRUE(d["result"]["completed"].get<bool>());
    std::remove(path.c_str());
}
