#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <stabsim/commands.hpp>

namespace fs = std::filesystem;
using stabsim::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("stabsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, BoundsExample) {
    const Result r = run({"bounds", "--alpha", "1", "--q", "2", "--N", "5", "--Mq", "1", "--out", path("b.txt")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("truncation_bound = 0.72\n"), std::string::npos) << r.out;
    EXPECT_EQ(slurp(path("b.txt")), r.out);
}

TEST_F(Cli, BoundsOptionalBlocks) {
    const Result r = run({"bounds", "--alpha", "1", "--q", "2.5", "--N", "5", "--P", "50", "--beta", "0.4", "--p", "2",
                          "--out", path("b.txt")});
    EXPECT_EQ(r.code, 0) << r.err;
    for (const char* key : {"approximation_bound = ", "truncation_bound_lp = ", "approximation_bound_lp = "})
        EXPECT_NE(r.out.find(key), std::string::npos) << key;
    EXPECT_EQ(run({"bounds", "--alpha", "1", "--q", "2", "--N", "5", "--P", "50", "--out", path("c.txt")}).code, 2);
}

TEST_F(Cli, BoundsErrors) {
    const Result q = run({"bounds", "--alpha", "1", "--q", "1.5", "--N", "5", "--out", path("b.txt")});
    EXPECT_EQ(q.code, 2);
    EXPECT_NE(q.err.find("q >= 2 required"), std::string::npos) << q.err;
    const Result n = run({"bounds", "--alpha", "1", "--q", "2", "--N", "1", "--out", path("b.txt")});
    EXPECT_EQ(n.code, 2);
    EXPECT_NE(n.err.find("N > q/alpha - 1"), std::string::npos) << n.err;
}

TEST_F(Cli, SimulateExample) {
    const std::string out = path("path.csv");
    const Result r = run({"simulate", "--alpha", "1.2", "--hurst", "0.3", "--epsilon", "0.5", "--seed", "7", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream f(out);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(f, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 102u); // header + grid + 1 rows at the default grid of 100
    EXPECT_EQ(lines[0], "t,value");
    EXPECT_EQ(lines[1], "0,0");
    EXPECT_TRUE(fs::exists(out + ".manifest"));

    const std::string again = path("again.csv");
    ASSERT_EQ(run({"simulate", "--alpha", "1.2", "--hurst", "0.3", "--epsilon", "0.5", "--seed", "7", "--out", again}).code, 0);
    EXPECT_EQ(slurp(out), slurp(again));
}

TEST_F(Cli, SimulateConstraintError) {
    const Result r = run({"simulate", "--alpha", "1.9", "--hurst", "0.99", "--epsilon", "0.5", "--seed", "1", "--out",
                          path("p.csv")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("delta < 1/(2H) - 1/2"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(path("p.csv")));
}

TEST_F(Cli, MissingRequiredFlagIsConfigError) {
    EXPECT_EQ(run({"simulate", "--alpha", "1.2", "--out", path("p.csv")}).code, 2);
    EXPECT_EQ(run({"no-such-command"}).code, 2);
    EXPECT_EQ(run({"bounds", "--alpha", "x", "--q", "2", "--N", "5"}).code, 2);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
    const std::string cfg = path("run.cfg");
    {
        std::ofstream f(cfg);
        f << "# bounds run\nalpha = 1\nq = 2\nN = 4\nMq = 1\n";
    }
    const Result from_file = run({"bounds", "--config", cfg, "--out", path("a.txt")});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_NE(from_file.out.find("N = 4\n"), std::string::npos);
    const Result overridden = run({"bounds", "--config", cfg, "--N", "5", "--out", path("b.txt")});
    ASSERT_EQ(overridden.code, 0) << overridden.err;
    EXPECT_NE(overridden.out.find("truncation_bound = 0.72\n"), std::string::npos);
}

TEST_F(Cli, ConfigFileErrors) {
    const std::string cfg = path("bad.cfg");
    {
        std::ofstream f(cfg);
        f << "command = simulate\nalpha = 1\n";
    }
    EXPECT_EQ(run({"bounds", "--config", cfg, "--q", "2", "--N", "5"}).code, 2);
    {
        std::ofstream f(cfg);
        f << "alpha = 1\nno-such-key = 3\n";
    }
    EXPECT_EQ(run({"bounds", "--config", cfg, "--q", "2", "--N", "5"}).code, 2);
    EXPECT_EQ(run({"bounds", "--config", path("missing.cfg")}).code, 2);
}

TEST_F(Cli, ValidateCfRefusals) {
    const Result a = run({"validate-cf", "--alpha", "1.2", "--hurst", "0.5", "--paths", "10", "--seed", "1", "--out",
                          path("cf.csv")});
    EXPECT_EQ(a.code, 2);
    EXPECT_NE(a.err.find("alpha = 1"), std::string::npos) << a.err;
    const Result p = run({"validate-cf", "--alpha", "1", "--hurst", "0.5", "--paths", "1", "--seed", "1", "--out",
                          path("cf.csv")});
    EXPECT_EQ(p.code, 2);
    EXPECT_NE(p.err.find("at least 2 replicates"), std::string::npos) << p.err;
    const Result h = run({"validate-cf", "--alpha", "1", "--hurst", "0.7", "--paths", "10", "--seed", "1", "--method",
                          "rwrr", "--out", path("cf.csv")});
    EXPECT_EQ(h.code, 2);
}

TEST_F(Cli, ValidateCfSmallRun) {
    const std::string out = path("cf.csv");
    const Result r = run({"validate-cf", "--alpha", "1", "--hurst", "0.5", "--paths", "200", "--seed", "3", "--out", out,
                          "--threshold", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("r2 = "), std::string::npos);
    std::ifstream f(out);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, "t,log_modulus,stderr");
    // An unreachable threshold maps to exit code 3.
    const Result strict = run({"validate-cf", "--alpha", "1", "--hurst", "0.5", "--paths", "200", "--seed", "3", "--out",
                               out, "--threshold", "1.5"});
    EXPECT_EQ(strict.code, 3);
}

TEST_F(Cli, StableCheckRejectsAlphaTwo) {
    EXPECT_EQ(run({"stable-check", "--alpha", "2", "--terms", "10", "--samples", "10", "--seed", "1", "--out",
                   path("s.txt")})
                  .code,
              2);
}

TEST_F(Cli, StableCheckIsReproducible) {
    const std::vector<std::string> args{"stable-check", "--alpha", "1.2", "--terms", "200", "--samples", "500",
                                        "--seed",       "5",       "--threshold", "1", "--out", path("s.txt")};
    const Result a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("ks = "), std::string::npos);
    EXPECT_NE(a.out.find("fitted_scale = "), std::string::npos);
}

TEST_F(Cli, ManifestReproducesEveryCommand) {
    const std::vector<std::vector<std::string>> runs{
        {"simulate", "--alpha", "1.2", "--hurst", "0.3", "--epsilon", "0.5", "--seed", "7", "--grid", "50"},
        {"bounds", "--alpha", "1.3", "--q", "2.5", "--N", "3", "--P", "30", "--beta", "0.2", "--p", "2"},
        {"validate-cf", "--alpha", "1", "--hurst", "0.5", "--paths", "50", "--seed", "2", "--threshold", "0"},
        {"validate-cf", "--alpha", "1", "--hurst", "0.5", "--paths", "50", "--seed", "2", "--method", "rwrr", "--steps",
         "300", "--threshold", "0"},
        {"stable-check", "--alpha", "0.8", "--terms", "100", "--samples", "200", "--seed", "9", "--threshold", "1"}};
    int i = 0;
    for (auto args : runs) {
        const std::string first = path("first" + std::to_string(i) + ".out");
        const std::string second = path("second" + std::to_string(i) + ".out");
        ++i;
        args.insert(args.end(), {"--out", first});
        ASSERT_EQ(run(args).code, 0) << args[0];
        const Result rerun = run({args[0], "--config", first + ".manifest", "--out", second});
        ASSERT_EQ(rerun.code, 0) << rerun.err;
        EXPECT_EQ(slurp(first), slurp(second)) << args[0];
    }
}
