#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("edcascade_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Outcome run(const std::string& args) {
        const auto out = dir_ / "stdout";
        const auto err = dir_ / "stderr";
        const std::string cmd = std::string(EDCASCADE_CLI) + " " + args + " >" + out.string() +
                                " 2>" + err.string();
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

    fs::path dir_;
};

int count_lines(const std::string& s) {
    int n = 0;
    for (std::size_t p = 0; (p = s.find("\r\n", p)) != std::string::npos; p += 2) ++n;
    return n;
}

}  // namespace

TEST_F(Cli, PdSweepShape) {
    const Outcome r = run("pd-sweep --u 5 --pf 0.1 --N 1 --L 1 --snr-db 0:25:0.5 --methods closed,quad");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_lines(r.out), 52);
    EXPECT_EQ(r.out.rfind("snr_db,u,N,L,lambda,pf,branch_pf,pd_closed,closed_err,closed_provenance,"
                          "pd_quad,quad_err,quad_provenance\r\n", 0),
              0u);
}

TEST_F(Cli, OneFilePerScenario) {
    const Outcome r = run("pd-sweep --pf 0.1 --N 1,2 --L 1,2 --snr-db 10 --out " + (dir_ / "fig1.csv").string());
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* name : {"fig1_N1_L1.csv", "fig1_N1_L2.csv", "fig1_N2_L1.csv", "fig1_N2_L2.csv"}) {
        EXPECT_TRUE(fs::exists(dir_ / name)) << name;
        EXPECT_EQ(count_lines(slurp(dir_ / name)), 2) << name;
    }
}

TEST_F(Cli, MonteCarloIsByteIdenticalAcrossThreads) {
    const std::string base = "pd-sweep --pf 0.1 --N 2 --snr-db 0:20:10 --methods mc,mc-full --samples 100000 --seed 42";
    const Outcome a = run(base + " --threads 1");
    const Outcome b = run(base + " --threads 4");
    const Outcome c = run(base + " --threads 1");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    const Outcome s1 = run("sample --N 3 --samples 2000 --seed 7 --threads 1");
    const Outcome s2 = run("sample --N 3 --samples 2000 --seed 7 --threads 3");
    ASSERT_EQ(s1.code, 0) << s1.err;
    EXPECT_EQ(s1.out, s2.out);
    EXPECT_EQ(count_lines(s1.out), 2001);
}

TEST_F(Cli, RocJson) {
    const Outcome r = run("roc --u 4 --snr-db 12 --N 5 --L 3 --points 6 --format json");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    ASSERT_EQ(doc.size(), 1u);
    const auto& rows = doc[0]["rows"];
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows.back()["pf"].get<double>(), 1.0);
    EXPECT_EQ(rows.back()["pd_closed"].get<double>(), 1.0);
    for (const auto& row : rows) EXPECT_GE(row["pd_closed"].get<double>(), row["pf"].get<double>());
}

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("pd-sweep --pf 0.1 --lambda 3").code, 2);
    EXPECT_EQ(run("pd-sweep").code, 2);
    EXPECT_EQ(run("pd-sweep --pf 0.1 --methods closed,exact").code, 2);
    EXPECT_EQ(run("pd-sweep --pf 0.1 --snr-db 5:1:1").code, 2);
    EXPECT_EQ(run("pd-sweep --pf 0.1 --N 0").code, 2);
    EXPECT_EQ(run("pd-sweep --pf 1.5").code, 2);
    EXPECT_EQ(run("pd-sweep --pf 0.1 --format xml").code, 2);
    EXPECT_EQ(run("roc --snr-db 0:10:5").code, 2);
    EXPECT_EQ(run("sample --u 2.5").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("").code, 2);
    const Outcome r = run("pd-sweep --pf 0.1 --samples 10 --methods mc");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--samples"), std::string::npos);
}

TEST_F(Cli, VerifyInjectedFaultExitsOne) {
    // a zero tolerance cannot be met by two independent numerical paths
    const Outcome r = run("verify --fast --tol 0");
    EXPECT_EQ(r.code, 1) << r.out << r.err;
    EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}
