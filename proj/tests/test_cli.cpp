#include "qfock/report.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(QFOCK_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, CertificatePreconditionExit) {
    const auto r = run("certificate --q 0.5 --d 2");
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("q^2 d > 1"), std::string::npos) << r.out;
}

TEST(Cli, CertificateFound) {
    const auto r = run("certificate --q 0.9 --d 8");
    ASSERT_EQ(r.status, 0) << r.out;
    const auto j = qfock::Json::parse(r.out);
    EXPECT_EQ(j.begin().key(), "q");
    EXPECT_GT(j.at("k_min").get<int>(), 0);
}

TEST(Cli, GramIdentityCsv) {
    const auto r = run("gram --q 0 --d 2 --k 3 --out-format csv");
    ASSERT_EQ(r.status, 0) << r.out;
    std::string expected = "i,j,value\n";
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            expected += std::to_string(i) + "," + std::to_string(j) + "," + (i == j ? "1" : "0") + "\n";
    EXPECT_EQ(r.out, expected);
}

TEST(Cli, MomentsRow) {
    const auto r = run("moments --q 0.5 --d 1 --n 4 --N 4 --out-format csv");
    ASSERT_EQ(r.status, 0) << r.out;
    std::istringstream is(r.out);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "n,spec,matrix_value,partition_value,abs_diff");
    EXPECT_EQ(row.substr(0, 10), "4,0-0-0-0,");
    const auto j = qfock::Json::parse(run("moments --q 0.5 --d 1 --n 4 --N 4").out);
    EXPECT_NEAR(j.at(0).at("matrix_value").get<double>(), 2.5, 1e-12);
    EXPECT_NEAR(j.at(0).at("partition_value").get<double>(), 2.5, 1e-12);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("").status, 3);
    EXPECT_EQ(run("nosuch").status, 3);
    EXPECT_EQ(run("gram --q notanumber").status, 3);
    EXPECT_EQ(run("gram --out-format xml").status, 3);
    EXPECT_EQ(run("witness --f-mode other").status, 3);
}

TEST(Cli, PreconditionErrors) {
    EXPECT_EQ(run("gram --q 1.5 --d 2 --k 1").status, 1);
    EXPECT_EQ(run("moments --q 0.5 --d 1 --n 6 --N 4").status, 1);
    EXPECT_EQ(run("gram --tol -1").status, 1);
}

TEST(Cli, IllConditionedSpectrumIsNumericalFailure) {
    const auto r = run("spectrum --q 0.999999999999999 --d 2 --k 2");
    EXPECT_EQ(r.status, 2) << r.out;
}

TEST(Cli, HelpListsFlagsWithDefaults) {
    const auto r = run("witness --help");
    EXPECT_EQ(r.status, 0);
    for (const char* flag : {"--q", "--d", "--k", "--N", "--n", "--tol", "--seed", "--k-max", "--delta-floor",
                             "--f-mode", "--out-format", "--out"})
        EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
    EXPECT_NE(r.out.find("1e-10"), std::string::npos);
}

TEST(Cli, OutFileDeterministic) {
    const auto dir = std::filesystem::temp_directory_path() / "qfock_cli_test";
    std::filesystem::create_directories(dir);
    for (const char* cmd : {"identity --q -0.5 --d 2 --k 2 --seed 7", "witness --q 0.5 --d 2 --k 1",
                            "operators --q 0.3 --d 2 --k 2 --out-format csv", "spectrum --q 0.7 --d 2 --k 3"}) {
        const auto a = dir / "a.out";
        const auto b = dir / "b.out";
        ASSERT_EQ(run(std::string(cmd) + " --out " + a.string()).status, 0) << cmd;
        ASSERT_EQ(run(std::string(cmd) + " --out " + b.string()).status, 0) << cmd;
        EXPECT_FALSE(slurp(a).empty());
        EXPECT_EQ(slurp(a), slurp(b)) << cmd;
    }
    std::filesystem::remove_all(dir);
}
