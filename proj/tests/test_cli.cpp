#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "cli_support.hpp"

using namespace hermflow;
using namespace hermflow::cli;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(HERMFLOW_CLI) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t k = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), k);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(CliParse, Complex) {
    EXPECT_EQ(parse_complex("1"), cplx(1));
    EXPECT_EQ(parse_complex("-0.5"), cplx(-0.5));
    EXPECT_EQ(parse_complex("2i"), cplx(0, 2));
    EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
    EXPECT_EQ(parse_complex("i"), cplx(0, 1));
    EXPECT_EQ(parse_complex("0.5-0.25i"), cplx(0.5, -0.25));
    EXPECT_EQ(parse_complex("1e-3+2e-2i"), cplx(1e-3, 2e-2));
    EXPECT_EQ(parse_complex("-1e+2-i"), cplx(-100, -1));
    EXPECT_THROW(parse_complex("abc"), UsageError);
    EXPECT_THROW(parse_complex(""), UsageError);
    EXPECT_THROW(parse_complex("1+2j"), UsageError);
}

TEST(CliParse, VectorsAndMetrics) {
    EXPECT_EQ(parse_vector("e2", 3), (std::vector<cplx>{0, 1, 0}));
    EXPECT_EQ(parse_vector("1,0.5i,-2", 3), (std::vector<cplx>{1, cplx(0, 0.5), -2}));
    EXPECT_THROW(parse_vector("e4", 3), UsageError);
    EXPECT_THROW(parse_vector("1,2", 3), UsageError);

    const auto m = parse_metric("r2=2,u=0.1-0.2i,t2=0.5");
    EXPECT_EQ(m.r2, 2);
    EXPECT_EQ(m.s2, 1);
    EXPECT_EQ(m.u, cplx(0.1, -0.2));
    EXPECT_THROW(parse_metric("r2=i"), UsageError);
    EXPECT_THROW(parse_metric("w=1"), UsageError);

    const auto p = parse_params({"rho=1,B=0.3i", "c=0"});
    EXPECT_EQ(p.at("B"), cplx(0, 0.3));
    EXPECT_EQ(p.size(), 3u);
    EXPECT_EQ(format_complex(cplx(0.5, -0.25)), "0.5-0.25i");
    EXPECT_EQ(format_complex(cplx(0, 2)), "2i");
}

TEST(Cli, HopfFlat) {
    const auto r = run("hopf --n 2 --alpha 1 --beta 0 --point 1,0 --verify");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("all components vanish"), std::string::npos);
    EXPECT_NE(r.out.find("agree"), std::string::npos);
}

TEST(Cli, HopfBisectional) {
    const auto r = run("hopf --n 3 --alpha 1 --beta -0.5 --point 0,0,1 --xi e1 --nu e1");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("bisectional = 1\n"), std::string::npos) << r.out;
}

TEST(Cli, InvalidInputExitsTwo) {
    EXPECT_EQ(run("hopf --n 3 --alpha 1 --beta -2 --point 0,0,1").code, 2);
    EXPECT_EQ(run("hopf --n 2 --point 0,0").code, 2);
    EXPECT_EQ(run("hopf --n 2 --point 1,x").code, 2);
    EXPECT_EQ(run("table3 --samples 5").code, 2);
    EXPECT_EQ(run("cplx --family Nii -p rho=0,B=0,c=0").code, 2);
    EXPECT_EQ(run("classify --family Sv").code, 2);
    EXPECT_EQ(run("nonsense").code, 2);
    EXPECT_EQ(run("flow --name gradient --a 1").code, 2);
}

TEST(Cli, SeedEnvironment) {
    const std::string cmd = std::string("HERMFLOW_SEED=abc ") + HERMFLOW_CLI + " families > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 2);
    const std::string ok = std::string("HERMFLOW_SEED=7 ") + HERMFLOW_CLI +
                           " classify --family Np -p rho=1 --format json | grep -q '\"seed\": 7'";
    EXPECT_EQ(WEXITSTATUS(std::system(ok.c_str())), 0);
}

TEST(Cli, FlowSummaries) {
    const auto g = run("flow --name gradient --n 3 --alpha0 1 --beta0 0 -o /dev/null");
    EXPECT_EQ(g.code, 0);
    EXPECT_NE(g.out.find("static_ratio=-0.5"), std::string::npos) << g.out;
    EXPECT_NE(g.out.find("verdict=preserved"), std::string::npos);

    const auto u = run("flow --name ustinovskiy --n 3 --alpha0 1 --beta0 -0.5 -o /dev/null");
    EXPECT_NE(u.out.find("verdict=not-preserved"), std::string::npos) << u.out;

    const auto p = run("flow --name pluriclosed --n 2 --alpha0 1 --beta0 0 --t-end 1 --stride 500");
    EXPECT_EQ(p.code, 0);
    EXPECT_NE(p.out.find("t,alpha,beta,gamma\n0,1,0,0\n0.5,1,0,0\n1,1,0,0\n"), std::string::npos) << p.out;
}

TEST(Cli, CorruptedFixtureExitsOne) {
    const std::string path = ::testing::TempDir() + "corrupt_table3.json";
    std::ofstream(path) << R"({"rows": [{"id": "Np-torus", "family": "Np", "label": "rho=0", "points": [{"rho": 0}],
        "cplx": "always", "cplx_slice": [], "sign_slice": [], "sign": "indefinite"}]})";
    const auto r = run("table3 --samples 50 --expected " + path);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("Np-torus: sign expected indefinite got flat"), std::string::npos) << r.out;
}

TEST(Cli, DeterministicOutput) {
    const std::string args = "classify --family Siv3 -p A=0.5+0.8i -m r2=1.2,s2=0.7 --format json --seed 11";
    const auto a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("\"verdict\": \"indefinite\""), std::string::npos) << a.out;
}

TEST(Cli, Families) {
    const auto r = run("families --format json");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"id\": \"Siv3\""), std::string::npos);
}
