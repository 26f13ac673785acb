#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "rabi_stark/ed.hpp"

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + RABI_STARK_CLI + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
}

/// Sign changes of one gcurve column, not counted across break rows.
int sign_changes(const std::vector<std::string>& body, int col) {
    int count = 0;
    double prev = 0.0;
    for (const auto& l : body) {
        const auto f = split(l);
        if (f[3] == "1") {
            prev = 0.0;
            continue;
        }
        const double v = std::stod(f[static_cast<std::size_t>(col)]);
        if (prev != 0.0 && (v < 0.0) != (prev < 0.0)) ++count;
        prev = v;
    }
    return count;
}

std::vector<std::string> data_rows(const std::string& out) {
    std::vector<std::string> body;
    bool header = false;
    for (const auto& l : lines(out)) {
        if (l.empty() || l[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        body.push_back(l);
    }
    return body;
}

}  // namespace

TEST(Cli, GcurveSignChangesCountLevels) {
    const auto r = run("gcurve --delta 0.5 --u 1 --g 0.7 --emin -1.5 --emax 2 --samples 4001");
    ASSERT_EQ(r.code, 0);
    const auto body = data_rows(r.out);
    const auto ed = rabi_stark::ed::diagonalize({0.5, 1.0, 1.0, 0.7}, 300);
    for (const auto par : {rabi_stark::Parity::even, rabi_stark::Parity::odd}) {
        int expected = 0;
        for (const double e : ed.sector(par))
            if (e > -1.5 && e < 2.0) ++expected;
        EXPECT_EQ(sign_changes(body, par == rabi_stark::Parity::even ? 1 : 2), expected);
    }
}

TEST(Cli, GcurveEmptyWindowIsHeaderOnly) {
    const auto r = run("gcurve --delta 0.5 --u 1 --g 0.3 --emin 1 --emax 1");
    ASSERT_EQ(r.code, 0);
    const auto ls = lines(r.out);
    ASSERT_FALSE(ls.empty());
    EXPECT_EQ(ls.back(), "energy,g_plus,g_minus,is_break,pole_index");
    EXPECT_TRUE(data_rows(r.out).empty());
}

TEST(Cli, SidecarFilesAndJson) {
    const auto dir = std::filesystem::temp_directory_path() / "rabi_stark_cli_test";
    std::filesystem::create_directories(dir);
    const auto out = (dir / "gc.json").string();
    ASSERT_EQ(run("gcurve --delta 0.5 --u 1 --g 0.3 --emin -1 --emax 2 --samples 11 --format json --out " + out).code,
              0);
    std::ifstream is(out);
    const auto j = nlohmann::json::parse(is);
    EXPECT_EQ(j["columns"].size(), 5u);
    EXPECT_EQ(j["meta"]["command"], "gcurve");
    std::ifstream ps((dir / "gc.poles.json").string());
    const auto poles = nlohmann::json::parse(ps);
    EXPECT_FALSE(poles["poles_in_window"].empty());
    std::filesystem::remove_all(dir);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("gcurve --u 2 --g 0.3").code, 2);
    EXPECT_EQ(run("collapse --u 1 --g 0.3").code, 2);
    EXPECT_EQ(run("ed --u 2.5 --g 0.3").code, 2);
    EXPECT_EQ(run("gcurve --delta -1").code, 1);
    EXPECT_EQ(run("gcurve --no-such-flag").code, 1);
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("gcurve --out /nonexistent-dir/x.csv").code, 1);
    EXPECT_EQ(run("ed --ntr-list 10,x").code, 1);
    EXPECT_EQ(run("validate --grid quick").code, 0);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, DeterministicAcrossWorkerCounts) {
    const std::string args = "spectrum --delta 0.5 --u 1 --gmin 0 --gmax 1 --gsteps 11 --emax 1.5 --exceptional";
    const auto a = run(args, "RABI_STARK_WORKERS=1");
    const auto b = run(args, "RABI_STARK_WORKERS=4");
    const auto c = run(args, "RABI_STARK_WORKERS=4");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(b.out, c.out);
    EXPECT_NE(a.out.find("first_order_g = 0.612372435695794"), std::string::npos);
}

TEST(Cli, CollapseRowsMatchLibrary) {
    const auto r = run("collapse --delta 0.5 --g 0.3 --levels 3 --upper-levels 1");
    ASSERT_EQ(r.code, 0);
    const auto body = data_rows(r.out);
    ASSERT_EQ(body.size(), 4u);
    EXPECT_EQ(split(body[0])[0], "lower");
    EXPECT_NEAR(std::stod(split(body[0])[2]), -0.44805677885322, 1e-12);
    EXPECT_EQ(split(body[3])[0], "upper");
}

TEST(Cli, GcurveWideWindowSmallCoupling) {
    const auto r = run("gcurve --delta 0.5 --u 1 --g 0.1 --emin -1 --emax 4 --samples 8001");
    ASSERT_EQ(r.code, 0);
    const auto body = data_rows(r.out);
    const auto ed = rabi_stark::ed::diagonalize({0.5, 1.0, 1.0, 0.1}, 300);
    for (const auto par : {rabi_stark::Parity::even, rabi_stark::Parity::odd}) {
        int expected = 0;
        for (const double e : ed.sector(par))
            if (e > -1.0 && e < 4.0) ++expected;
        EXPECT_EQ(sign_changes(body, par == rabi_stark::Parity::even ? 1 : 2), expected);
    }
}

TEST(Cli, SpectrumDefaultsFindFirstCrossing) {
    const auto r = run("spectrum --delta 0.5 --u 1 --gmax 1.2");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("first_order_g = 0.612372435695794"), std::string::npos);
    EXPECT_NE(r.out.find("juddian,0,0.612372435695794,-0.5,degenerate,1,1"), std::string::npos);
}
