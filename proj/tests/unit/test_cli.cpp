#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using fixsynth::cli::dispatch;

namespace {

const std::string kSrc = FIXSYNTH_SOURCE_DIR;
const std::string kCircle = kSrc + "/benches/circle.fxp";
const std::string kTypes = kSrc + "/benches/";

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "fixsynth");
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("fixsynth_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}).code, fixsynth::cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, fixsynth::cli::kExitUsage);
    EXPECT_EQ(run({"cost", kCircle}).code, fixsynth::cli::kExitUsage);
    EXPECT_EQ(run({"cost", path("missing.fxp"), "--types", kTypes + "uniform8.json"}).code, 1);
    const CliRun bad = run({"cost", write("bad.fxp", "x = y;\noutput x;\n"), "--types", kTypes + "uniform8.json"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_TRUE(bad.out.empty());
    EXPECT_FALSE(bad.err.empty());
    EXPECT_EQ(run({"cost", kCircle, "--types", write("t.json", "{\"radius\": \"0:1:9\"}")}).code, 1);
    EXPECT_EQ(run({"synth", kCircle, "--config", write("c.cfg", "wl_max = zero\n")}).code, 1);
    EXPECT_EQ(run({"bench", "show", "nope"}).code, 1);
    EXPECT_EQ(run({"sweep", kCircle, "--types", kTypes + "uniform8.json", "--grid", "1e-9"}).code, 1);
}

TEST_F(CliTest, BenchListAndShow) {
    const CliRun list = run({"bench", "list"});
    EXPECT_EQ(list.code, 0);
    EXPECT_EQ(std::count(list.out.begin(), list.out.end(), '\n'), 6);
    EXPECT_NE(list.out.find("wmr_omega\tmoderated:0.001\t0.1"), std::string::npos);
    const CliRun show = run({"bench", "show", "circle"});
    EXPECT_EQ(show.code, 0);
    EXPECT_EQ(show.out, slurp(kCircle));
}

TEST_F(CliTest, CostGoldenNumbers) {
    EXPECT_EQ(run({"cost", kCircle, "--types", kTypes + "paper_solution.json"}).out, "104.65\n");
    EXPECT_EQ(run({"cost", kCircle, "--types", kTypes + "random_baseline.json"}).out, "89.65\n");
    EXPECT_EQ(run({"cost", kCircle, "--types", kTypes + "uniform8.json"}).out, "81.80\n");
    EXPECT_EQ(run({"cost", kCircle, "--types", kTypes + "uniform12.json"}).out, "179.80\n");
    EXPECT_EQ(run({"cost", kCircle, "--types", kTypes + "uniform16.json"}).out, "316.20\n");
}

TEST_F(CliTest, CheckExitCodes) {
    const CliRun v = run({"check", kCircle, "--types", kTypes + "uniform12.json", "--grid", "0.0001"});
    EXPECT_EQ(v.code, fixsynth::cli::kExitViolation);
    EXPECT_NE(v.out.find("worst point"), std::string::npos);
    EXPECT_EQ(run({"check", kCircle, "--types", kTypes + "uniform16.json", "--grid", "0.0001"}).code,
              fixsynth::cli::kExitOk);
}

TEST_F(CliTest, SynthThenCheck) {
    const std::string out = path("types.json");
    const CliRun s = run({"synth", kCircle, "--config", kSrc + "/benches/circle.cfg", "--seed", "7", "--out", out});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_TRUE(fs::exists(out + ".manifest.json"));
    EXPECT_EQ(run({"check", kCircle, "--types", out, "--grid", "0.0001"}).code, 0);
    const CliRun c = run({"cost", kCircle, "--types", out});
    EXPECT_LE(std::stod(c.out), 179.80);
}

TEST_F(CliTest, SynthStatusCodes) {
    const std::string zero = write("zero.cfg", "max_error = 0\nseed = 1\n");
    EXPECT_EQ(run({"synth", kCircle, "--config", zero, "--out", path("z.json")}).code, fixsynth::cli::kExitInfeasible);
    EXPECT_FALSE(fs::exists(path("z.json")));
    const std::string cap = write("cap.cfg", "max_outer_iters = 1\nmax_attempts = 3000\nseed = 7\n");
    EXPECT_EQ(run({"synth", kCircle, "--config", cap, "--out", path("c.json")}).code,
              fixsynth::cli::kExitIterationCap);
}

TEST_F(CliTest, DeterministicOutputs) {
    const std::string cfg = kSrc + "/benches/circle.cfg";
    ASSERT_EQ(run({"synth", kCircle, "--config", cfg, "--seed", "3", "--out", path("a.json"), "--report",
                   path("a.report.json")})
                  .code,
              0);
    ASSERT_EQ(run({"synth", kCircle, "--config", cfg, "--seed", "3", "--out", path("b.json"), "--report",
                   path("b.report.json")})
                  .code,
              0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
    EXPECT_EQ(slurp(path("a.report.json")), slurp(path("b.report.json")));

    for (const char* f : {"s1.csv", "s2.csv"}) {
        ASSERT_EQ(run({"sweep", kCircle, "--types", path("a.json"), "--grid", "0.001", "--out", path(f)}).code, 0);
    }
    EXPECT_EQ(slurp(path("s1.csv")), slurp(path("s2.csv")));
    const std::string csv = slurp(path("s1.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "radius,radius_float,radius_fixed,mypi_float,mypi_fixed,t_float,t_fixed,area_float,area_fixed,area_error");

    for (const char* f : {"d1.csv", "d2.csv"}) {
        ASSERT_EQ(run({"simulate", "dcmotor_u", "--horizon", "1", "--out", path(f)}).code, 0);
    }
    EXPECT_EQ(slurp(path("d1.csv")), slurp(path("d2.csv")));
}

TEST_F(CliTest, SimulateWithTypes) {
    const CliRun r = run({"simulate", "circle"});
    EXPECT_EQ(r.code, 1);
    const CliRun w = run({"simulate", "wmr_v", "--horizon", "0.1"});
    EXPECT_EQ(w.code, 0) << w.err;
    EXPECT_EQ(w.out.substr(0, 2), "t,");
    const CliRun c = run({"simulate", "iir1"});
    EXPECT_EQ(c.code, 0);
    EXPECT_EQ(std::count(c.out.begin(), c.out.end(), '\n'), 257);
}
