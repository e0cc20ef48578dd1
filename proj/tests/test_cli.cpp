#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
    const std::string cmd = std::string(KXSIM_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("kxsim_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(cli(""), 2);
    EXPECT_EQ(cli("frobnicate"), 2);
    EXPECT_EQ(cli("preset fig9 --out " + scratch("x").string()), 2);
    EXPECT_EQ(cli("run --set nonsense=1 --out " + scratch("x").string()), 2);
    EXPECT_EQ(cli("run --set alpha=-1 --out " + scratch("x").string()), 2);
    EXPECT_EQ(cli("aggregate /nonexistent/kxsim"), 2);
    EXPECT_EQ(cli("plotdata heatmap " + fs::temp_directory_path().string()), 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(cli("--help"), 0); }

TEST(Cli, RunPresetAggregatePlot) {
    const auto dir = scratch("ok");
    const auto cfg = dir.string() + ".json";
    {
        std::ofstream out(cfg);
        out << R"({"sme_count": 6, "request_count": 2, "total_rounds": 30})";
    }
    EXPECT_EQ(cli("run --config " + cfg + " --seed 5 --set portfolio_size=10 --out " + (dir / "single").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "single" / "manifest.json"));
    EXPECT_TRUE(fs::exists(dir / "single" / "records.csv"));

    EXPECT_EQ(cli("preset fig2a --config " + cfg + " --seeds 2 --jobs 2 --out " + (dir / "p").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "p" / "run_0001" / "strengths.csv"));
    EXPECT_TRUE(fs::exists(dir / "p" / "report_strengths.csv"));
    EXPECT_EQ(cli("aggregate " + (dir / "p").string()), 0);
    EXPECT_EQ(cli("plotdata strength_bars " + (dir / "p").string() + " --out " + (dir / "bars.csv").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "bars.csv"));
    fs::remove_all(dir);
    fs::remove(cfg);
}

TEST(Cli, RunFailureExitsThree) {
    const auto dir = scratch("fail");
    fs::create_directories(dir);
    { std::ofstream blocker(dir / "run_0000"); }
    EXPECT_EQ(cli("preset fig2a --seeds 1 --set total_rounds=5 --out " + dir.string()), 3);
    fs::remove_all(dir);
}
