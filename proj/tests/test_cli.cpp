#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "test_util.hpp"

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(UEC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmall = R"({
  "data": {"length": 1500, "channels": 2, "seed": 3},
  "window": {"history": 24, "output_width": 24},
  "horizons": [48, 72],
  "corrector": {"hidden": 8, "kernel_size": 5},
  "train": {"steps": 15, "batch": 16, "eval_every": 5}
})";

} // namespace

TEST(Cli, StagesChainAndReportsAreReproducible) {
    const auto dir = uec::test::scratch_dir("cli_chain");
    std::ofstream(dir / "cfg.json") << kSmall;
    const std::string common = "--config " + (dir / "cfg.json").string() + " --out " + (dir / "o").string();
    EXPECT_EQ(run("ingest " + common), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "o" / "normalized.csv"));
    EXPECT_EQ(run("diagnose " + common), 0);
    EXPECT_EQ(run("build-samples " + common), 0);
    EXPECT_EQ(run("train-uec " + common), 0);
    EXPECT_EQ(run("select-beta --metric mse " + common), 0);
    EXPECT_EQ(run("select-beta --metric mae " + common), 0);
    EXPECT_EQ(run("evaluate " + common), 0);
    const auto first = slurp(dir / "o" / "report.json");
    EXPECT_EQ(run("evaluate --threads 1 " + common), 0);
    EXPECT_EQ(slurp(dir / "o" / "report.json"), first);
    EXPECT_FALSE(slurp(dir / "o" / "report.csv").empty());
    EXPECT_EQ(run("rollout --origin 100 --horizon 60 " + common), 0);

    // Upstream artifacts from another config are refused unless forced.
    EXPECT_EQ(run("evaluate --seed 99 " + common), 2);
    EXPECT_EQ(run("evaluate --seed 99 --force " + common), 0);
}

TEST(Cli, ReplayReproducesToyBackbone) {
    const auto dir = uec::test::scratch_dir("cli_replay");
    std::ofstream(dir / "cfg.json") << kSmall;
    std::string replay = kSmall;
    replay.insert(replay.rfind('}'), R"(, "backbone": {"kind": "replay", "replay_path": ")" +
                                         (dir / "o" / "forecasts.jsonl").string() + "\"}");
    std::ofstream(dir / "replay.json") << replay;
    const std::string out = " --out " + (dir / "o").string();
    EXPECT_EQ(run("export-forecasts --config " + (dir / "cfg.json").string() + out), 0);
    EXPECT_EQ(run("evaluate --config " + (dir / "cfg.json").string() + " --out " + (dir / "a").string()), 0);
    EXPECT_EQ(run("evaluate --config " + (dir / "replay.json").string() + " --out " + (dir / "b").string()), 0);
    // Everything but the config hash must agree.
    auto strip = [](std::string s) { return s.substr(s.find("\"format\"")); };
    auto a = slurp(dir / "a" / "report.json"), b = slurp(dir / "b" / "report.json");
    a.erase(a.find("\"config_hash\""), a.find('\n', a.find("\"config_hash\"")) - a.find("\"config_hash\""));
    b.erase(b.find("\"config_hash\""), b.find('\n', b.find("\"config_hash\"")) - b.find("\"config_hash\""));
    EXPECT_EQ(strip(a), strip(b));
}

TEST(Cli, ExitCodes) {
    const auto dir = uec::test::scratch_dir("cli_codes");
    std::ofstream(dir / "bad.json") << R"({"window": {"history": 0}})";
    EXPECT_EQ(run("ingest --config " + (dir / "bad.json").string() + " --out " + dir.string()), 2);
    EXPECT_EQ(run("ingest --config " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run("no-such-command"), 2);
    std::ofstream(dir / "bad.csv") << "a,b\n1,2\n3,x\n";
    std::ofstream(dir / "csv.json") << R"({"data": {"source": "csv", "path": ")" + (dir / "bad.csv").string() + "\"}}";
    EXPECT_EQ(run("ingest --config " + (dir / "csv.json").string() + " --out " + dir.string()), 3);
    std::ofstream(dir / "short.json") << R"({"data": {"length": 300}})";
    EXPECT_EQ(run("build-samples --config " + (dir / "short.json").string() + " --out " + dir.string()), 3);
}
