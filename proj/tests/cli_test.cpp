#include <gtest/gtest.h>

#include <filesystem>

#include <json.hpp>

#include "handwash/json_util.hpp"
#include "support/test_support.hpp"

using namespace handwash;
using nlohmann::json;
using testkit::run_command;

namespace {

const std::string kCli = HANDWASH_CLI_PATH;

std::string cli(const std::string& args) { return "'" + kCli + "' " + args; }

}  // namespace

TEST(Cli, SplitPrintsSizesAndIsDeterministic) {
  testkit::TempDir dir;
  const auto a = run_command(cli("split --n 309315 --ratios 0.7,0.2,0.1 --seed 4 --out " + dir.file("a.json")));
  const auto b = run_command(cli("split --n 309315 --seed 4 --out " + dir.file("b.json")));
  ASSERT_EQ(a.exit_code, 0);
  const auto j = json::parse(a.out);
  EXPECT_EQ(j["sizes"], (json{{"train", 216520}, {"validation", 61863}, {"test", 30932}}));
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json_util::read_file(dir.file("a.json")), json_util::read_file(dir.file("b.json")));
  const auto c = run_command(cli("split --n 1000 --seed 5 --out " + dir.file("c.json")));
  EXPECT_NE(json_util::read_file(dir.file("c.json")), json_util::read_file(dir.file("a.json")));
  EXPECT_NE(run_command(cli("split --n 10 --ratios 0.5,0.5,0.5")).exit_code, 0);
}

TEST(Cli, StatsReproducesDatasetTable) {
  testkit::TempDir dir;
  ASSERT_EQ(run_command(cli("synth dataset --single 1199 --double 1094 --unannotated 30178 --out " +
                            dir.path().string()))
                .exit_code,
            0);
  const auto r = run_command(cli("stats --manifest " + dir.file("manifest.json")));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["total_annotations"], 3387);
  EXPECT_EQ(j["total_annotated_files"], 2293);
  EXPECT_EQ(j["annotated_once"], 1199);
  EXPECT_EQ(j["annotated_twice"], 1094);
  EXPECT_EQ(j["total_videos"], 32471);
}

TEST(Cli, RunExitCodesAndOutputs) {
  testkit::TempDir dir;
  const std::string out = dir.path().string();
  auto ok = run_command(cli("run --synthetic 0:2,2:7,3:7,4:7,5:7,6:7,7:7,10:2,0:4 --out " + out));
  EXPECT_EQ(ok.exit_code, 0);
  EXPECT_EQ(json::parse(ok.out)["verdict"], "ok");
  EXPECT_TRUE(std::filesystem::exists(dir.file("synthetic.report.json")));
  EXPECT_TRUE(std::filesystem::exists(dir.file("synthetic.stats.csv")));
  EXPECT_EQ(json_util::read_file(dir.file("synthetic.report.json")), ok.out);

  auto failed = run_command(cli("run --synthetic 0:2,2:8,3:8,4:8,5:8,7:8,10:2,0:4"));
  EXPECT_EQ(failed.exit_code, 1);
  EXPECT_EQ(json::parse(failed.out)["missing"][0]["code"], 6);

  auto none = run_command(cli("run --synthetic 0:5,2:3,0:5"));
  EXPECT_EQ(none.exit_code, 2);
  EXPECT_EQ(json::parse(none.out)["outcome"], "no_episode");

  EXPECT_EQ(run_command(cli("run --annotation /nonexistent.json 2>/dev/null")).exit_code, 3);
  EXPECT_GT(run_command(cli("run 2>/dev/null")).exit_code, 2);
  EXPECT_GT(run_command(cli("run --synthetic 2:1 --annotation x.json 2>/dev/null")).exit_code, 2);
}

TEST(Cli, ConfigFileAndFlagsOverrideDefaults) {
  testkit::TempDir dir;
  json_util::write_file(dir.file("lenient.conf"), "total_duration_s = 5\nrequired_movements = 2\n");
  auto r = run_command(cli("run --synthetic 0:2,2:12,0:4 --config " + dir.file("lenient.conf")));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(json::parse(r.out)["total_required_s"], 5.0);
  // A constant classifier that only ever sees idle never completes the wash.
  r = run_command(cli("run --synthetic 0:2,2:12,0:4 --classifier constant --constant-code 0 --config " +
                      dir.file("lenient.conf")));
  EXPECT_EQ(r.exit_code, 1);
  json_util::write_file(dir.file("bad.conf"), "total_duration_s = soon\n");
  EXPECT_EQ(run_command(cli("run --synthetic 0:1 --config " + dir.file("bad.conf") + " 2>/dev/null")).exit_code,
            3);
}

TEST(Cli, SynthEpisodeAndVideoFromStdin) {
  testkit::TempDir dir;
  const std::string out = dir.path().string();
  ASSERT_EQ(run_command(cli("synth episode --segments 0:2,2:7,3:7,4:7,5:7,6:7,7:7,10:2,0:4 --id w --video "
                            "--width 64 --height 48 --out " + out))
                .exit_code,
            0);
  EXPECT_TRUE(std::filesystem::exists(dir.file("w.ann.json")));
  EXPECT_TRUE(std::filesystem::exists(dir.file("w.stats.csv")));
  const auto from_file = run_command(cli("run --video " + dir.file("w.y4m") + " --truth " + dir.file("w.ann.json")));
  EXPECT_EQ(from_file.exit_code, 0);
  const auto from_stdin =
      run_command("cat " + dir.file("w.y4m") + " | " + cli("run --video - --truth " + dir.file("w.ann.json")));
  EXPECT_EQ(from_stdin.exit_code, 0);
  EXPECT_EQ(from_stdin.out, from_file.out);
  const auto replay = run_command(cli("run --annotation " + dir.file("w.ann.json")));
  EXPECT_EQ(replay.exit_code, 0);
}

TEST(Cli, EvalWritesConfusionAndEpisodes) {
  testkit::TempDir dir;
  const std::string out = dir.path().string();
  ASSERT_EQ(run_command(cli("synth dataset --single 8 --double 2 --frames 500 --materialize --out " + out)).exit_code,
            0);
  const auto r = run_command(cli("eval --manifest " + dir.file("manifest.json") + " --split all --epsilon 0.35 --out " +
                                 out));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["frames"], 5000);
  EXPECT_NEAR(j["accuracy"].get<double>(), 0.65, 0.03);
  const auto confusion = json_util::read_file(dir.file("confusion.csv"));
  EXPECT_EQ(confusion.substr(0, confusion.find('\n')), "truth\\pred,0,2,3,4,5,6,7,10");
  const auto episodes = json_util::read_file(dir.file("episodes.csv"));
  EXPECT_EQ(std::count(episodes.begin(), episodes.end(), '\n'), 11);
  const auto test_only = run_command(cli("eval --manifest " + dir.file("manifest.json")));
  EXPECT_EQ(json::parse(test_only.out)["frames"], 500);
  EXPECT_EQ(json::parse(test_only.out)["accuracy"], 1.0);
}

TEST(Cli, ServeStartsAndStopsOnSignal) {
  const auto r = run_command("timeout --preserve-status -s INT 2 " + cli("serve --synthetic 0:1 --bind 127.0.0.1:0 2>&1"));
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("serving on 127.0.0.1:"), std::string::npos) << r.out;
}
