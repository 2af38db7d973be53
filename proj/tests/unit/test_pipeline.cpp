#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "proxipair/pipeline.hpp"

using namespace proxipair;
namespace fs = std::filesystem;

namespace {

const std::string kSource = PROXIPAIR_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("proxipair_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::string& args, const std::string& tag) {
  const fs::path dir = scratch("cli_" + tag);
  fs::create_directories(dir);
  const std::string cmd = std::string("\"") + PROXIPAIR_CLI + "\" " + args + " > \"" + (dir / "out").string() +
                          "\" 2> \"" + (dir / "err").string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "out"), slurp(dir / "err")};
}

}  // namespace

TEST(Pipeline, SinExampleRunPasses) {
  const ProblemConfig cfg = load_config(kSource + "/configs/paper_example.cfg");
  const fs::path out = scratch("sin");
  std::ostringstream log;
  const PipelineResult r = run_pipeline(cfg, Stage::Run, {out, false}, log);
  EXPECT_TRUE(r.passed());
  EXPECT_NE(log.str().find("dist=1\n"), std::string::npos);
  for (const char* f : {"trace.csv", "schedule.csv", "stability.csv", "report.txt", "result.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const std::string report = slurp(out / "report.txt");
  EXPECT_NE(report.find("dist(A,B) = 1\n"), std::string::npos);
  for (const char* t : {"[contraction]", "[nonexpansive]", "[strict convex]"}) EXPECT_NE(report.find(t), std::string::npos);
  auto header = [&](const char* f) {
    const std::string s = slurp(out / f);
    return s.substr(0, s.find('\n'));
  };
  EXPECT_EQ(header("trace.csv"), "iter,orientation,gap,gap_minus_d,cauchy_step,residual_x,residual_y");
  EXPECT_EQ(header("stability.csv"), "kind,epsilon,bound,n_samples,kept,violations,max_ratio");
}

TEST(Pipeline, GapStageWritesOnlySummaries) {
  const ProblemConfig cfg = load_config(kSource + "/configs/anchored_lambda05.cfg");
  const fs::path out = scratch("gap");
  std::ostringstream log;
  const PipelineResult r = run_pipeline(cfg, Stage::Gap, {out, true}, log);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(log.str().empty());
  EXPECT_FALSE(fs::exists(out / "trace.csv"));
  EXPECT_TRUE(fs::exists(out / "result.json"));
}

TEST(Pipeline, FailingCheckIsReported) {
  const ProblemConfig cfg = load_config(kSource + "/tests/data/failing_check.cfg");
  std::ostringstream log;
  const PipelineResult r = run_pipeline(cfg, Stage::Solve, {scratch("fail"), true}, log);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(Pipeline, OutputDirResolution) {
  const ProblemConfig cfg = load_config(kSource + "/configs/anchored_3d.cfg");
  EXPECT_EQ(resolve_output_dir(cfg, "x/anchored_3d.cfg", fs::path("/tmp/o")), fs::path("/tmp/o"));
  ::setenv(kOutputRootEnv, "/tmp/root", 1);
  EXPECT_EQ(resolve_output_dir(cfg, "x/anchored_3d.cfg", std::nullopt), fs::path("/tmp/root/anchored_3d"));
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(resolve_output_dir(cfg, "x/anchored_3d.cfg", std::nullopt), fs::path("proxipair-out/anchored_3d"));
}

TEST(Pipeline, RepeatedRunsAreByteIdentical) {
  const ProblemConfig cfg = load_config(kSource + "/configs/polytope_constant.cfg");
  std::ostringstream log;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_pipeline(cfg, Stage::Run, {a, true}, log);
  run_pipeline(cfg, Stage::Run, {b, true}, log);
  for (const char* f : {"trace.csv", "stability.csv", "schedule.csv", "result.json", "report.txt"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, ExitCodes) {
  const CliRun ok = cli("run " + kSource + "/configs/paper_example.cfg --output-dir " +
                            scratch("cli_sin_out").string(), "ok");
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("dist=1"), std::string::npos);

  const CliRun bad = cli("run " + kSource + "/tests/data/bad_lambda.cfg", "bad");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("lambda"), std::string::npos);

  const CliRun fail = cli("solve " + kSource + "/tests/data/failing_check.cfg --quiet --output-dir " +
                              scratch("cli_fail_out").string(), "fail");
  EXPECT_EQ(fail.code, 1);
  EXPECT_TRUE(fail.out.empty());
  EXPECT_NE(fail.err.find("FAIL"), std::string::npos);

  EXPECT_EQ(cli("frobnicate x.cfg", "usage").code, 2);
  EXPECT_EQ(cli("run /nonexistent.cfg", "missing").code, 2);
}

TEST(Cli, StageSubcommands) {
  const CliRun gap = cli("gap " + kSource + "/configs/paper_example.cfg --output-dir " + scratch("g").string(), "gap");
  EXPECT_EQ(gap.code, 0);
  EXPECT_NE(gap.out.find("dist=1\n"), std::string::npos);
  EXPECT_NE(gap.out.find("proximal pair"), std::string::npos);

  const CliRun st = cli("stability " + kSource + "/configs/anchored_lambda05.cfg --seed 5 --output-dir " +
                            scratch("s").string(), "stab");
  EXPECT_EQ(st.code, 0) << st.err;
  EXPECT_NE(st.out.find("violations=0"), std::string::npos);
  EXPECT_EQ(st.out.find("violations=1"), std::string::npos);

  const CliRun orc = cli("oracle " + kSource + "/configs/paper_example.cfg --output-dir " + scratch("o").string(),
                         "oracle");
  EXPECT_EQ(orc.code, 0);
  EXPECT_NE(orc.out.find("oracle best=((0, 1), (0, 2))"), std::string::npos);
}
