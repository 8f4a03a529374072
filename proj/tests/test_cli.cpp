#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "treeweave/report.hpp"

using treeweave::cli::run_command;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("treeweave_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static inline int counter = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  CHECK(run_command({"simulate", "--runs", "0"}) == 2);
  CHECK(run_command({"simulate", "--bogus-flag"}) == 2);
  CHECK(run_command({"frobnicate"}) == 2);
  CHECK(run_command({}) == 2);
  CHECK(run_command({"simulate", "--leaves", "12"}) == 2);
  CHECK(run_command({"simulate", "--churn", "1.5"}) == 2);
  CHECK(run_command({"expansion", "--leaves", "10"}) == 2);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_command({"--help"}) == 0);
}

TEST_CASE("simulate writes trace, summary and gnuplot files") {
  TempDir dir;
  const std::string out = dir.file("trace.csv");
  const std::string summary = dir.file("summary.json");
  const int status = run_command({"simulate", "--leaves", "16", "--rounds", "14",
                                  "--runs", "2", "--churn", "0.1", "--seed", "5",
                                  "--out", out, "--summary", summary, "--gnuplot"});
  CHECK(status == 0);

  const std::vector<treeweave::RoundTrace> traces =
      treeweave::traces_from_csv(slurp(out));
  CHECK(traces.size() == 28);
  CHECK(!slurp(summary).empty());
  CHECK(fs::exists(dir.file("trace_run0.dat")));
  CHECK(fs::exists(dir.file("trace_run1.dat")));
}

TEST_CASE("simulate is byte-deterministic across invocations and jobs") {
  TempDir dir;
  const auto invoke = [&](const std::string& tag, const std::string& jobs) {
    const std::string out = dir.file("t" + tag + ".csv");
    const std::string summary = dir.file("s" + tag + ".json");
    REQUIRE(run_command({"simulate", "--leaves", "16", "--rounds", "10", "--runs", "3",
                         "--churn", "0.2", "--seed", "11", "--jobs", jobs, "--out", out,
                         "--summary", summary}) == 0);
    return slurp(out) + "\x1e" + slurp(summary);
  };
  const std::string a = invoke("a", "1");
  const std::string b = invoke("b", "1");
  const std::string c = invoke("c", "3");
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("environment seed is the fallback") {
  TempDir dir;
  const std::string out_env = dir.file("env.csv");
  const std::string out_flag = dir.file("flag.csv");
  ::setenv("TREEWEAVE_SEED", "77", 1);
  REQUIRE(run_command({"simulate", "--leaves", "16", "--rounds", "7", "--runs", "1",
                       "--out", out_env}) == 0);
  ::unsetenv("TREEWEAVE_SEED");
  REQUIRE(run_command({"simulate", "--leaves", "16", "--rounds", "7", "--runs", "1",
                       "--seed", "77", "--out", out_flag}) == 0);
  CHECK(slurp(out_env) == slurp(out_flag));
}

TEST_CASE("expansion subcommand runs") {
  TempDir dir;
  const std::string dump = dir.file("graph.txt");
  CHECK(run_command({"expansion", "--leaves", "8", "--seed", "3", "--dump", dump}) == 0);
  const std::string edges = slurp(dump);
  CHECK(!edges.empty());
  CHECK(edges.find(' ') != std::string::npos);
}

TEST_CASE("mixconv subcommand writes its table") {
  TempDir dir;
  const std::string out = dir.file("mix.csv");
  CHECK(run_command({"mixconv", "--leaves", "16", "--rounds", "5", "--runs", "2",
                     "--seed", "1", "--out", out}) == 0);
  const std::string body = slurp(out);
  CHECK(body.starts_with("run,round,lambda2,swaps\n"));
  CHECK(std::count(body.begin(), body.end(), '\n') == 11);  // header + 10 rows
}

TEST_CASE("lemmas subcommand passes") {
  CHECK(run_command({"lemmas", "--samples", "300", "--seed", "2"}) == 0);
}

TEST_CASE("runtime failures exit with status 1") {
  CHECK(run_command({"simulate", "--leaves", "16", "--rounds", "7", "--runs", "1",
                     "--out", "/nonexistent_dir_treeweave/trace.csv"}) == 1);
}
