#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "support.hpp"

using namespace qql;
using qql::io::Json;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" QQL_CLI_PATH "\" " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

Json outputs_of(const Result& r) { return parse_report(r.out).outputs; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("qql_cli_" + name)).string();
}

}  // namespace

TEST(Cli, Bounds) {
  const auto r = run_cli("bounds --N 3 --k 2 --p 1");
  ASSERT_EQ(r.status, 0);
  const auto report = parse_report(r.out);
  EXPECT_EQ(report.subcommand, "bounds");
  EXPECT_EQ(report.outputs["max_D"], "7");
  EXPECT_EQ(report.outputs["m_sum"], "7");
  EXPECT_EQ(outputs_of(run_cli("bounds --N 3 --k 2 --p 7/8"))["max_D"], "8");
  EXPECT_EQ(outputs_of(run_cli("bounds --N 3 --k 2 --p 1 --D 8"))["feasible"], false);
}

TEST(Cli, SortBound) {
  const auto r = run_cli("sort-bound --n 3");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(outputs_of(r)["k_min"], 2);
}

TEST(Cli, RunVandam) {
  const auto r = run_cli("run-vandam --N 3 --k 2");
  ASSERT_EQ(r.status, 0);
  const auto o = outputs_of(r);
  EXPECT_EQ(o["predicted_success"], "7/8");
  ASSERT_EQ(o["per_function_success"].size(), 8U);
  for (const auto& s : o["per_function_success"]) EXPECT_NEAR(s.get<double>(), 0.875, 1e-12);
}

TEST(Cli, RunExample1Csv) {
  const auto r = run_cli("run-example1 --n 2 --format csv");
  ASSERT_EQ(r.status, 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 5);
  EXPECT_EQ(r.out.rfind("outcome,F0,F1,F2,F3\n", 0), 0U);
  EXPECT_EQ(r.out.find('{'), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("frobnicate").status, 64);
  EXPECT_EQ(run_cli("").status, 64);
  EXPECT_EQ(run_cli("bounds --N 3 --k 4 --p 1").status, 2);
  EXPECT_EQ(run_cli("bounds --N 3 --k 2 --p 0").status, 2);
  EXPECT_EQ(run_cli("bounds --N 3").status, 2);
  EXPECT_EQ(run_cli("sort-bound --n 1").status, 2);
  EXPECT_EQ(run_cli("run-example1 --n 9").status, 2);
}

TEST(Cli, SimulateAndAnalyzeFiles) {
  const auto bundle = build_character_distinguisher(2);
  const auto alg = temp_path("alg.json");
  const auto meas = temp_path("meas.json");
  const auto fam = temp_path("fam.json");
  io::write_json_file(alg, io::to_json(bundle.algorithm));
  io::write_json_file(meas, io::to_json(bundle.measurement));
  io::write_json_file(fam, io::to_json(bundle.family));

  const auto sim = run_cli("simulate --algorithm " + alg + " --measurement " + meas + " --family " + fam);
  ASSERT_EQ(sim.status, 0);
  EXPECT_NEAR(outputs_of(sim)["worst_case_success"].get<double>(), 1.0, 1e-12);

  const auto poly = run_cli("analyze-poly --algorithm " + alg + " --measurement " + meas);
  ASSERT_EQ(poly.status, 0);
  EXPECT_EQ(outputs_of(poly)["degree_certified"], true);
  EXPECT_NEAR(outputs_of(poly)["parseval_total"].get<double>(), 1.0, 1e-12);

  io::write_json_file(fam, Json::parse(R"({"domain_size": 3, "functions": ["++"]})"));
  EXPECT_EQ(run_cli("simulate --algorithm " + alg + " --measurement " + meas + " --family " + fam).status, 2);
  std::remove(alg.c_str());
  std::remove(meas.c_str());
  std::remove(fam.c_str());
}

TEST(Cli, LemmaAudit) {
  const auto r = run_cli("lemma-audit --N 4 --k 2 --samples 50 --seed 3");
  ASSERT_EQ(r.status, 0);
  const auto o = outputs_of(r);
  EXPECT_EQ(o["minimizer"]["pass"], true);
  EXPECT_EQ(o["minimizer"]["floor"], "16/11");
  EXPECT_EQ(o["random_passed"], 50);
}

TEST(Cli, OptimizeIsSeededAndHonoursThreadsEnv) {
  const auto fam = temp_path("opt_fam.json");
  io::write_json_file(fam, io::to_json(character_family(2)));
  const std::string args = "optimize --family " + fam + " --k 1 --restarts 2 --iterations 300 --seed 7";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  const auto c = run_cli(args, "QQL_THREADS=2");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(outputs_of(a), outputs_of(b));
  EXPECT_EQ(outputs_of(a)["best_success"], outputs_of(c)["best_success"]);
  EXPECT_EQ(parse_report(a.out).seed, 7U);
  EXPECT_EQ(outputs_of(a)["bound_ceiling"], "1");
  EXPECT_EQ(run_cli(args, "QQL_THREADS=zero").status, 2);
  std::remove(fam.c_str());
}
