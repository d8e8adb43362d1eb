// Shell-level smoke tests of the casim binary: exit codes and file outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CASIM_BIN_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  std::array<char, 4096> buf;
  while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "casim_cli" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("oracle prints the closed forms") {
  const CliResult res = run_cli("oracle --k 50 --days 16 --threshold 11");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("1.960784314") != std::string::npos);
  CHECK(res.output.find("4.499205338") != std::string::npos);
  CHECK(res.output.find("0.210113525") != std::string::npos);
}

TEST_CASE("invalid parameters exit with code 2") {
  CHECK(run_cli("generate --kind tree --k 0 --kprime 2 --d 2 --D 4 --out /tmp/x.tsv").exit_code ==
        2);
  CHECK(run_cli("simulate --kind knn --N 5 --k 9 --d 2 --D 4 --epochs 2").exit_code == 2);
  CHECK(run_cli("oracle --k 0").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);             // missing subcommand
  CHECK(run_cli("frobnicate").exit_code == 2);   // unknown subcommand
}

TEST_CASE("malformed logs exit with code 3 and name the line") {
  const std::string dir = fresh_dir("malformed");
  {
    std::ofstream os(dir + "/pubs.tsv");
    os << "0\t1\t0\t1\t3\t0.5\t0\t-\n";
    os << "1\t2\t0\t1\t3\t0.5\t1\t9\n";  // dangling parent
  }
  const CliResult res = run_cli("analyze --publications " + dir + "/pubs.tsv -o " + dir);
  CHECK(res.exit_code == 3);
  CHECK(res.output.find("line 2") != std::string::npos);
}

TEST_CASE("generate / simulate / analyze round-trip through the filesystem") {
  const std::string dir = fresh_dir("roundtrip");
  const std::string common =
      " --kind tree --k 3 --kprime 4 --d 3 --D 12 --alpha 0.6 --epochs 8 --replicates 2"
      " --base-seed 5 -o " + dir;

  const CliResult gen = run_cli("generate" + common + " --out " + dir + "/network.tsv");
  CHECK(gen.exit_code == 0);
  CHECK(gen.output.find("nodes=16") != std::string::npos);

  const CliResult sim = run_cli("simulate" + common);
  CHECK(sim.exit_code == 0);
  CHECK(std::filesystem::exists(dir + "/simulate_summary.csv"));
  CHECK(std::filesystem::exists(dir + "/rep000_retweet_publications.tsv"));

  const CliResult ana = run_cli("analyze --publications " + dir +
                                "/rep000_retweet_publications.tsv --impressions " + dir +
                                "/rep000_retweet_impressions.tsv --network " + dir +
                                "/network.tsv -o " + dir);
  CHECK(ana.exit_code == 0);
  CHECK(std::filesystem::exists(dir + "/cascade_buckets.csv"));
  CHECK(std::filesystem::exists(dir + "/hop_table.csv"));
  CHECK(std::filesystem::exists(dir + "/distance_table.csv"));
}

TEST_CASE("sweep honors config files with flag overrides") {
  const std::string dir = fresh_dir("sweepcfg");
  {
    std::ofstream os(dir + "/config.json");
    os << R"({"graph":{"kind":"tree","k":3,"kprime":4,"d":3,"D":12,"alpha":1.0},)"
       << R"("sim":{"epochs":8},"replicates":2,"base_seed":11,)"
       << R"("sweep":{"delta":[0.0,0.5]},"output_dir":")" << dir << R"("})";
  }
  const CliResult res = run_cli("sweep --config " + dir + "/config.json --replicates 3");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("points=2") != std::string::npos);
  CHECK(res.output.find("replicates=3") != std::string::npos);
  CHECK(std::filesystem::exists(dir + "/sweep.csv"));

  // --eps is an alias for --delta.
  const CliResult eps = run_cli("simulate --kind tree --k 2 --kprime 2 --d 2 --D 8 --epochs 4"
                                " --selection delta_discount --eps 0.3 --replicates 1 -o " +
                                dir + "/eps");
  CHECK(eps.exit_code == 0);
}
