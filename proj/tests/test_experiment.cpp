#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "casim/error.hpp"
#include "casim/experiment.hpp"

using namespace casim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "casim_test" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

ExperimentConfig tiny_tree_config() {
  ExperimentConfig cfg;
  cfg.graph = GraphParams{NetworkKind::Tree, 0, 3, 5, 4, 20, 1.0, 0};
  cfg.sim.epochs = 12;
  cfg.replicates = 3;
  cfg.base_seed = 99;
  cfg.warmup = 2;
  cfg.parallelism = 1;
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config round-trip
// ---------------------------------------------------------------------------

TEST_CASE("config JSON round-trips canonically") {
  ExperimentConfig cfg = tiny_tree_config();
  cfg.sim.p = 0.6;
  cfg.sweep.delta = {0.0, 0.2};
  cfg.sweep.dist = {QualityDist::Uniform01, QualityDist::Exponential};
  const std::string text = config_to_json_text(cfg);
  const ExperimentConfig back = config_from_json_text(text);
  CHECK(config_to_json_text(back) == text);
  CHECK(back.sim.p == cfg.sim.p);
  CHECK(back.sweep.delta == cfg.sweep.delta);
  CHECK(back.graph.kind == cfg.graph.kind);
}

TEST_CASE("config parser rejects unknown keys and bad values") {
  CHECK_THROWS_AS(config_from_json_text("{\"grpah\": {}}"), invalid_parameter_error);
  CHECK_THROWS_AS(config_from_json_text("{\"graph\": {\"kk\": 1}}"), invalid_parameter_error);
  CHECK_THROWS_AS(config_from_json_text("not json"), invalid_parameter_error);
  CHECK_THROWS_AS(config_from_json_text("{\"replicates\": 0}"), invalid_parameter_error);
  // p: null is the always-select model.
  const ExperimentConfig cfg = config_from_json_text("{\"sim\": {\"p\": null}}");
  CHECK_FALSE(cfg.sim.p.has_value());
}

// ---------------------------------------------------------------------------
// Sweep points and seeds
// ---------------------------------------------------------------------------

TEST_CASE("expand_sweep is the ordered Cartesian product") {
  SweepAxes axes;
  CHECK(expand_sweep(axes).size() == 1);
  CHECK(expand_sweep(axes)[0].label().empty());

  axes.delta = {0.0, 0.2, 0.4};
  axes.p = {0.5, 0.9};
  const auto points = expand_sweep(axes);
  REQUIRE(points.size() == 6);
  CHECK(points[0].label() == "p=0.5|delta=0");
  CHECK(points[1].label() == "p=0.5|delta=0.2");
  CHECK(points[3].label() == "p=0.9|delta=0");
}

TEST_CASE("task seeds are stable under sweep growth") {
  ExperimentConfig cfg = tiny_tree_config();
  cfg.sweep.delta = {0.0, 0.2};
  SweepPoint pt;
  pt.delta = 0.2;
  const std::uint64_t seed_before = task_seed(cfg, pt, 3);
  cfg.sweep.delta.push_back(0.4);  // adding points must not perturb existing ones
  cfg.sweep.p.push_back(0.5);
  CHECK(task_seed(cfg, pt, 3) == seed_before);
  CHECK(task_seed(cfg, pt, 4) != seed_before);

  // The network seed ignores axes that do not shape the graph.
  SweepPoint other = pt;
  other.delta = 0.4;
  CHECK(network_seed(cfg, graph_at(cfg, pt), 1) == network_seed(cfg, graph_at(cfg, other), 1));
  SweepPoint kp = pt;
  kp.kprime = 7;
  CHECK(network_seed(cfg, graph_at(cfg, pt), 1) != network_seed(cfg, graph_at(cfg, kp), 1));
}

TEST_CASE("effective_parallelism honors CASIM_THREADS") {
  setenv("CASIM_THREADS", "2", 1);
  CHECK(effective_parallelism(8) == 2);
  CHECK(effective_parallelism(1) == 1);
  setenv("CASIM_THREADS", "0", 1);
  CHECK(effective_parallelism(8) == 8);
  unsetenv("CASIM_THREADS");
  CHECK(effective_parallelism(4) == 4);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] = 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(
      parallel_for(8, 3, [](std::size_t i) { if (i == 5) throw invalid_parameter_error("x"); }),
      invalid_parameter_error);
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

TEST_CASE("run_simulate writes logs, metrics and a summary with gain") {
  ExperimentConfig cfg = tiny_tree_config();
  cfg.output_dir = fresh_dir("simulate");
  const PointResult res = run_simulate(cfg);
  REQUIRE(res.replicates.size() == 3);
  CHECK(res.gain() > 1.0);  // k'+1 = 6 pool on a hard-filter tree

  const std::string summary = slurp(cfg.output_dir + "/simulate_summary.csv");
  CHECK(summary.find("#config {") == 0);
  CHECK(summary.find("replicate,arm,impressions,precision,quality_mean,tlu_sum,tlu_mean,gain") !=
        std::string::npos);
  CHECK(summary.find("mean,retweet") != std::string::npos);

  // Replicate-0 logs parse back into a log of the right shape.
  const SimLog back = read_run_files(cfg.output_dir + "/rep000_retweet_publications.tsv",
                                     nullptr);
  CHECK(back.publications.size() == (1 + 3 + 15) * 12);
  const std::string imp_path = cfg.output_dir + "/rep000_baseline_impressions.tsv";
  CHECK(std::filesystem::exists(imp_path));
  CHECK(std::filesystem::exists(cfg.output_dir + "/rep000_metrics_retweet.csv"));

  // Same config, same bytes (re-run rewrites the files in place).
  run_simulate(cfg);
  CHECK(slurp(cfg.output_dir + "/simulate_summary.csv") == summary);
}

TEST_CASE("sweep output is byte-identical at any parallelism") {
  ExperimentConfig cfg = tiny_tree_config();
  cfg.graph.alpha = 0.5;
  cfg.sim.selection = SelectionMode::DeltaDiscount;
  cfg.sweep.delta = {0.0, 0.4};
  cfg.sweep.p = {0.6};
  cfg.replicates = 2;

  cfg.parallelism = 1;
  cfg.output_dir = fresh_dir("sweep_serial");
  run_sweep(cfg);
  const std::string serial = slurp(cfg.output_dir + "/sweep.csv");

  cfg.parallelism = 4;
  cfg.output_dir = fresh_dir("sweep_parallel");
  run_sweep(cfg);
  std::string parallel = slurp(cfg.output_dir + "/sweep.csv");

  // The echoed config differs only in the fields we changed on purpose.
  auto normalize = [](std::string s) {
    const auto from = s.find("\"output_dir\"");
    const auto to = s.find(',', from);
    s.erase(from, to - from);
    const auto pfrom = s.find("\"parallelism\"");
    const auto pto = s.find(',', pfrom);
    s.erase(pfrom, pto - pfrom);
    return s;
  };
  CHECK(normalize(serial) == normalize(parallel));
}

TEST_CASE("a sweep with no axes reproduces the simulate point") {
  ExperimentConfig cfg = tiny_tree_config();
  cfg.output_dir = fresh_dir("sweep_single");
  const auto results = run_sweep(cfg);
  REQUIRE(results.size() == 1);

  ExperimentConfig sim_cfg = cfg;
  sim_cfg.output_dir = fresh_dir("simulate_single");
  const PointResult sim_res = run_simulate(sim_cfg);
  CHECK(results[0].gain() == sim_res.gain());
  CHECK(results[0].retweet.quality_mean == sim_res.retweet.quality_mean);
  CHECK(results[0].baseline.precision == sim_res.baseline.precision);
}

TEST_CASE("replaying the embedded config reproduces the file") {
  ExperimentConfig cfg = tiny_tree_config();
  cfg.sweep.delta = {0.0, 0.8};
  cfg.output_dir = fresh_dir("sweep_replay");
  run_sweep(cfg);
  const std::string original = slurp(cfg.output_dir + "/sweep.csv");

  const std::string line = original.substr(0, original.find('\n'));
  REQUIRE(line.rfind("#config ", 0) == 0);
  const ExperimentConfig replay = config_from_json_text(line.substr(8));
  run_sweep(replay);  // same output_dir: rewrites the file in place
  CHECK(slurp(cfg.output_dir + "/sweep.csv") == original);
}

TEST_CASE("quality gain stabilizes in k' once the pool is large") {
  // Normalized by the oracle at pool size k'+1, the gain moves < 2% between
  // k' = 40 and k' = 80.
  ExperimentConfig cfg;
  cfg.graph = GraphParams{NetworkKind::Tree, 0, 5, 0, 6, 40, 1.0, 0};
  cfg.sim.epochs = 52;
  cfg.replicates = 25;
  cfg.base_seed = 7;
  cfg.warmup = 2;
  cfg.sweep.kprime = {5, 10, 20, 40, 80};
  cfg.output_dir = fresh_dir("sweep_kprime");
  cfg.parallelism = 0;

  const auto results = run_sweep(cfg);
  REQUIRE(results.size() == 5);
  std::map<std::uint32_t, double> normalized;
  for (const PointResult& res : results) {
    const double oracle = quality_gain(QualityDist::Uniform01, res.graph.kprime + 1);
    normalized[res.graph.kprime] = res.gain() / oracle;
  }
  CHECK(std::abs(normalized[80] - normalized[40]) / normalized[40] < 0.02);
}

TEST_CASE("run_analyze produces the documented tables") {
  // Simulate, write logs, analyze them end to end.
  ExperimentConfig cfg = tiny_tree_config();
  cfg.graph.alpha = 0.6;
  cfg.output_dir = fresh_dir("analyze_src");
  run_simulate(cfg);

  const std::string net_path = cfg.output_dir + "/network.tsv";
  run_generate(cfg, net_path);

  AnalyzeOptions opts;
  opts.publications = cfg.output_dir + "/rep000_retweet_publications.tsv";
  opts.impressions = cfg.output_dir + "/rep000_retweet_impressions.tsv";
  opts.network = net_path;
  opts.output_dir = fresh_dir("analyze_out");
  const AnalyzeResult res = run_analyze(opts);
  CHECK(std::filesystem::exists(opts.output_dir + "/cascade_buckets.csv"));
  CHECK(std::filesystem::exists(opts.output_dir + "/hop_table.csv"));
  CHECK(std::filesystem::exists(opts.output_dir + "/distance_table.csv"));
  REQUIRE(res.hops.has_value());
  CHECK(res.hops->total > 0);

  // Baseline logs: no cascades, all impressions at distance 1.
  AnalyzeOptions base;
  base.publications = cfg.output_dir + "/rep000_baseline_publications.tsv";
  base.impressions = cfg.output_dir + "/rep000_baseline_impressions.tsv";
  base.network = net_path;
  base.output_dir = fresh_dir("analyze_base");
  const AnalyzeResult bres = run_analyze(base);
  CHECK(bres.cascades == 0);
  REQUIRE(bres.distance.has_value());
  CHECK(bres.distance->by_distance.at(1) == bres.distance->total);
}

TEST_CASE("network generation is reproducible at the file level") {
  ExperimentConfig cfg = tiny_tree_config();
  const std::string dir = fresh_dir("generate");
  const auto [nodes, edges] = run_generate(cfg, dir + "/net_a.tsv");
  CHECK(nodes == 1 + 3 + 15);
  CHECK(edges == 3 + 15);
  run_generate(cfg, dir + "/net_b.tsv");
  CHECK(slurp(dir + "/net_a.tsv") == slurp(dir + "/net_b.tsv"));
}
