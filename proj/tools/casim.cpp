// casim — audience-centric retweet cascade simulator and analytics CLI.
//
// Subcommands: generate, simulate, sweep, analyze, oracle.
// Options come from --config <json> and/or flags; flags override the file.
// Exit codes: 0 success, 2 invalid config/parameters, 3 malformed input log.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "casim/error.hpp"
#include "casim/experiment.hpp"
#include "casim/metrics.hpp"

namespace {

using namespace casim;

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw invalid_parameter_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Cli {
  std::string config_path;

  // graph
  std::string kind;
  std::uint32_t N = 0, k = 0, kprime = 0, d = 0, D = 0;
  double alpha = 1.0;
  // sim
  std::string dist, selection;
  double lambda = 1.0, delta = 1.0, p = 0.0, view_probability = 1.0;
  std::int32_t epochs = 1;
  // experiment
  std::uint32_t replicates = 100, parallelism = 0, viewer_sample = 1000;
  std::uint64_t base_seed = 1;
  std::int32_t warmup = 2;
  std::string output_dir = "out";
  bool include_singletons = false, emit_all_logs = false;
  std::vector<double> sweep_delta, sweep_p, sweep_alpha;
  std::vector<std::uint32_t> sweep_kprime;
  std::vector<std::string> sweep_dist;
};

void add_common_options(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--config", cli.config_path, "JSON config file; flags override it");
  cmd->add_option("--kind", cli.kind, "network kind: tree | tree_contracted | knn");
  cmd->add_option("--N", cli.N, "k-NN population size");
  cmd->add_option("--k", cli.k, "root fan-out (trees) / neighbor count (k-NN)");
  cmd->add_option("--kprime", cli.kprime, "per-b fan-out (trees)");
  cmd->add_option("--d", cli.d, "interests per user");
  cmd->add_option("--D", cli.D, "topic universe size");
  cmd->add_option("--alpha", cli.alpha, "homophily fraction in (0,1]");
  cmd->add_option("--dist", cli.dist, "quality distribution: uniform | exponential");
  cmd->add_option("--lambda", cli.lambda, "exponential rate");
  cmd->add_option("--selection", cli.selection, "hard_filter | delta_discount");
  cmd->add_option("--delta,--eps", cli.delta, "off-topic perception/utility factor");
  cmd->add_option("--p", cli.p, "self-interest factor (omit for the always-select model)");
  cmd->add_option("--epochs", cli.epochs, "simulated epochs");
  cmd->add_option("--view-probability", cli.view_probability, "timeline slot view probability");
  cmd->add_option("--replicates", cli.replicates, "replicates per sweep point");
  cmd->add_option("--base-seed,--seed", cli.base_seed, "base seed for derived run seeds");
  cmd->add_option("--warmup", cli.warmup, "epochs excluded from aggregate metrics");
  cmd->add_option("--output-dir,-o", cli.output_dir, "output directory");
  cmd->add_option("--parallelism", cli.parallelism, "worker threads (0 = auto; CASIM_THREADS caps)");
  cmd->add_option("--viewer-sample", cli.viewer_sample, "k-NN metrics viewer sample size");
  cmd->add_flag("--include-singletons", cli.include_singletons,
                "count never-retweeted tweets as size-1 cascades");
  cmd->add_flag("--emit-all-logs", cli.emit_all_logs, "write logs for every replicate");
  cmd->add_option("--sweep-delta", cli.sweep_delta, "delta sweep values")->delimiter(',');
  cmd->add_option("--sweep-p", cli.sweep_p, "p sweep values")->delimiter(',');
  cmd->add_option("--sweep-kprime", cli.sweep_kprime, "k' sweep values")->delimiter(',');
  cmd->add_option("--sweep-alpha", cli.sweep_alpha, "alpha sweep values")->delimiter(',');
  cmd->add_option("--sweep-dist", cli.sweep_dist, "distribution sweep values")->delimiter(',');
}

ExperimentConfig resolve_config(const CLI::App* cmd, const Cli& cli) {
  ExperimentConfig cfg;
  if (!cli.config_path.empty()) cfg = config_from_json_text(read_file(cli.config_path));

  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--kind")) cfg.graph.kind = network_kind_from_string(cli.kind);
  if (given("--N")) cfg.graph.N = cli.N;
  if (given("--k")) cfg.graph.k = cli.k;
  if (given("--kprime")) cfg.graph.kprime = cli.kprime;
  if (given("--d")) cfg.graph.d = cli.d;
  if (given("--D")) cfg.graph.D = cli.D;
  if (given("--alpha")) cfg.graph.alpha = cli.alpha;
  if (given("--dist")) cfg.sim.dist = quality_dist_from_string(cli.dist);
  if (given("--lambda")) cfg.sim.lambda = cli.lambda;
  if (given("--selection")) cfg.sim.selection = selection_mode_from_string(cli.selection);
  if (given("--delta")) cfg.sim.delta = cli.delta;
  if (given("--p")) cfg.sim.p = cli.p;
  if (given("--epochs")) cfg.sim.epochs = cli.epochs;
  if (given("--view-probability")) cfg.sim.view_probability = cli.view_probability;
  if (given("--replicates")) cfg.replicates = cli.replicates;
  if (given("--base-seed")) cfg.base_seed = cli.base_seed;
  if (given("--warmup")) cfg.warmup = cli.warmup;
  if (given("--output-dir")) cfg.output_dir = cli.output_dir;
  if (given("--parallelism")) cfg.parallelism = cli.parallelism;
  if (given("--viewer-sample")) cfg.viewer_sample = cli.viewer_sample;
  if (given("--include-singletons")) cfg.include_singletons = cli.include_singletons;
  if (given("--emit-all-logs")) cfg.emit_all_logs = cli.emit_all_logs;
  if (given("--sweep-delta")) cfg.sweep.delta = cli.sweep_delta;
  if (given("--sweep-p")) cfg.sweep.p = cli.sweep_p;
  if (given("--sweep-kprime")) cfg.sweep.kprime = cli.sweep_kprime;
  if (given("--sweep-alpha")) cfg.sweep.alpha = cli.sweep_alpha;
  if (given("--sweep-dist")) {
    cfg.sweep.dist.clear();
    for (const std::string& s : cli.sweep_dist) cfg.sweep.dist.push_back(quality_dist_from_string(s));
  }
  return cfg;
}

int run_oracle(std::uint64_t k, const std::string& dist, double lambda, std::uint32_t days,
               std::uint32_t threshold) {
  std::printf("expected_max_uniform(%llu) = %.9f\n", static_cast<unsigned long long>(k),
              expected_max_uniform(k));
  std::printf("quality_gain(uniform, %llu) = %.9f\n", static_cast<unsigned long long>(k),
              quality_gain(QualityDist::Uniform01, k));
  std::printf("expected_max_exponential(%llu, %s) = %.9f\n", static_cast<unsigned long long>(k),
              format_double(lambda).c_str(), expected_max_exponential(k, lambda));
  std::printf("quality_gain(exponential, %llu) = %.9f\n", static_cast<unsigned long long>(k),
              quality_gain(QualityDist::Exponential, k));
  std::printf("baseline_consistency_probability(%u, %u) = %.9f\n", days, threshold,
              baseline_consistency_probability(days, threshold));
  if (!dist.empty()) quality_dist_from_string(dist);  // validate when given
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"casim: seedable retweet-cascade simulator and audience analytics"};
  app.require_subcommand(1);
  Cli cli;

  CLI::App* generate = app.add_subcommand("generate", "build a network and write it to a file");
  std::string network_out = "network.tsv";
  add_common_options(generate, cli);
  generate->add_option("--out", network_out, "network file path");

  CLI::App* simulate =
      app.add_subcommand("simulate", "run retweet and baseline arms, write logs and metrics");
  add_common_options(simulate, cli);

  CLI::App* sweep = app.add_subcommand("sweep", "run the Cartesian sweep and write sweep.csv");
  add_common_options(sweep, cli);

  CLI::App* analyze = app.add_subcommand("analyze", "cascade analytics over existing logs");
  AnalyzeOptions aopts;
  std::string imp_path, eng_path, net_path;
  analyze->add_option("--publications", aopts.publications, "publication log")->required();
  analyze->add_option("--impressions", imp_path, "impression log");
  analyze->add_option("--engagement", eng_path, "engagement log");
  analyze->add_option("--network", net_path, "network file (for the distance table)");
  analyze->add_option("--output-dir,-o", aopts.output_dir, "output directory");
  analyze->add_flag("--include-singletons", aopts.include_singletons,
                    "count never-retweeted tweets as size-1 cascades");
  analyze->add_option("--min-days", aopts.min_days, "consistency day threshold");
  analyze->add_option("--total-days", aopts.total_days, "consistency observation window");

  CLI::App* oracle = app.add_subcommand("oracle", "print closed-form values");
  std::uint64_t oracle_k = 50;
  std::string oracle_dist;
  double oracle_lambda = 1.0;
  std::uint32_t oracle_days = 16, oracle_threshold = 11;
  oracle->add_option("--k", oracle_k, "pool size");
  oracle->add_option("--dist", oracle_dist, "distribution to validate");
  oracle->add_option("--lambda", oracle_lambda, "exponential rate");
  oracle->add_option("--days", oracle_days, "observation days");
  oracle->add_option("--threshold", oracle_threshold, "consistency day threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      const ExperimentConfig cfg = resolve_config(generate, cli);
      const auto [nodes, edges] = casim::run_generate(cfg, network_out);
      std::printf("wrote %s: nodes=%zu edges=%zu\n", network_out.c_str(), nodes, edges);
    } else if (simulate->parsed()) {
      const ExperimentConfig cfg = resolve_config(simulate, cli);
      const PointResult res = casim::run_simulate(cfg);
      std::printf("replicates=%zu impressions(retweet)=%llu gain=%.6f\n", res.replicates.size(),
                  static_cast<unsigned long long>(res.retweet.impressions), res.gain());
      std::printf("wrote %s/simulate_summary.csv\n", cfg.output_dir.c_str());
    } else if (sweep->parsed()) {
      const ExperimentConfig cfg = resolve_config(sweep, cli);
      const auto results = casim::run_sweep(cfg);
      std::printf("points=%zu replicates=%u\n", results.size(), cfg.replicates);
      std::printf("wrote %s/sweep.csv\n", cfg.output_dir.c_str());
    } else if (analyze->parsed()) {
      if (analyze->count("--impressions")) aopts.impressions = imp_path;
      if (analyze->count("--engagement")) aopts.engagement = eng_path;
      if (analyze->count("--network")) aopts.network = net_path;
      const AnalyzeResult res = casim::run_analyze(aopts);
      std::printf("cascades=%zu\n", res.cascades);
      for (const std::string& f : res.files_written) std::printf("wrote %s\n", f.c_str());
    } else if (oracle->parsed()) {
      return run_oracle(oracle_k, oracle_dist, oracle_lambda, oracle_days, oracle_threshold);
    }
  } catch (const casim::malformed_log_error& e) {
    std::fprintf(stderr, "malformed log: %s\n", e.what());
    return 3;
  } catch (const casim::invalid_parameter_error& e) {
    std::fprintf(stderr, "invalid parameters: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
