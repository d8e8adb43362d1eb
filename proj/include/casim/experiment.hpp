#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "casim/cascade.hpp"
#include "casim/engagement.hpp"
#include "casim/logio.hpp"
#include "casim/metrics.hpp"

namespace casim {

struct SweepAxes {
  std::vector<double> delta;
  std::vector<double> p;
  std::vector<std::uint32_t> kprime;
  std::vector<double> alpha;
  std::vector<QualityDist> dist;

  bool empty() const {
    return delta.empty() && p.empty() && kprime.empty() && alpha.empty() && dist.empty();
  }
};

struct ExperimentConfig {
  GraphParams graph;  // seed field ignored: seeds are derived per replicate
  SimParams sim;      // seed field ignored: seeds are derived per arm
  std::uint32_t replicates = 100;
  std::uint64_t base_seed = 1;
  std::int32_t warmup = 2;
  SweepAxes sweep;
  std::string output_dir = "out";
  std::uint32_t parallelism = 0;  // 0 = hardware concurrency; CASIM_THREADS caps
  std::uint32_t viewer_sample = 1000;
  bool include_singletons = false;
  bool emit_all_logs = false;
};

// Strict JSON round-trip: unknown keys are rejected, the emitted form is
// canonical (sorted keys) and re-parses to the same config.
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

// One sweep coordinate; absent fields fall back to the base config.
struct SweepPoint {
  std::optional<double> delta;
  std::optional<double> p;
  std::optional<std::uint32_t> kprime;
  std::optional<double> alpha;
  std::optional<QualityDist> dist;

  // Canonical label over the present axes only, so adding sweep axes or
  // points never changes the seeds of existing ones.
  std::string label() const;
};

// Cartesian product in deterministic row order (dist, kprime, alpha, p, delta
// nested outermost to innermost). Empty axes yield the single empty point.
std::vector<SweepPoint> expand_sweep(const SweepAxes& axes);

GraphParams graph_at(const ExperimentConfig& cfg, const SweepPoint& pt);
SimParams sim_at(const ExperimentConfig& cfg, const SweepPoint& pt);

// Seed scheme: replicate r of sweep point s runs from
//   task_seed = base_seed XOR fnv1a64(s.label() + "|rep=" + r)
// with per-arm engine seeds and the network seed derived from it by tag.
// The network seed depends only on graph-shaping values, so runs that sweep
// delta/p/dist share networks across points.
std::uint64_t task_seed(const ExperimentConfig& cfg, const SweepPoint& pt, std::uint32_t rep);
std::uint64_t network_seed(const ExperimentConfig& cfg, const GraphParams& graph,
                           std::uint32_t rep);

struct ArmStats {
  std::uint64_t impressions = 0;
  double precision = 0.0;
  double quality_mean = 0.0;
  double tlu_sum = 0.0;
  double tlu_mean = 0.0;
};

struct ReplicateResult {
  ArmStats retweet;
  ArmStats baseline;

  double gain() const { return retweet.quality_mean / baseline.quality_mean; }
};

struct ArmAggregate {
  std::uint64_t impressions = 0;  // total across replicates
  double precision = 0.0, precision_se = 0.0;
  double quality_mean = 0.0, quality_se = 0.0;
  double tlu_mean = 0.0, tlu_se = 0.0;
};

struct PointResult {
  SweepPoint point;
  GraphParams graph;
  SimParams sim;
  std::vector<ReplicateResult> replicates;
  ArmAggregate retweet;
  ArmAggregate baseline;

  // Ratio of unweighted replicate means.
  double gain() const { return retweet.quality_mean / baseline.quality_mean; }
};

// Both arms of one replicate on a shared network (paired design).
// `emit` may be null; otherwise it receives (arm, params, log) for both arms.
using LogSink = std::function<void(const std::string& arm, const SimParams&, const SimLog&)>;
ReplicateResult run_replicate(const ExperimentConfig& cfg, const SweepPoint& pt,
                              std::uint32_t rep, const Network& net, const LogSink& emit);

// Sequential single-point convenience used by tests and the acceptance suite.
PointResult run_point(const ExperimentConfig& cfg, const SweepPoint& pt);

std::uint32_t effective_parallelism(std::uint32_t requested);

// Static work partition over a thread pool; fn must be safe to call
// concurrently for distinct indices.
void parallel_for(std::size_t count, std::uint32_t threads,
                  const std::function<void(std::size_t)>& fn);

// --- CLI drivers -----------------------------------------------------------

// Writes the network file and returns (nodes, edges).
std::pair<std::size_t, std::size_t> run_generate(const ExperimentConfig& cfg,
                                                 const std::string& out_path);

// Retweet + baseline arms for every replicate; writes logs (replicate 0, or
// all with emit_all_logs), per-epoch metrics CSVs and a summary CSV with the
// gain column. Returns the point result.
PointResult run_simulate(const ExperimentConfig& cfg);

// Cartesian sweep; writes <output_dir>/sweep.csv with one aggregate row per
// (point, arm) in deterministic order.
std::vector<PointResult> run_sweep(const ExperimentConfig& cfg);

std::string sweep_csv_text(const ExperimentConfig& cfg, const std::vector<PointResult>& results);

struct AnalyzeOptions {
  std::string publications;
  std::optional<std::string> impressions;
  std::optional<std::string> engagement;
  std::optional<std::string> network;
  bool include_singletons = false;
  std::string output_dir = "out";
  double low = 0.45, high = 0.55;
  std::uint32_t min_days = 11, total_days = 16;
};

struct AnalyzeResult {
  std::size_t cascades = 0;
  std::vector<BucketRow> buckets;
  std::optional<DistanceTable> distance;
  std::optional<HopTable> hops;
  std::optional<ConsistencySummary> consistency;
  std::vector<std::string> files_written;
};

AnalyzeResult run_analyze(const AnalyzeOptions& opts);

}  // namespace casim
