#include "casim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "casim/error.hpp"

namespace casim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw invalid_parameter_error("unknown config key '" + key + "' in " + where);
  }
}

template <typename T>
void maybe_get(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_parameter_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw invalid_parameter_error("config must be a JSON object");
  reject_unknown_keys(root,
                      {"graph", "sim", "replicates", "base_seed", "warmup", "sweep", "output_dir",
                       "parallelism", "viewer_sample", "include_singletons", "emit_all_logs"},
                      "top level");

  ExperimentConfig cfg;
  try {
    if (root.contains("graph")) {
      const json& g = root.at("graph");
      reject_unknown_keys(g, {"kind", "N", "k", "kprime", "d", "D", "alpha"}, "graph");
      if (g.contains("kind")) cfg.graph.kind = network_kind_from_string(g.at("kind").get<std::string>());
      maybe_get(g, "N", cfg.graph.N);
      maybe_get(g, "k", cfg.graph.k);
      maybe_get(g, "kprime", cfg.graph.kprime);
      maybe_get(g, "d", cfg.graph.d);
      maybe_get(g, "D", cfg.graph.D);
      maybe_get(g, "alpha", cfg.graph.alpha);
    }
    if (root.contains("sim")) {
      const json& s = root.at("sim");
      reject_unknown_keys(
          s, {"dist", "lambda", "selection", "delta", "p", "epochs", "view_probability"}, "sim");
      if (s.contains("dist")) cfg.sim.dist = quality_dist_from_string(s.at("dist").get<std::string>());
      maybe_get(s, "lambda", cfg.sim.lambda);
      if (s.contains("selection")) {
        cfg.sim.selection = selection_mode_from_string(s.at("selection").get<std::string>());
      }
      maybe_get(s, "delta", cfg.sim.delta);
      if (s.contains("p") && !s.at("p").is_null()) cfg.sim.p = s.at("p").get<double>();
      maybe_get(s, "epochs", cfg.sim.epochs);
      maybe_get(s, "view_probability", cfg.sim.view_probability);
    }
    maybe_get(root, "replicates", cfg.replicates);
    maybe_get(root, "base_seed", cfg.base_seed);
    maybe_get(root, "warmup", cfg.warmup);
    if (root.contains("sweep")) {
      const json& s = root.at("sweep");
      reject_unknown_keys(s, {"delta", "p", "kprime", "alpha", "dist"}, "sweep");
      maybe_get(s, "delta", cfg.sweep.delta);
      maybe_get(s, "p", cfg.sweep.p);
      maybe_get(s, "kprime", cfg.sweep.kprime);
      maybe_get(s, "alpha", cfg.sweep.alpha);
      if (s.contains("dist")) {
        for (const auto& v : s.at("dist")) {
          cfg.sweep.dist.push_back(quality_dist_from_string(v.get<std::string>()));
        }
      }
    }
    maybe_get(root, "output_dir", cfg.output_dir);
    maybe_get(root, "parallelism", cfg.parallelism);
    maybe_get(root, "viewer_sample", cfg.viewer_sample);
    maybe_get(root, "include_singletons", cfg.include_singletons);
    maybe_get(root, "emit_all_logs", cfg.emit_all_logs);
  } catch (const json::exception& e) {
    throw invalid_parameter_error(std::string("bad config value: ") + e.what());
  }
  if (cfg.replicates < 1) throw invalid_parameter_error("replicates must be >= 1");
  if (cfg.warmup < 0) throw invalid_parameter_error("warmup must be >= 0");
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json root;
  root["graph"] = {{"kind", to_string(cfg.graph.kind)}, {"N", cfg.graph.N},
                   {"k", cfg.graph.k},                  {"kprime", cfg.graph.kprime},
                   {"d", cfg.graph.d},                  {"D", cfg.graph.D},
                   {"alpha", cfg.graph.alpha}};
  root["sim"] = {{"dist", to_string(cfg.sim.dist)},
                 {"lambda", cfg.sim.lambda},
                 {"selection", to_string(cfg.sim.selection)},
                 {"delta", cfg.sim.delta},
                 {"p", cfg.sim.p ? json(*cfg.sim.p) : json(nullptr)},
                 {"epochs", cfg.sim.epochs},
                 {"view_probability", cfg.sim.view_probability}};
  root["replicates"] = cfg.replicates;
  root["base_seed"] = cfg.base_seed;
  root["warmup"] = cfg.warmup;
  json sweep;
  sweep["delta"] = cfg.sweep.delta;
  sweep["p"] = cfg.sweep.p;
  sweep["kprime"] = cfg.sweep.kprime;
  sweep["alpha"] = cfg.sweep.alpha;
  std::vector<std::string> dists;
  for (QualityDist d : cfg.sweep.dist) dists.push_back(to_string(d));
  sweep["dist"] = dists;
  root["sweep"] = sweep;
  root["output_dir"] = cfg.output_dir;
  root["parallelism"] = cfg.parallelism;
  root["viewer_sample"] = cfg.viewer_sample;
  root["include_singletons"] = cfg.include_singletons;
  root["emit_all_logs"] = cfg.emit_all_logs;
  return root.dump();
}

// ---------------------------------------------------------------------------
// Sweep points and seeds
// ---------------------------------------------------------------------------

std::string SweepPoint::label() const {
  std::ostringstream os;
  bool first = true;
  auto put = [&](const char* name, const std::string& value) {
    if (!first) os << '|';
    os << name << '=' << value;
    first = false;
  };
  if (dist) put("dist", to_string(*dist));
  if (kprime) put("kprime", std::to_string(*kprime));
  if (alpha) put("alpha", format_double(*alpha));
  if (p) put("p", format_double(*p));
  if (delta) put("delta", format_double(*delta));
  return os.str();
}

std::vector<SweepPoint> expand_sweep(const SweepAxes& axes) {
  std::vector<SweepPoint> points;
  const std::size_t nd = std::max<std::size_t>(1, axes.dist.size());
  const std::size_t nk = std::max<std::size_t>(1, axes.kprime.size());
  const std::size_t na = std::max<std::size_t>(1, axes.alpha.size());
  const std::size_t np = std::max<std::size_t>(1, axes.p.size());
  const std::size_t ne = std::max<std::size_t>(1, axes.delta.size());
  for (std::size_t id = 0; id < nd; ++id) {
    for (std::size_t ik = 0; ik < nk; ++ik) {
      for (std::size_t ia = 0; ia < na; ++ia) {
        for (std::size_t ip = 0; ip < np; ++ip) {
          for (std::size_t ie = 0; ie < ne; ++ie) {
            SweepPoint pt;
            if (!axes.dist.empty()) pt.dist = axes.dist[id];
            if (!axes.kprime.empty()) pt.kprime = axes.kprime[ik];
            if (!axes.alpha.empty()) pt.alpha = axes.alpha[ia];
            if (!axes.p.empty()) pt.p = axes.p[ip];
            if (!axes.delta.empty()) pt.delta = axes.delta[ie];
            points.push_back(pt);
          }
        }
      }
    }
  }
  return points;
}

GraphParams graph_at(const ExperimentConfig& cfg, const SweepPoint& pt) {
  GraphParams g = cfg.graph;
  if (pt.kprime) g.kprime = *pt.kprime;
  if (pt.alpha) g.alpha = *pt.alpha;
  return g;
}

SimParams sim_at(const ExperimentConfig& cfg, const SweepPoint& pt) {
  SimParams s = cfg.sim;
  if (pt.delta) s.delta = *pt.delta;
  if (pt.p) s.p = *pt.p;
  if (pt.dist) s.dist = *pt.dist;
  return s;
}

std::uint64_t task_seed(const ExperimentConfig& cfg, const SweepPoint& pt, std::uint32_t rep) {
  return cfg.base_seed ^ fnv1a64(pt.label() + "|rep=" + std::to_string(rep));
}

namespace {

std::string graph_canonical(const GraphParams& g) {
  std::ostringstream os;
  os << "kind=" << to_string(g.kind) << "|N=" << g.N << "|k=" << g.k << "|kprime=" << g.kprime
     << "|d=" << g.d << "|D=" << g.D << "|alpha=" << format_double(g.alpha);
  return os.str();
}

}  // namespace

std::uint64_t network_seed(const ExperimentConfig& cfg, const GraphParams& graph,
                           std::uint32_t rep) {
  return splitmix64(cfg.base_seed ^
                    fnv1a64("net|" + graph_canonical(graph) + "|rep=" + std::to_string(rep)));
}

// ---------------------------------------------------------------------------
// Replicates and aggregation
// ---------------------------------------------------------------------------

namespace {

ArmStats arm_stats_from(const MetricsRow& aggregate) {
  ArmStats s;
  s.impressions = aggregate.impressions;
  s.precision = aggregate.precision;
  s.quality_mean = aggregate.quality_mean;
  s.tlu_sum = aggregate.tlu_sum;
  s.tlu_mean = aggregate.tlu_mean;
  return s;
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

ArmAggregate aggregate_arm(const std::vector<ReplicateResult>& reps, bool retweet_arm) {
  std::vector<double> prec, qual, tlu;
  ArmAggregate agg;
  for (const ReplicateResult& r : reps) {
    const ArmStats& s = retweet_arm ? r.retweet : r.baseline;
    prec.push_back(s.precision);
    qual.push_back(s.quality_mean);
    tlu.push_back(s.tlu_mean);
    agg.impressions += s.impressions;
  }
  agg.precision = mean_of(prec);
  agg.precision_se = se_of(prec, agg.precision);
  agg.quality_mean = mean_of(qual);
  agg.quality_se = se_of(qual, agg.quality_mean);
  agg.tlu_mean = mean_of(tlu);
  agg.tlu_se = se_of(tlu, agg.tlu_mean);
  return agg;
}

}  // namespace

ReplicateResult run_replicate(const ExperimentConfig& cfg, const SweepPoint& pt,
                              std::uint32_t rep, const Network& net, const LogSink& emit) {
  const std::uint64_t tseed = task_seed(cfg, pt, rep);
  const std::uint64_t nseed = network_seed(cfg, graph_at(cfg, pt), rep);
  const std::vector<UserId> viewers =
      default_viewer_set(net, cfg.viewer_sample, derive_seed(nseed, "viewers"));

  SimParams sim = sim_at(cfg, pt);
  ReplicateResult result;

  sim.seed = derive_seed(tseed, "arm=retweet");
  {
    const SimLog log = run_simulation(net, sim);
    result.retweet = arm_stats_from(report_metrics(log, net, sim.delta, cfg.warmup, viewers).aggregate);
    if (emit) emit("retweet", sim, log);
  }
  sim.seed = derive_seed(tseed, "arm=baseline");
  {
    const SimLog log = run_baseline(net, sim);
    result.baseline = arm_stats_from(report_metrics(log, net, sim.delta, cfg.warmup, viewers).aggregate);
    if (emit) emit("baseline", sim, log);
  }
  return result;
}

PointResult run_point(const ExperimentConfig& cfg, const SweepPoint& pt) {
  PointResult res;
  res.point = pt;
  res.graph = graph_at(cfg, pt);
  res.sim = sim_at(cfg, pt);
  res.replicates.resize(cfg.replicates);
  for (std::uint32_t r = 0; r < cfg.replicates; ++r) {
    GraphParams g = res.graph;
    g.seed = network_seed(cfg, g, r);
    const Network net = build_network(g);
    res.replicates[r] = run_replicate(cfg, pt, r, net, nullptr);
  }
  res.retweet = aggregate_arm(res.replicates, true);
  res.baseline = aggregate_arm(res.replicates, false);
  return res;
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

std::uint32_t effective_parallelism(std::uint32_t requested) {
  std::uint32_t threads = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (const char* cap_env = std::getenv("CASIM_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(cap_env, &end, 10);
    if (end != cap_env && cap > 0) threads = std::min<std::uint32_t>(threads, cap);
  }
  return std::max<std::uint32_t>(threads, 1);
}

void parallel_for(std::size_t count, std::uint32_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  threads = std::min<std::uint32_t>(threads, static_cast<std::uint32_t>(count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::uint32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

std::pair<std::size_t, std::size_t> run_generate(const ExperimentConfig& cfg,
                                                 const std::string& out_path) {
  GraphParams g = cfg.graph;
  g.seed = network_seed(cfg, g, 0);
  const Network net = build_network(g);
  const auto parent = std::filesystem::path(out_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  write_network_file(net, out_path);
  return {net.nodes.size(), net.edge_count()};
}

namespace {

// Networks shared by every task of a sweep: one per (graph shape, replicate).
struct NetworkCache {
  std::map<std::pair<std::string, std::uint32_t>, std::size_t> slot;
  std::vector<GraphParams> params;
  std::vector<Network> nets;

  std::size_t request(const ExperimentConfig& cfg, const GraphParams& g, std::uint32_t rep) {
    const auto key = std::make_pair(graph_canonical(g), rep);
    const auto it = slot.find(key);
    if (it != slot.end()) return it->second;
    const std::size_t idx = params.size();
    slot.emplace(key, idx);
    GraphParams seeded = g;
    seeded.seed = network_seed(cfg, g, rep);
    params.push_back(seeded);
    return idx;
  }

  void build_all(std::uint32_t threads) {
    nets.resize(params.size());
    parallel_for(params.size(), threads, [&](std::size_t i) { nets[i] = build_network(params[i]); });
  }
};

std::string file_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw invalid_parameter_error("cannot open for writing: " + path);
  os << text;
}

std::string arm_csv_fields(const ArmStats& s) {
  std::ostringstream os;
  os << s.impressions << ',' << format_double(s.precision) << ','
     << format_double(s.quality_mean) << ',' << format_double(s.tlu_sum) << ','
     << format_double(s.tlu_mean);
  return os.str();
}

}  // namespace

PointResult run_simulate(const ExperimentConfig& cfg) {
  if (!cfg.sweep.empty()) {
    throw invalid_parameter_error("simulate does not take sweep axes; use the sweep command");
  }
  std::filesystem::create_directories(cfg.output_dir);
  const std::string echo = config_to_json_text(cfg);
  const SweepPoint pt{};  // empty point

  PointResult res;
  res.point = pt;
  res.graph = graph_at(cfg, pt);
  res.sim = sim_at(cfg, pt);
  res.replicates.resize(cfg.replicates);

  NetworkCache cache;
  std::vector<std::size_t> net_of_rep(cfg.replicates);
  for (std::uint32_t r = 0; r < cfg.replicates; ++r) {
    net_of_rep[r] = cache.request(cfg, res.graph, r);
  }
  const std::uint32_t threads = effective_parallelism(cfg.parallelism);
  cache.build_all(threads);

  parallel_for(cfg.replicates, threads, [&](std::size_t r) {
    const Network& net = cache.nets[net_of_rep[r]];
    LogSink sink = nullptr;
    if (cfg.emit_all_logs || r == 0) {
      char tag[32];
      std::snprintf(tag, sizeof(tag), "rep%03zu", r);
      sink = [&, r, prefix = std::string(tag)](const std::string& arm, const SimParams& sp,
                                               const SimLog& log) {
        const std::string header = params_header(sp, net.kind, arm);
        std::ofstream pubs(file_path(cfg.output_dir, prefix + "_" + arm + "_publications.tsv"),
                           std::ios::binary);
        write_publication_log(log, header, pubs);
        std::ofstream imps(file_path(cfg.output_dir, prefix + "_" + arm + "_impressions.tsv"),
                           std::ios::binary);
        write_impression_log(log, header, imps);
        const std::vector<UserId> viewers = default_viewer_set(
            net, cfg.viewer_sample,
            derive_seed(network_seed(cfg, res.graph, static_cast<std::uint32_t>(r)), "viewers"));
        const MetricsReport report = report_metrics(log, net, sp.delta, cfg.warmup, viewers);
        std::ofstream metrics(file_path(cfg.output_dir, prefix + "_metrics_" + arm + ".csv"),
                              std::ios::binary);
        write_metrics_csv(report, echo, metrics);
      };
    }
    res.replicates[r] =
        run_replicate(cfg, pt, static_cast<std::uint32_t>(r), net, sink);
  });

  res.retweet = aggregate_arm(res.replicates, true);
  res.baseline = aggregate_arm(res.replicates, false);

  std::ostringstream csv;
  csv << "#config " << echo << "\n";
  csv << "replicate,arm,impressions,precision,quality_mean,tlu_sum,tlu_mean,gain\n";
  for (std::size_t r = 0; r < res.replicates.size(); ++r) {
    const ReplicateResult& rep = res.replicates[r];
    csv << r << ",retweet," << arm_csv_fields(rep.retweet) << ',' << format_double(rep.gain())
        << '\n';
    csv << r << ",baseline," << arm_csv_fields(rep.baseline) << ',' << format_double(rep.gain())
        << '\n';
  }
  auto mean_row = [&](const char* arm, const ArmAggregate& a) {
    csv << "mean," << arm << ',' << a.impressions << ',' << format_double(a.precision) << ','
        << format_double(a.quality_mean) << ",," << format_double(a.tlu_mean) << ','
        << format_double(res.gain()) << '\n';
  };
  mean_row("retweet", res.retweet);
  mean_row("baseline", res.baseline);
  write_text_file(file_path(cfg.output_dir, "simulate_summary.csv"), csv.str());
  return res;
}

std::string sweep_csv_text(const ExperimentConfig& cfg, const std::vector<PointResult>& results) {
  std::ostringstream csv;
  csv << "#config " << config_to_json_text(cfg) << "\n";
  csv << "kind,dist,delta,p,kprime,alpha,arm,replicates,impressions,precision,precision_se,"
         "quality_mean,quality_se,tlu_mean,tlu_se,gain\n";
  for (const PointResult& res : results) {
    auto row = [&](const char* arm, const ArmAggregate& a) {
      csv << to_string(res.graph.kind) << ',' << to_string(res.sim.dist) << ','
          << format_double(res.sim.delta) << ',' << (res.sim.p ? format_double(*res.sim.p) : "-")
          << ',' << res.graph.kprime << ',' << format_double(res.graph.alpha) << ',' << arm << ','
          << res.replicates.size() << ',' << a.impressions << ',' << format_double(a.precision)
          << ',' << format_double(a.precision_se) << ',' << format_double(a.quality_mean) << ','
          << format_double(a.quality_se) << ',' << format_double(a.tlu_mean) << ','
          << format_double(a.tlu_se) << ',' << format_double(res.gain()) << '\n';
    };
    row("retweet", res.retweet);
    row("baseline", res.baseline);
  }
  return csv.str();
}

std::vector<PointResult> run_sweep(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  const std::vector<SweepPoint> points = expand_sweep(cfg.sweep);
  const std::uint32_t R = cfg.replicates;

  std::vector<PointResult> results(points.size());
  NetworkCache cache;
  struct Task {
    std::size_t point;
    std::uint32_t rep;
    std::size_t net;
  };
  std::vector<Task> tasks;
  tasks.reserve(points.size() * R);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    results[pi].point = points[pi];
    results[pi].graph = graph_at(cfg, points[pi]);
    results[pi].sim = sim_at(cfg, points[pi]);
    results[pi].replicates.resize(R);
    for (std::uint32_t r = 0; r < R; ++r) {
      tasks.push_back(Task{pi, r, cache.request(cfg, results[pi].graph, r)});
    }
  }

  const std::uint32_t threads = effective_parallelism(cfg.parallelism);
  cache.build_all(threads);
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    results[t.point].replicates[t.rep] =
        run_replicate(cfg, points[t.point], t.rep, cache.nets[t.net], nullptr);
  });
  for (PointResult& res : results) {
    res.retweet = aggregate_arm(res.replicates, true);
    res.baseline = aggregate_arm(res.replicates, false);
  }

  write_text_file(file_path(cfg.output_dir, "sweep.csv"), sweep_csv_text(cfg, results));
  return results;
}

AnalyzeResult run_analyze(const AnalyzeOptions& opts) {
  std::filesystem::create_directories(opts.output_dir);
  SimLog log = read_run_files(opts.publications, opts.impressions ? &*opts.impressions : nullptr);

  AnalyzeResult result;
  const std::vector<CascadeTree> cascades = build_cascades(log, opts.include_singletons);
  result.cascades = cascades.size();

  auto emit = [&](const std::string& name, const auto& writer) {
    const std::string path = file_path(opts.output_dir, name);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw invalid_parameter_error("cannot open for writing: " + path);
    writer(os);
    result.files_written.push_back(path);
  };

  result.buckets = bucket_table(cascades, log, opts.include_singletons);
  emit("cascade_buckets.csv",
       [&](std::ostream& os) { write_bucket_csv(result.buckets, "", os); });

  if (opts.impressions) {
    result.hops = hop_count_table(log);
    emit("hop_table.csv", [&](std::ostream& os) { write_hop_csv(*result.hops, "", os); });
    if (opts.network) {
      const Network net = read_network_file(*opts.network);
      result.distance = distance_table(log, net);
      emit("distance_table.csv",
           [&](std::ostream& os) { write_distance_csv(*result.distance, "", os); });
    }
  }
  if (opts.engagement) {
    const std::vector<EngagementRecord> engagement = read_engagement_file(*opts.engagement);
    result.consistency = consistency_summary(engagement, cascades, log, opts.low, opts.high,
                                             opts.min_days, opts.total_days);
    emit("consistency.csv",
         [&](std::ostream& os) { write_consistency_csv(*result.consistency, "", os); });
  }
  return result;
}

}  // namespace casim
