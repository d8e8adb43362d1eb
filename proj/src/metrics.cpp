#include "casim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "casim/error.hpp"

namespace casim {

double precision(std::span<const Tweet> timeline, const InterestSet& interests) {
  if (timeline.empty()) throw undefined_metric_error("precision of an empty timeline");
  std::size_t on = 0;
  for (const Tweet& t : timeline) on += interests.contains(t.topic);
  return static_cast<double>(on) / static_cast<double>(timeline.size());
}

double timeline_quality(std::span<const Tweet> timeline) {
  if (timeline.empty()) throw undefined_metric_error("quality of an empty timeline");
  double sum = 0.0;
  for (const Tweet& t : timeline) sum += t.quality;
  return sum / static_cast<double>(timeline.size());
}

std::pair<double, double> timeline_utility(std::span<const Tweet> timeline,
                                           const InterestSet& interests, double delta) {
  if (timeline.empty()) throw undefined_metric_error("utility of an empty timeline");
  if (delta < 0.0 || delta > 1.0) throw invalid_parameter_error("delta must be in [0, 1]");
  double sum = 0.0;
  for (const Tweet& t : timeline) sum += perceived_quality(t, interests, delta);
  return {sum, sum / static_cast<double>(timeline.size())};
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

double harmonic_number(std::uint64_t k) {
  if (k < 1) throw invalid_parameter_error("harmonic number needs k >= 1");
  double h = 0.0;
  for (std::uint64_t i = k; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

double expected_max_uniform(std::uint64_t k) {
  if (k < 1) throw invalid_parameter_error("expected_max_uniform needs k >= 1");
  return static_cast<double>(k) / static_cast<double>(k + 1);
}

double expected_max_exponential(std::uint64_t k, double lambda) {
  if (k < 1) throw invalid_parameter_error("expected_max_exponential needs k >= 1");
  if (!(lambda > 0.0)) throw invalid_parameter_error("lambda must be > 0");
  return harmonic_number(k) / lambda;
}

double quality_gain(QualityDist dist, std::uint64_t k) {
  if (k < 1) throw invalid_parameter_error("quality_gain needs k >= 1");
  if (dist == QualityDist::Uniform01) {
    return 2.0 * static_cast<double>(k) / static_cast<double>(k + 1);
  }
  return harmonic_number(k);
}

double baseline_consistency_probability(std::uint32_t days, std::uint32_t threshold_days) {
  if (days < 1) throw invalid_parameter_error("days must be >= 1");
  if (threshold_days > days) throw invalid_parameter_error("threshold_days must be <= days");
  double tail = 0.0;
  if (days <= 300) {
    // Exact dyadic recurrence: p_i = C(days, i) * 2^-days.
    double p = std::ldexp(1.0, -static_cast<int>(days));
    for (std::uint32_t i = 0; i <= days; ++i) {
      if (i >= threshold_days) tail += p;
      p *= static_cast<double>(days - i) / static_cast<double>(i + 1);
    }
  } else {
    const double lg_days = std::lgamma(static_cast<double>(days) + 1.0);
    for (std::uint32_t i = threshold_days; i <= days; ++i) {
      tail += std::exp(lg_days - std::lgamma(static_cast<double>(i) + 1.0) -
                       std::lgamma(static_cast<double>(days - i) + 1.0) -
                       static_cast<double>(days) * std::log(2.0));
    }
  }
  return std::min(1.0, 2.0 * tail);
}

// ---------------------------------------------------------------------------
// Log-level reporting
// ---------------------------------------------------------------------------

std::vector<UserId> default_viewer_set(const Network& net, std::uint32_t sample_size,
                                       std::uint64_t seed) {
  if (net.root_id) return {*net.root_id};
  const auto n = static_cast<std::uint32_t>(net.nodes.size());
  if (sample_size >= n) {
    std::vector<UserId> all(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  Rng rng(seed);
  return sample_index_subset(n, sample_size, rng);
}

namespace {

struct Accum {
  std::uint64_t count = 0;
  std::uint64_t on_topic = 0;
  double q_sum = 0.0;
  double tlu_sum = 0.0;
  std::unordered_set<UserId> viewers;

  MetricsRow row(std::int32_t epoch) const {
    MetricsRow r;
    r.epoch = epoch;
    r.viewers = viewers.size();
    r.impressions = count;
    r.precision = static_cast<double>(on_topic) / static_cast<double>(count);
    r.quality_mean = q_sum / static_cast<double>(count);
    r.tlu_sum = tlu_sum;
    r.tlu_mean = tlu_sum / static_cast<double>(count);
    return r;
  }
};

}  // namespace

MetricsReport report_metrics(const SimLog& log, const Network& net, double delta,
                             std::int32_t warmup, const std::vector<UserId>& viewers) {
  if (delta < 0.0 || delta > 1.0) throw invalid_parameter_error("delta must be in [0, 1]");
  if (viewers.empty()) throw invalid_parameter_error("viewer set must not be empty");
  std::vector<char> is_viewer(net.nodes.size(), 0);
  for (UserId v : viewers) {
    if (v >= net.nodes.size()) throw invalid_parameter_error("viewer id out of range");
    is_viewer[v] = 1;
  }

  std::map<std::int32_t, Accum> by_epoch;
  for (const Impression& imp : log.impressions) {
    if (!is_viewer[imp.viewer]) continue;
    const Tweet& t = log.tweet_of(imp);
    const bool on = net.nodes[imp.viewer].interests.contains(t.topic);
    Accum& a = by_epoch[imp.epoch];
    a.count += 1;
    a.on_topic += on;
    a.q_sum += t.quality;
    a.tlu_sum += on ? t.quality : t.quality * delta;
    a.viewers.insert(imp.viewer);
  }

  MetricsReport report;
  Accum total;
  for (const auto& [epoch, acc] : by_epoch) {
    report.per_epoch.push_back(acc.row(epoch));
    if (epoch >= warmup) {
      total.count += acc.count;
      total.on_topic += acc.on_topic;
      total.q_sum += acc.q_sum;
      total.tlu_sum += acc.tlu_sum;
      total.viewers.insert(acc.viewers.begin(), acc.viewers.end());
    }
  }
  if (total.count == 0) {
    throw undefined_metric_error("no impressions for the viewer set after warm-up");
  }
  report.aggregate = total.row(-1);
  return report;
}

}  // namespace casim
