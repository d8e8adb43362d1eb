#pragma once

#include <span>
#include <utility>
#include <vector>

#include "casim/dynamics.hpp"

namespace casim {

// ---------------------------------------------------------------------------
// Timeline definitions
// ---------------------------------------------------------------------------

// Fraction of timeline tweets whose topic the user is interested in.
double precision(std::span<const Tweet> timeline, const InterestSet& interests);

// Mean intrinsic quality of the timeline.
double timeline_quality(std::span<const Tweet> timeline);

// (sum, mean) of g(t,u) * q_t with g = 1 on-topic and g = delta off-topic.
std::pair<double, double> timeline_utility(std::span<const Tweet> timeline,
                                           const InterestSet& interests, double delta);

// ---------------------------------------------------------------------------
// Closed-form oracles
// ---------------------------------------------------------------------------

double harmonic_number(std::uint64_t k);

// E[max of k i.i.d. Uniform(0,1)] = k / (k + 1)
double expected_max_uniform(std::uint64_t k);

// E[max of k i.i.d. Exponential(lambda)] = H_k / lambda
double expected_max_exponential(std::uint64_t k, double lambda);

// Multiplicative quality increase E[max of k] / E[single draw]:
// 2k/(k+1) for Uniform(0,1), H_k for Exponential (rate cancels).
double quality_gain(QualityDist dist, std::uint64_t k);

// 2 * P[Binomial(days, 1/2) >= threshold_days], clamped to <= 1: the share of
// users a coin-flipping null model would classify as consistent.
double baseline_consistency_probability(std::uint32_t days, std::uint32_t threshold_days);

// ---------------------------------------------------------------------------
// Log-level reporting
// ---------------------------------------------------------------------------

struct MetricsRow {
  std::int32_t epoch = 0;  // -1 in the aggregate row
  std::uint64_t viewers = 0;
  std::uint64_t impressions = 0;
  double precision = 0.0;
  double quality_mean = 0.0;
  double tlu_sum = 0.0;
  double tlu_mean = 0.0;
};

struct MetricsReport {
  std::vector<MetricsRow> per_epoch;  // epochs with at least one counted impression
  MetricsRow aggregate;               // over epochs >= warmup
};

// Per-epoch and post-warm-up precision / quality / TLU over the impressions of
// the given viewer set. Epochs without counted impressions are skipped.
MetricsReport report_metrics(const SimLog& log, const Network& net, double delta,
                             std::int32_t warmup, const std::vector<UserId>& viewers);

// Tree kinds: the root. KNN: a seeded sample of up to sample_size nodes.
std::vector<UserId> default_viewer_set(const Network& net, std::uint32_t sample_size,
                                       std::uint64_t seed);

}  // namespace casim
