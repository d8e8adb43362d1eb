#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "casim/cascade.hpp"

namespace casim {

enum class EngagementKind { Like, Retweet, Click };

std::string to_string(EngagementKind k);
EngagementKind engagement_kind_from_string(const std::string& s);

struct EngagementRecord {
  UserId user = 0;
  std::uint64_t tweet_id = 0;
  std::int32_t day = 0;  // simulated logs: day == epoch
  EngagementKind kind = EngagementKind::Like;
};

// Synthetic like generator over an impression log; exists to exercise the
// analytics end to end, not to model real behavior. Per impression:
//   P[like] = clamp01(base + on_topic_bonus * 1[on-topic] + quality_slope * q)
// With one_like_per_day set, instead each (viewer, day) with at least one
// impression gets exactly one like, uniform over that day's impressions
// (size-independent by construction; used by the consistency null model).
struct EngagementModel {
  double base = 0.0;
  double on_topic_bonus = 0.0;
  double quality_slope = 0.0;
  bool one_like_per_day = false;
};

// `net` may be null when on_topic_bonus == 0.
std::vector<EngagementRecord> synthetic_engagement(const SimLog& log, const Network* net,
                                                   const EngagementModel& model,
                                                   std::uint64_t seed);

// Fraction of user u's likes on day d that fall on the x-fraction smallest
// cascades u saw that day (sizes ascending, ties by tweet id, floor(x*n)
// items). Throws undefined_metric_error when u has no likes on cascades that
// day.
double f_likes_fraction(UserId user, std::int32_t day, double x,
                        std::span<const EngagementRecord> engagement,
                        const std::vector<CascadeTree>& cascades, const SimLog& log);

// Empirical CDF over cascade sizes; operator() returns the fraction of
// observations strictly below x.
struct StepCdf {
  std::vector<double> sorted_values;

  double operator()(double x) const;
};

// i(u,d,.) over the user's cascade impressions and l(u,d,.) over their likes.
std::pair<StepCdf, StepCdf> il_curves(UserId user, std::int32_t day,
                                      std::span<const EngagementRecord> engagement,
                                      const std::vector<CascadeTree>& cascades,
                                      const SimLog& log);

enum class ConsistencyClass { SmallLiker, BigLiker, Indifferent };

std::string to_string(ConsistencyClass c);

// daily_f holds f(u,d,0.5) for the days the user liked anything; days without
// likes are excluded from the tally.
ConsistencyClass classify_consistency(const std::vector<double>& daily_f, double low = 0.45,
                                      double high = 0.55, std::uint32_t min_days = 11,
                                      std::uint32_t total_days = 16);

struct ConsistencySummary {
  std::uint64_t small_likers = 0;
  std::uint64_t big_likers = 0;
  std::uint64_t indifferent = 0;

  std::uint64_t users() const { return small_likers + big_likers + indifferent; }
  double consistent_share() const;
};

// Classifies every user with at least one like-day.
ConsistencySummary consistency_summary(std::span<const EngagementRecord> engagement,
                                       const std::vector<CascadeTree>& cascades,
                                       const SimLog& log, double low = 0.45, double high = 0.55,
                                       std::uint32_t min_days = 11, std::uint32_t total_days = 16);

double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

// Pearson correlation of fractional ranks (ties get the average rank).
double spearman_correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace casim
