#include "casim/engagement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "casim/error.hpp"

namespace casim {

std::string to_string(EngagementKind k) {
  switch (k) {
    case EngagementKind::Like: return "like";
    case EngagementKind::Retweet: return "retweet";
    case EngagementKind::Click: return "click";
  }
  return "?";
}

EngagementKind engagement_kind_from_string(const std::string& s) {
  if (s == "like") return EngagementKind::Like;
  if (s == "retweet") return EngagementKind::Retweet;
  if (s == "click") return EngagementKind::Click;
  throw invalid_parameter_error("unknown engagement kind: " + s);
}

std::string to_string(ConsistencyClass c) {
  switch (c) {
    case ConsistencyClass::SmallLiker: return "SmallLiker";
    case ConsistencyClass::BigLiker: return "BigLiker";
    case ConsistencyClass::Indifferent: return "Indifferent";
  }
  return "?";
}

std::vector<EngagementRecord> synthetic_engagement(const SimLog& log, const Network* net,
                                                   const EngagementModel& model,
                                                   std::uint64_t seed) {
  if (model.on_topic_bonus != 0.0 && net == nullptr) {
    throw invalid_parameter_error("on_topic_bonus needs the network for viewer interests");
  }
  std::vector<EngagementRecord> out;
  Rng rng(seed);

  if (model.one_like_per_day) {
    // (viewer, day) -> impression indices, in deterministic key order.
    std::map<std::pair<UserId, std::int32_t>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < log.impressions.size(); ++i) {
      const Impression& imp = log.impressions[i];
      groups[{imp.viewer, imp.epoch}].push_back(i);
    }
    out.reserve(groups.size());
    for (const auto& [key, indices] : groups) {
      const Impression& pick = log.impressions[indices[uniform_below(rng, indices.size())]];
      out.push_back(EngagementRecord{key.first, log.tweet_of(pick).id, key.second,
                                     EngagementKind::Like});
    }
    return out;
  }

  for (const Impression& imp : log.impressions) {
    const Tweet& t = log.tweet_of(imp);
    double prob = model.base + model.quality_slope * t.quality;
    if (model.on_topic_bonus != 0.0 &&
        net->nodes[imp.viewer].interests.contains(t.topic)) {
      prob += model.on_topic_bonus;
    }
    prob = std::clamp(prob, 0.0, 1.0);
    if (prob > 0.0 && bernoulli(rng, prob)) {
      out.push_back(EngagementRecord{imp.viewer, t.id, imp.epoch, EngagementKind::Like});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-user per-day preference curves
// ---------------------------------------------------------------------------

namespace {

struct DayView {
  // Distinct cascades the user saw that day, as (size, tweet_id), plus the
  // per-impression size multiset for the i-curve.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> seen;  // sorted (size, tweet_id)
  std::vector<double> impression_sizes;
};

std::unordered_map<std::uint64_t, std::uint64_t> sizes_by_tweet_id(
    const std::vector<CascadeTree>& cascades) {
  std::unordered_map<std::uint64_t, std::uint64_t> m;
  m.reserve(cascades.size() * 2);
  for (const CascadeTree& c : cascades) m.emplace(c.tweet_id, c.size());
  return m;
}

DayView day_view(UserId user, std::int32_t day,
                 const std::unordered_map<std::uint64_t, std::uint64_t>& sizes,
                 const SimLog& log) {
  DayView view;
  std::unordered_set<std::uint64_t> distinct;
  for (const Impression& imp : log.impressions) {
    if (imp.viewer != user || imp.epoch != day) continue;
    const std::uint64_t tweet_id = log.tweet_of(imp).id;
    const auto it = sizes.find(tweet_id);
    if (it == sizes.end()) continue;  // not a cascade
    view.impression_sizes.push_back(static_cast<double>(it->second));
    if (distinct.insert(tweet_id).second) view.seen.emplace_back(it->second, tweet_id);
  }
  std::sort(view.seen.begin(), view.seen.end());
  return view;
}

double f_from_view(const DayView& view, UserId user, std::int32_t day, double x,
                   std::span<const EngagementRecord> engagement) {
  if (x < 0.0 || x > 1.0) throw invalid_parameter_error("x must be in [0, 1]");
  const std::size_t small_count = static_cast<std::size_t>(
      std::floor(x * static_cast<double>(view.seen.size()) + 1e-12));
  std::unordered_set<std::uint64_t> small;
  for (std::size_t i = 0; i < small_count && i < view.seen.size(); ++i) {
    small.insert(view.seen[i].second);
  }
  std::unordered_set<std::uint64_t> seen_ids;
  for (const auto& [size, id] : view.seen) seen_ids.insert(id);

  std::uint64_t likes = 0, small_likes = 0;
  for (const EngagementRecord& rec : engagement) {
    if (rec.user != user || rec.day != day || rec.kind != EngagementKind::Like) continue;
    if (!seen_ids.count(rec.tweet_id)) continue;
    ++likes;
    small_likes += small.count(rec.tweet_id);
  }
  if (likes == 0) {
    throw undefined_metric_error("no likes on cascades for this user-day");
  }
  return static_cast<double>(small_likes) / static_cast<double>(likes);
}

}  // namespace

double f_likes_fraction(UserId user, std::int32_t day, double x,
                        std::span<const EngagementRecord> engagement,
                        const std::vector<CascadeTree>& cascades, const SimLog& log) {
  const auto sizes = sizes_by_tweet_id(cascades);
  return f_from_view(day_view(user, day, sizes, log), user, day, x, engagement);
}

double StepCdf::operator()(double x) const {
  const auto it = std::lower_bound(sorted_values.begin(), sorted_values.end(), x);
  return static_cast<double>(it - sorted_values.begin()) /
         static_cast<double>(sorted_values.size());
}

std::pair<StepCdf, StepCdf> il_curves(UserId user, std::int32_t day,
                                      std::span<const EngagementRecord> engagement,
                                      const std::vector<CascadeTree>& cascades,
                                      const SimLog& log) {
  const auto sizes = sizes_by_tweet_id(cascades);
  DayView view = day_view(user, day, sizes, log);
  if (view.impression_sizes.empty()) {
    throw undefined_metric_error("no cascade impressions for this user-day");
  }
  StepCdf i_curve{std::move(view.impression_sizes)};
  std::sort(i_curve.sorted_values.begin(), i_curve.sorted_values.end());

  StepCdf l_curve;
  for (const EngagementRecord& rec : engagement) {
    if (rec.user != user || rec.day != day || rec.kind != EngagementKind::Like) continue;
    const auto it = sizes.find(rec.tweet_id);
    if (it != sizes.end()) l_curve.sorted_values.push_back(static_cast<double>(it->second));
  }
  if (l_curve.sorted_values.empty()) {
    throw undefined_metric_error("no likes on cascades for this user-day");
  }
  std::sort(l_curve.sorted_values.begin(), l_curve.sorted_values.end());
  return {std::move(i_curve), std::move(l_curve)};
}

ConsistencyClass classify_consistency(const std::vector<double>& daily_f, double low, double high,
                                      std::uint32_t min_days, std::uint32_t total_days) {
  if (daily_f.size() > total_days) {
    throw invalid_parameter_error("more f-values than days in the observation window");
  }
  std::uint32_t big = 0, small = 0;
  for (double f : daily_f) {
    if (f >= high) ++big;
    if (f <= low) ++small;
  }
  if (big >= min_days) return ConsistencyClass::BigLiker;
  if (small >= min_days) return ConsistencyClass::SmallLiker;
  return ConsistencyClass::Indifferent;
}

double ConsistencySummary::consistent_share() const {
  const std::uint64_t n = users();
  if (n == 0) return 0.0;
  return static_cast<double>(small_likers + big_likers) / static_cast<double>(n);
}

ConsistencySummary consistency_summary(std::span<const EngagementRecord> engagement,
                                       const std::vector<CascadeTree>& cascades,
                                       const SimLog& log, double low, double high,
                                       std::uint32_t min_days, std::uint32_t total_days) {
  const auto sizes = sizes_by_tweet_id(cascades);

  // One pass over each log: (user, day) -> cascades seen / cascade likes.
  using Key = std::pair<UserId, std::int32_t>;
  std::map<Key, std::vector<std::pair<std::uint64_t, std::uint64_t>>> seen;
  std::map<Key, std::vector<std::uint64_t>> likes;
  for (const Impression& imp : log.impressions) {
    const std::uint64_t tweet_id = log.tweet_of(imp).id;
    const auto it = sizes.find(tweet_id);
    if (it == sizes.end()) continue;
    seen[{imp.viewer, imp.epoch}].emplace_back(it->second, tweet_id);
  }
  for (const EngagementRecord& rec : engagement) {
    if (rec.kind != EngagementKind::Like || !sizes.count(rec.tweet_id)) continue;
    likes[{rec.user, rec.day}].push_back(rec.tweet_id);
  }

  std::map<UserId, std::vector<double>> daily_f;
  for (auto& [key, liked] : likes) {
    const auto seen_it = seen.find(key);
    if (seen_it == seen.end()) continue;
    auto& pairs = seen_it->second;
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    const std::size_t small_count = pairs.size() / 2;  // floor(0.5 * n)
    std::unordered_set<std::uint64_t> small, seen_ids;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      seen_ids.insert(pairs[i].second);
      if (i < small_count) small.insert(pairs[i].second);
    }
    std::uint64_t counted = 0, small_likes = 0;
    for (std::uint64_t id : liked) {
      if (!seen_ids.count(id)) continue;  // liked a cascade not seen that day
      ++counted;
      small_likes += small.count(id);
    }
    if (counted == 0) continue;
    daily_f[key.first].push_back(static_cast<double>(small_likes) /
                                 static_cast<double>(counted));
  }

  ConsistencySummary summary;
  for (const auto& [user, fs] : daily_f) {
    switch (classify_consistency(fs, low, high, min_days, total_days)) {
      case ConsistencyClass::SmallLiker: ++summary.small_likers; break;
      case ConsistencyClass::BigLiker: ++summary.big_likers; break;
      case ConsistencyClass::Indifferent: ++summary.indifferent; break;
    }
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw invalid_parameter_error("series lengths differ");
  const std::size_t n = xs.size();
  if (n < 2) throw invalid_parameter_error("correlation needs at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw undefined_metric_error("correlation undefined for a constant series");
  }
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> fractional_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // average of 1-based ranks
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw invalid_parameter_error("series lengths differ");
  const std::vector<double> rx = fractional_ranks(xs);
  const std::vector<double> ry = fractional_ranks(ys);
  return pearson_correlation(rx, ry);
}

}  // namespace casim
