#include "casim/dynamics.hpp"

#include <algorithm>

#include "casim/error.hpp"

namespace casim {

std::string to_string(QualityDist d) {
  return d == QualityDist::Uniform01 ? "uniform" : "exponential";
}

QualityDist quality_dist_from_string(const std::string& s) {
  if (s == "uniform" || s == "Uniform01" || s == "u") return QualityDist::Uniform01;
  if (s == "exponential" || s == "Exponential" || s == "exp") return QualityDist::Exponential;
  throw invalid_parameter_error("unknown quality distribution: " + s);
}

std::string to_string(SelectionMode m) {
  return m == SelectionMode::HardFilter ? "hard_filter" : "delta_discount";
}

SelectionMode selection_mode_from_string(const std::string& s) {
  if (s == "hard_filter" || s == "HardFilter") return SelectionMode::HardFilter;
  if (s == "delta_discount" || s == "DeltaDiscount") return SelectionMode::DeltaDiscount;
  throw invalid_parameter_error("unknown selection mode: " + s);
}

void validate_params(const SimParams& p) {
  if (p.dist == QualityDist::Exponential && !(p.lambda > 0.0)) {
    throw invalid_parameter_error("exponential rate lambda must be > 0");
  }
  if (p.delta < 0.0 || p.delta > 1.0) throw invalid_parameter_error("delta must be in [0, 1]");
  if (p.p && (*p.p < 0.0 || *p.p > 1.0)) throw invalid_parameter_error("p must be in [0, 1]");
  if (p.epochs < 1) throw invalid_parameter_error("epochs must be >= 1");
  if (!(p.view_probability > 0.0) || p.view_probability > 1.0) {
    throw invalid_parameter_error("view_probability must be in (0, 1]");
  }
}

double draw_quality(QualityDist dist, double lambda, Rng& rng) {
  if (dist == QualityDist::Uniform01) return uniform01(rng);
  return exponential(rng, lambda);
}

double perceived_quality(const Tweet& t, const InterestSet& viewer_interests, double delta) {
  return viewer_interests.contains(t.topic) ? t.quality : t.quality * delta;
}

namespace {

struct Best {
  double score = -1.0;
  std::uint64_t tweet_id = ~std::uint64_t{0};
  std::int64_t where = -1;  // timeline index, -1 = none / own

  void offer(double s, std::uint64_t id, std::int64_t idx) {
    if (s > score || (s == score && id < tweet_id)) {
      score = s;
      tweet_id = id;
      where = idx;
    }
  }
};

}  // namespace

std::optional<std::uint64_t> select_publication(const InterestSet& interests, const Tweet& own,
                                                const std::vector<TimelineEntry>& timeline,
                                                const SimParams& params, Rng& rng) {
  const bool discount = params.selection == SelectionMode::DeltaDiscount;
  auto scored = [&](const Tweet& t, double& out) {
    const bool on_topic = interests.contains(t.topic);
    if (!discount && !on_topic) return false;
    out = on_topic ? t.quality : t.quality * params.delta;
    return true;
  };

  if (!params.p) {
    Best best;
    best.offer(own.quality, own.id, -1);
    for (std::size_t i = 0; i < timeline.size(); ++i) {
      double s;
      if (scored(*timeline[i].tweet, s)) best.offer(s, timeline[i].tweet->id, i);
    }
    if (best.where < 0) return std::nullopt;
    return timeline[best.where].publication;
  }

  if (bernoulli(rng, *params.p)) return std::nullopt;
  const bool near_first = bernoulli(rng, *params.p);
  Best near, far;
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    double s;
    if (!scored(*timeline[i].tweet, s)) continue;
    (timeline[i].author_is_followee ? near : far).offer(s, timeline[i].tweet->id, i);
  }
  const Best& first = near_first ? near : far;
  const Best& second = near_first ? far : near;
  if (first.where >= 0) return timeline[first.where].publication;
  if (second.where >= 0) return timeline[second.where].publication;
  return std::nullopt;
}

namespace {

SimLog run_impl(const Network& net, const SimParams& params, bool forced_own) {
  validate_params(params);
  const std::size_t n = net.nodes.size();
  if (n == 0) throw invalid_parameter_error("empty network");

  Rng rng(params.seed);
  SimLog log;
  log.tweets.reserve(n * static_cast<std::size_t>(params.epochs));
  log.publications.reserve(n * static_cast<std::size_t>(params.epochs));

  std::vector<std::int64_t> prev(n, -1), cur(n, -1);
  std::vector<TimelineEntry> timeline;
  const bool sample_views = params.view_probability < 1.0;

  for (std::int32_t e = 0; e < params.epochs; ++e) {
    for (UserId u = 0; u < n; ++u) {
      const UserNode& node = net.nodes[u];

      const TopicId topic =
          node.interests.topics[uniform_below(rng, node.interests.topics.size())];
      const double q = draw_quality(params.dist, params.lambda, rng);
      const auto own_idx = static_cast<std::uint32_t>(log.tweets.size());
      log.tweets.push_back(Tweet{own_idx, u, topic, q, e});

      timeline.clear();
      if (e > 0) {
        for (UserId f : node.followees) {
          if (sample_views && !bernoulli(rng, params.view_probability)) continue;
          const auto pi = static_cast<std::uint64_t>(prev[f]);
          log.impressions.push_back(Impression{u, pi, e});
          const Publication& pub = log.publications[pi];
          const Tweet& t = log.tweets[pub.tweet];
          timeline.push_back(TimelineEntry{pi, &t, pub.hop, net.follows(u, t.root_author)});
        }
      }

      std::optional<std::uint64_t> pick;
      if (!forced_own) {
        pick = select_publication(node.interests, log.tweets[own_idx], timeline, params, rng);
      }
      cur[u] = static_cast<std::int64_t>(log.publications.size());
      if (pick) {
        const Publication& parent = log.publications[*pick];
        log.publications.push_back(Publication{u, parent.tweet, e,
                                               static_cast<std::int64_t>(*pick), parent.hop + 1});
      } else {
        log.publications.push_back(Publication{u, own_idx, e, -1, 0});
      }
    }
    std::swap(prev, cur);
  }
  return log;
}

}  // namespace

SimLog run_simulation(const Network& net, const SimParams& params) {
  return run_impl(net, params, false);
}

SimLog run_baseline(const Network& net, const SimParams& params) {
  return run_impl(net, params, true);
}

}  // namespace casim
