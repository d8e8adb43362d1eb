#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "casim/network.hpp"

namespace casim {

enum class QualityDist { Uniform01, Exponential };
enum class SelectionMode { HardFilter, DeltaDiscount };

std::string to_string(QualityDist d);
QualityDist quality_dist_from_string(const std::string& s);
std::string to_string(SelectionMode m);
SelectionMode selection_mode_from_string(const std::string& s);

// Immutable root content. `id` equals the index in SimLog::tweets for logs
// produced by the engine.
struct Tweet {
  std::uint64_t id = 0;
  UserId root_author = 0;
  TopicId topic = 0;
  double quality = 0.0;
  std::int32_t origin_epoch = 0;
};

// One publishing event. parent == -1 iff hop == 0 iff the publisher authored
// the tweet; otherwise parent indexes the previous-epoch publication the tweet
// was selected from and hop = parent.hop + 1.
struct Publication {
  UserId publisher = 0;
  std::uint32_t tweet = 0;  // index into SimLog::tweets
  std::int32_t epoch = 0;
  std::int64_t parent = -1;  // index into SimLog::publications
  std::uint32_t hop = 0;
};

// One timeline exposure: `viewer` saw `publication` (made in epoch-1).
struct Impression {
  UserId viewer = 0;
  std::uint64_t publication = 0;  // index into SimLog::publications
  std::int32_t epoch = 0;
};

struct SimParams {
  QualityDist dist = QualityDist::Uniform01;
  double lambda = 1.0;  // Exponential rate
  SelectionMode selection = SelectionMode::HardFilter;
  double delta = 1.0;        // off-topic perception / utility factor
  std::optional<double> p;   // self-interest factor; empty = always-select model
  std::int32_t epochs = 1;
  std::uint64_t seed = 0;
  double view_probability = 1.0;
};

void validate_params(const SimParams& p);

struct SimLog {
  std::vector<Tweet> tweets;  // every candidate drawn, published or not
  std::vector<Publication> publications;
  std::vector<Impression> impressions;

  const Tweet& tweet_of(const Publication& p) const { return tweets[p.tweet]; }
  const Tweet& tweet_of(const Impression& i) const {
    return tweets[publications[i.publication].tweet];
  }
};

double draw_quality(QualityDist dist, double lambda, Rng& rng);

// q for on-topic tweets, q * delta otherwise.
double perceived_quality(const Tweet& t, const InterestSet& viewer_interests, double delta);

struct TimelineEntry {
  std::uint64_t publication = 0;  // index into the log
  const Tweet* tweet = nullptr;
  std::uint32_t hop = 0;
  bool author_is_followee = false;  // root author is a direct followee of the viewer
};

// One selection step. Returns the index of the chosen timeline publication,
// or nullopt to publish the own candidate. HardFilter restricts the pool to
// on-topic tweets scored by raw quality; DeltaDiscount admits everything
// scored by perceived quality. Ties go to the earliest tweet id. With the
// self-interest factor p set: own with probability p, otherwise the best of
// the followee-authored pool with probability p (else the best of the
// remainder), falling back to the other pool and finally the own candidate.
std::optional<std::uint64_t> select_publication(const InterestSet& interests, const Tweet& own,
                                                const std::vector<TimelineEntry>& timeline,
                                                const SimParams& params, Rng& rng);

// Epoch loop: every user drafts one candidate, views followee publications
// from the previous epoch (each an Impression with view_probability), and
// publishes exactly one Publication. Deterministic in (network, params).
SimLog run_simulation(const Network& net, const SimParams& params);

// Identical loop with selection forced to the own candidate.
SimLog run_baseline(const Network& net, const SimParams& params);

}  // namespace casim
