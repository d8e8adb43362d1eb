#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "casim/dynamics.hpp"

namespace casim {

struct Adoption {
  UserId user = 0;
  std::int32_t epoch = 0;
  UserId parent_user = 0;
};

// A root tweet with its retweeters, first adoption per user only, so each
// adopter's parent is the root author or an earlier adopter.
struct CascadeTree {
  std::uint32_t tweet = 0;  // index into SimLog::tweets
  std::uint64_t tweet_id = 0;
  UserId root_author = 0;
  std::vector<Adoption> adopters;

  std::size_t size() const { return adopters.size(); }
};

// One tree per root tweet with >= 1 retweet. include_singletons additionally
// emits never-retweeted published tweets as zero-adopter trees (the
// alternative size convention; see the bucket table).
std::vector<CascadeTree> build_cascades(const SimLog& log, bool include_singletons = false);

// floor(log2(size)); bucket b covers sizes [2^b, 2^(b+1)).
std::uint32_t log2_bucket(std::uint64_t size);

struct BucketRow {
  std::uint32_t bucket = 0;
  std::uint64_t cascade_count = 0;
  std::uint64_t tweet_instances = 0;  // originals + retweet publications
  std::uint64_t impressions = 0;
  double share_frequency = 0.0;
  double share_impressions = 0.0;
  double growth_ratio = 0.0;  // impressions / tweet_instances
};

// Bucketed cascade table. Default convention: size = number of retweeters.
// With include_singletons (must match build_cascades) every published tweet is
// a cascade and size counts the original publisher too.
std::vector<BucketRow> bucket_table(const std::vector<CascadeTree>& cascades, const SimLog& log,
                                    bool include_singletons = false);

// The two views of the same table: impression share vs frequency share decay
// (the Impressions Paradox) and impressions per tweet instance.
std::vector<BucketRow> impressions_paradox_table(const std::vector<CascadeTree>& cascades,
                                                 const SimLog& log,
                                                 bool include_singletons = false);
std::vector<BucketRow> growth_ratio_table(const std::vector<CascadeTree>& cascades,
                                          const SimLog& log, bool include_singletons = false);

// Impression counts by shortest directed-path distance from viewer to the
// tweet's root author; unreachable pairs land in `unreachable`.
struct DistanceTable {
  std::map<std::uint32_t, std::uint64_t> by_distance;
  std::uint64_t unreachable = 0;
  std::uint64_t total = 0;

  std::map<std::uint32_t, double> shares() const;
};

DistanceTable distance_table(const SimLog& log, const Network& net);

// Impression counts by hop count, where a direct original counts as hop 1
// (publication.hop + 1).
struct HopTable {
  std::map<std::uint32_t, std::uint64_t> by_hop;
  std::uint64_t total = 0;

  std::map<std::uint32_t, double> shares() const;
};

HopTable hop_count_table(const SimLog& log);

}  // namespace casim
