#include "casim/cascade.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "casim/error.hpp"

namespace casim {

std::vector<CascadeTree> build_cascades(const SimLog& log, bool include_singletons) {
  std::unordered_map<std::uint32_t, std::size_t> tree_of_tweet;
  std::vector<CascadeTree> trees;
  std::vector<char> has_adopters;

  auto tree_for = [&](const Publication& pub) -> CascadeTree& {
    auto [it, inserted] = tree_of_tweet.emplace(pub.tweet, trees.size());
    if (inserted) {
      const Tweet& t = log.tweets[pub.tweet];
      trees.push_back(CascadeTree{pub.tweet, t.id, t.root_author, {}});
      has_adopters.push_back(0);
    }
    return trees[it->second];
  };

  std::unordered_set<std::uint64_t> seen;  // (tweet, user) first-adoption dedup
  for (std::size_t i = 0; i < log.publications.size(); ++i) {
    const Publication& pub = log.publications[i];
    if (pub.hop == 0) {
      if (pub.parent != -1 || log.tweets[pub.tweet].root_author != pub.publisher) {
        throw malformed_log_error("original publication with inconsistent provenance", i + 1);
      }
      tree_for(pub);
      continue;
    }
    if (pub.parent < 0 || pub.parent >= static_cast<std::int64_t>(log.publications.size())) {
      throw malformed_log_error("dangling parent reference in publication record", i + 1);
    }
    const Publication& parent = log.publications[pub.parent];
    if (parent.tweet != pub.tweet || parent.epoch != pub.epoch - 1 ||
        pub.hop != parent.hop + 1) {
      throw malformed_log_error("parent reference inconsistent with retweet record", i + 1);
    }
    CascadeTree& tree = tree_for(pub);
    if (pub.publisher == tree.root_author) continue;  // self-retweets are not adoptions
    has_adopters[tree_of_tweet[pub.tweet]] = 1;
    const std::uint64_t key = (static_cast<std::uint64_t>(pub.tweet) << 32) | pub.publisher;
    if (!seen.insert(key).second) continue;  // keep first adoption only
    tree.adopters.push_back(Adoption{pub.publisher, pub.epoch, parent.publisher});
  }

  std::vector<CascadeTree> out;
  out.reserve(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (has_adopters[i] || include_singletons) out.push_back(std::move(trees[i]));
  }
  return out;
}

std::uint32_t log2_bucket(std::uint64_t size) {
  if (size < 1) throw invalid_parameter_error("log2_bucket needs size >= 1");
  std::uint32_t b = 0;
  while (size >>= 1) ++b;
  return b;
}

std::vector<BucketRow> bucket_table(const std::vector<CascadeTree>& cascades, const SimLog& log,
                                    bool include_singletons) {
  std::unordered_map<std::uint32_t, std::uint64_t> imp_by_tweet;
  std::unordered_set<std::uint32_t> cascade_tweets;
  for (const CascadeTree& c : cascades) cascade_tweets.insert(c.tweet);
  for (const Impression& imp : log.impressions) {
    const std::uint32_t t = log.publications[imp.publication].tweet;
    if (cascade_tweets.count(t)) ++imp_by_tweet[t];
  }

  std::map<std::uint32_t, BucketRow> rows;
  std::uint64_t total_cascades = 0, total_impressions = 0;
  for (const CascadeTree& c : cascades) {
    const std::uint64_t size = c.size() + (include_singletons ? 1 : 0);
    BucketRow& row = rows[log2_bucket(size)];
    row.cascade_count += 1;
    row.tweet_instances += 1 + c.size();
    const auto it = imp_by_tweet.find(c.tweet);
    const std::uint64_t imps = it == imp_by_tweet.end() ? 0 : it->second;
    row.impressions += imps;
    total_cascades += 1;
    total_impressions += imps;
  }

  std::vector<BucketRow> out;
  out.reserve(rows.size());
  for (auto& [bucket, row] : rows) {
    row.bucket = bucket;
    row.share_frequency = static_cast<double>(row.cascade_count) / total_cascades;
    row.share_impressions =
        total_impressions == 0 ? 0.0
                               : static_cast<double>(row.impressions) / total_impressions;
    row.growth_ratio = static_cast<double>(row.impressions) / row.tweet_instances;
    out.push_back(row);
  }
  return out;
}

std::vector<BucketRow> impressions_paradox_table(const std::vector<CascadeTree>& cascades,
                                                 const SimLog& log, bool include_singletons) {
  return bucket_table(cascades, log, include_singletons);
}

std::vector<BucketRow> growth_ratio_table(const std::vector<CascadeTree>& cascades,
                                          const SimLog& log, bool include_singletons) {
  return bucket_table(cascades, log, include_singletons);
}

// ---------------------------------------------------------------------------
// Distance and hop tables
// ---------------------------------------------------------------------------

std::map<std::uint32_t, double> DistanceTable::shares() const {
  std::map<std::uint32_t, double> s;
  for (const auto& [d, c] : by_distance) s[d] = static_cast<double>(c) / total;
  return s;
}

std::map<std::uint32_t, double> HopTable::shares() const {
  std::map<std::uint32_t, double> s;
  for (const auto& [h, c] : by_hop) s[h] = static_cast<double>(c) / total;
  return s;
}

DistanceTable distance_table(const SimLog& log, const Network& net) {
  const std::size_t n = net.nodes.size();
  // viewer -> multiset of needed root authors
  std::unordered_map<UserId, std::unordered_map<UserId, std::uint64_t>> wanted;
  for (const Impression& imp : log.impressions) {
    const UserId author = log.tweet_of(imp).root_author;
    if (imp.viewer >= n || author >= n) {
      throw malformed_log_error("impression references a user outside the network");
    }
    ++wanted[imp.viewer][author];
  }

  DistanceTable table;
  std::vector<std::uint32_t> dist(n);
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t version = 0;
  std::deque<UserId> queue;

  for (auto& [viewer, targets] : wanted) {
    ++version;
    std::size_t unresolved = targets.size();
    dist[viewer] = 0;
    stamp[viewer] = version;
    queue.clear();
    queue.push_back(viewer);
    auto resolve = [&](UserId node, std::uint32_t d) {
      const auto it = targets.find(node);
      if (it == targets.end()) return;
      table.by_distance[d] += it->second;
      table.total += it->second;
      --unresolved;
    };
    resolve(viewer, 0);
    while (!queue.empty() && unresolved > 0) {
      const UserId u = queue.front();
      queue.pop_front();
      for (UserId v : net.nodes[u].followees) {
        if (stamp[v] == version) continue;
        stamp[v] = version;
        dist[v] = dist[u] + 1;
        resolve(v, dist[v]);
        queue.push_back(v);
      }
    }
    if (unresolved > 0) {
      for (const auto& [node, cnt] : targets) {
        if (stamp[node] != version) {
          table.unreachable += cnt;
          table.total += cnt;
        }
      }
    }
  }
  return table;
}

HopTable hop_count_table(const SimLog& log) {
  HopTable table;
  for (const Impression& imp : log.impressions) {
    ++table.by_hop[log.publications[imp.publication].hop + 1];
    ++table.total;
  }
  return table;
}

}  // namespace casim
