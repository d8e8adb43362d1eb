#include "casim/network.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "casim/error.hpp"

namespace casim {

std::string to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::Tree: return "Tree";
    case NetworkKind::TreeContracted: return "TreeContracted";
    case NetworkKind::KNN: return "KNN";
  }
  return "?";
}

NetworkKind network_kind_from_string(const std::string& s) {
  if (s == "Tree" || s == "tree") return NetworkKind::Tree;
  if (s == "TreeContracted" || s == "tree_contracted") return NetworkKind::TreeContracted;
  if (s == "KNN" || s == "knn") return NetworkKind::KNN;
  throw invalid_parameter_error("unknown network kind: " + s);
}

std::size_t Network::edge_count() const {
  std::size_t total = 0;
  for (const UserNode& n : nodes) total += n.followees.size();
  return total;
}

bool Network::follows(UserId u, UserId v) const {
  const auto& f = nodes[u].followees;
  return std::binary_search(f.begin(), f.end(), v);
}

// ---------------------------------------------------------------------------
// Tree models
// ---------------------------------------------------------------------------

static void validate_tree_params(std::uint32_t k, std::uint32_t kprime, std::uint32_t d,
                                 std::uint32_t D, double alpha) {
  if (k < 1 || kprime < 1) throw invalid_parameter_error("tree fan-outs k, k' must be >= 1");
  if (d < 1 || d > D) throw invalid_parameter_error("need 1 <= d <= D");
  if (alpha <= 0.0 || alpha > 1.0) throw invalid_parameter_error("alpha must be in (0, 1]");
  if (d - min_overlap(alpha, d) > D - d) {
    throw invalid_parameter_error("homophilous draw infeasible for (alpha, d, D)");
  }
}

Network build_tree(std::uint32_t k, std::uint32_t kprime, std::uint32_t d, std::uint32_t D,
                   double alpha, std::uint64_t seed) {
  validate_tree_params(k, kprime, d, D, alpha);
  const TopicUniverse universe{D};
  Rng rng(seed);

  Network net;
  net.kind = NetworkKind::Tree;
  net.params = GraphParams{NetworkKind::Tree, 1 + k + k * kprime, k, kprime, d, D, alpha, seed};
  net.root_id = 0;
  net.nodes.resize(1 + k + static_cast<std::size_t>(k) * kprime);

  UserNode& root = net.nodes[0];
  root.id = 0;
  root.interests = sample_interest_set(universe, d, rng);
  for (UserId b = 1; b <= k; ++b) {
    net.nodes[b].id = b;
    net.nodes[b].interests = sample_homophilous_neighbor(root.interests, alpha, universe, rng);
    root.followees.push_back(b);
  }
  UserId next = k + 1;
  for (UserId b = 1; b <= k; ++b) {
    for (std::uint32_t j = 0; j < kprime; ++j, ++next) {
      net.nodes[next].id = next;
      net.nodes[next].interests =
          sample_homophilous_neighbor(net.nodes[b].interests, alpha, universe, rng);
      net.nodes[b].followees.push_back(next);
    }
  }
  return net;
}

Network build_tree_contracted(std::uint32_t k, std::uint32_t kprime, std::uint32_t d,
                              std::uint32_t D, double alpha, std::uint64_t seed) {
  Network tree = build_tree(k, kprime, d, D, alpha, seed);

  // Group ids within one layer by interest set, in first-occurrence order.
  auto group_layer = [&](UserId lo, UserId hi, UserId base_new_id,
                         std::vector<UserId>& new_id_of) {
    std::map<std::vector<TopicId>, UserId> groups;
    std::vector<UserId> representatives;
    for (UserId u = lo; u < hi; ++u) {
      auto [it, inserted] =
          groups.emplace(tree.nodes[u].interests.topics, base_new_id + representatives.size());
      if (inserted) representatives.push_back(u);
      new_id_of[u] = it->second;
    }
    return representatives;
  };

  const UserId b_lo = 1, b_hi = 1 + k;
  const UserId c_lo = b_hi, c_hi = static_cast<UserId>(tree.nodes.size());
  std::vector<UserId> new_id_of(tree.nodes.size(), 0);
  const std::vector<UserId> b_reps = group_layer(b_lo, b_hi, 1, new_id_of);
  const std::vector<UserId> c_reps =
      group_layer(c_lo, c_hi, 1 + static_cast<UserId>(b_reps.size()), new_id_of);

  Network out;
  out.kind = NetworkKind::TreeContracted;
  out.params = tree.params;
  out.params.kind = NetworkKind::TreeContracted;
  out.params.N = static_cast<std::uint32_t>(1 + b_reps.size() + c_reps.size());
  out.root_id = 0;
  out.nodes.resize(1 + b_reps.size() + c_reps.size());

  auto dedup = [](std::vector<UserId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };

  out.nodes[0].id = 0;
  out.nodes[0].interests = tree.nodes[0].interests;
  for (UserId b : tree.nodes[0].followees) out.nodes[0].followees.push_back(new_id_of[b]);
  dedup(out.nodes[0].followees);

  for (std::size_t g = 0; g < b_reps.size(); ++g) {
    UserNode& node = out.nodes[1 + g];
    node.id = static_cast<UserId>(1 + g);
    node.interests = tree.nodes[b_reps[g]].interests;
    for (UserId u = b_lo; u < b_hi; ++u) {
      if (new_id_of[u] != node.id) continue;
      for (UserId c : tree.nodes[u].followees) node.followees.push_back(new_id_of[c]);
    }
    dedup(node.followees);
  }
  for (std::size_t g = 0; g < c_reps.size(); ++g) {
    UserNode& node = out.nodes[1 + b_reps.size() + g];
    node.id = static_cast<UserId>(1 + b_reps.size() + g);
    node.interests = tree.nodes[c_reps[g]].interests;
  }
  return out;
}

// ---------------------------------------------------------------------------
// k-NN model
// ---------------------------------------------------------------------------

std::vector<std::vector<UserId>> knn_edges(const std::vector<InterestSet>& interests,
                                           std::uint32_t k, std::uint64_t seed) {
  const std::size_t n = interests.size();
  if (n < 2) throw invalid_parameter_error("k-NN needs at least 2 nodes");
  if (k < 1 || k >= n) throw invalid_parameter_error("k-NN needs 1 <= k < N");

  TopicId max_topic = 0;
  for (const InterestSet& s : interests) {
    for (TopicId t : s.topics) max_topic = std::max(max_topic, t);
  }
  std::vector<std::vector<UserId>> by_topic(max_topic + 1);
  for (std::size_t u = 0; u < n; ++u) {
    for (TopicId t : interests[u].topics) by_topic[t].push_back(static_cast<UserId>(u));
  }

  struct Candidate {
    UserId v;
    std::uint32_t overlap;
    std::uint64_t priority;
  };

  std::vector<std::vector<UserId>> edges(n);
  std::vector<std::uint32_t> count(n, 0);
  std::vector<UserId> touched;
  std::vector<Candidate> cands;
  for (std::size_t u = 0; u < n; ++u) {
    touched.clear();
    for (TopicId t : interests[u].topics) {
      for (UserId v : by_topic[t]) {
        if (v == u) continue;
        if (count[v]++ == 0) touched.push_back(v);
      }
    }
    // Random tie priorities, deterministic in (seed, u, v).
    const std::uint64_t salt = splitmix64(seed ^ splitmix64(u + 1));
    cands.clear();
    cands.reserve(touched.size());
    for (UserId v : touched) cands.push_back({v, count[v], splitmix64(salt ^ v)});
    auto prefer = [](const Candidate& a, const Candidate& b) {
      if (a.overlap != b.overlap) return a.overlap > b.overlap;
      if (a.priority != b.priority) return a.priority < b.priority;
      return a.v < b.v;
    };
    std::vector<UserId>& out = edges[u];
    if (cands.size() > k) {
      std::nth_element(cands.begin(), cands.begin() + (k - 1), cands.end(), prefer);
      cands.resize(k);
    }
    for (const Candidate& c : cands) out.push_back(c.v);
    if (out.size() < k) {
      // Fewer than k nodes share a topic: fill uniformly from the rest.
      std::vector<UserId> pool;
      pool.reserve(n - 1 - out.size());
      for (std::size_t w = 0; w < n; ++w) {
        if (w != u && count[w] == 0) pool.push_back(static_cast<UserId>(w));
      }
      Rng fill_rng(salt);
      for (std::size_t i = 0; out.size() < k; ++i) {
        const std::size_t j = i + uniform_below(fill_rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
      }
    }
    std::sort(out.begin(), out.end());
    for (UserId v : touched) count[v] = 0;
  }
  return edges;
}

Network build_knn(std::uint32_t N, std::uint32_t k, std::uint32_t d, std::uint32_t D,
                  std::uint64_t seed) {
  if (N < 2) throw invalid_parameter_error("k-NN needs N >= 2");
  if (k < 1 || k >= N) throw invalid_parameter_error("k-NN needs 1 <= k < N");
  if (d < 1 || d > D) throw invalid_parameter_error("need 1 <= d <= D");

  const TopicUniverse universe{D};
  Rng rng(seed);
  std::vector<InterestSet> interests;
  interests.reserve(N);
  for (std::uint32_t u = 0; u < N; ++u) interests.push_back(sample_interest_set(universe, d, rng));

  Network net;
  net.kind = NetworkKind::KNN;
  net.params = GraphParams{NetworkKind::KNN, N, k, 0, d, D, 0.0, seed};
  net.root_id = std::nullopt;

  auto edges = knn_edges(interests, k, derive_seed(seed, "knn-edges"));
  net.nodes.resize(N);
  for (std::uint32_t u = 0; u < N; ++u) {
    net.nodes[u].id = u;
    net.nodes[u].interests = std::move(interests[u]);
    net.nodes[u].followees = std::move(edges[u]);
  }
  return net;
}

Network build_network(const GraphParams& p) {
  switch (p.kind) {
    case NetworkKind::Tree: return build_tree(p.k, p.kprime, p.d, p.D, p.alpha, p.seed);
    case NetworkKind::TreeContracted:
      return build_tree_contracted(p.k, p.kprime, p.d, p.D, p.alpha, p.seed);
    case NetworkKind::KNN: return build_knn(p.N, p.k, p.d, p.D, p.seed);
  }
  throw invalid_parameter_error("unknown network kind");
}

// ---------------------------------------------------------------------------
// Invariant checks
// ---------------------------------------------------------------------------

std::optional<std::string> check_network(const Network& net) {
  const std::size_t n = net.nodes.size();
  for (std::size_t u = 0; u < n; ++u) {
    const UserNode& node = net.nodes[u];
    if (node.id != u) return "node id out of order at index " + std::to_string(u);
    if (node.interests.topics.empty()) return "node " + std::to_string(u) + " has no interests";
    if (!std::is_sorted(node.interests.topics.begin(), node.interests.topics.end())) {
      return "unsorted interests on node " + std::to_string(u);
    }
    UserId prev = 0;
    bool first = true;
    for (UserId v : node.followees) {
      if (v >= n) return "followee out of range on node " + std::to_string(u);
      if (v == u) return "self-follow on node " + std::to_string(u);
      if (!first && v <= prev) return "followee list not strictly ascending on node " + std::to_string(u);
      prev = v;
      first = false;
    }
  }
  if (net.kind == NetworkKind::Tree || net.kind == NetworkKind::TreeContracted) {
    if (!net.root_id || *net.root_id != 0) return "tree kinds need root_id == 0";
    const std::uint32_t need = min_overlap(net.params.alpha, net.params.d);
    for (const UserNode& node : net.nodes) {
      for (UserId v : node.followees) {
        if (node.interests.overlap(net.nodes[v].interests) < need) {
          return "homophily violated on edge " + std::to_string(node.id) + " -> " +
                 std::to_string(v);
        }
      }
    }
    if (net.kind == NetworkKind::Tree) {
      const std::uint64_t expect =
          1 + net.params.k + static_cast<std::uint64_t>(net.params.k) * net.params.kprime;
      if (n != expect) return "tree node count mismatch";
      if (net.nodes[0].followees.size() != net.params.k) return "root out-degree != k";
      for (UserId b = 1; b <= net.params.k; ++b) {
        if (net.nodes[b].followees.size() != net.params.kprime) return "layer-B out-degree != k'";
      }
      for (std::size_t c = 1 + net.params.k; c < n; ++c) {
        if (!net.nodes[c].followees.empty()) return "leaf with followees";
      }
    }
  }
  if (net.kind == NetworkKind::KNN) {
    const std::size_t want = std::min<std::size_t>(net.params.k, n - 1);
    for (const UserNode& node : net.nodes) {
      if (node.followees.size() != want) {
        return "k-NN out-degree mismatch on node " + std::to_string(node.id);
      }
    }
  }
  return std::nullopt;
}

}  // namespace casim
