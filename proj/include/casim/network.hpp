#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "casim/topics.hpp"

namespace casim {

using UserId = std::uint32_t;

enum class NetworkKind { Tree, TreeContracted, KNN };

std::string to_string(NetworkKind kind);
NetworkKind network_kind_from_string(const std::string& s);

struct GraphParams {
  NetworkKind kind = NetworkKind::Tree;
  std::uint32_t N = 0;       // population size (KNN); derived node count for trees
  std::uint32_t k = 0;       // root fan-out (trees) / neighbor count (KNN)
  std::uint32_t kprime = 0;  // per-b fan-out (trees)
  std::uint32_t d = 0;
  std::uint32_t D = 0;
  double alpha = 1.0;
  std::uint64_t seed = 0;
};

struct UserNode {
  UserId id = 0;
  InterestSet interests;
  std::vector<UserId> followees;  // ascending, no self, no duplicates
};

struct Network {
  NetworkKind kind = NetworkKind::Tree;
  std::vector<UserNode> nodes;
  GraphParams params;
  std::optional<UserId> root_id;  // the audience node `a` (tree kinds only)

  std::size_t edge_count() const;
  bool follows(UserId u, UserId v) const;
};

// Inverted two-hop tree: node 0 is the audience root, it follows the k layer-B
// nodes, each of which follows kprime leaves; every edge satisfies the
// homophily constraint.
Network build_tree(std::uint32_t k, std::uint32_t kprime, std::uint32_t d, std::uint32_t D,
                   double alpha, std::uint64_t seed);

// build_tree with layer-B nodes of identical interest sets merged, then the
// same for layer C; merged nodes take the union of edges without duplicates
// and the root is never merged.
Network build_tree_contracted(std::uint32_t k, std::uint32_t kprime, std::uint32_t d,
                              std::uint32_t D, double alpha, std::uint64_t seed);

// Every node follows the k nodes sharing the most interests with it, ties
// broken uniformly at random under the seed. Candidates are generated through
// a topic-inverted index, so scoring only touches nodes sharing >= 1 topic.
Network build_knn(std::uint32_t N, std::uint32_t k, std::uint32_t d, std::uint32_t D,
                  std::uint64_t seed);

Network build_network(const GraphParams& params);

// Edge lists for a fixed population of interest sets; exposed separately so
// tests can drive it against a brute-force oracle.
std::vector<std::vector<UserId>> knn_edges(const std::vector<InterestSet>& interests,
                                           std::uint32_t k, std::uint64_t seed);

// First violated structural invariant, if any (used by tests and the loader).
std::optional<std::string> check_network(const Network& net);

}  // namespace casim
