#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "casim/error.hpp"
#include "casim/network.hpp"

using namespace casim;

namespace {

bool same_topology(const Network& a, const Network& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (a.nodes[i].interests.topics != b.nodes[i].interests.topics) return false;
    if (a.nodes[i].followees != b.nodes[i].followees) return false;
  }
  return true;
}

// Brute-force k-NN oracle: full O(N^2) overlap scoring, overlap descending,
// id ascending. Only a valid reference when overlap ties cannot occur.
std::vector<std::vector<UserId>> brute_knn(const std::vector<InterestSet>& sets, std::uint32_t k) {
  const std::size_t n = sets.size();
  std::vector<std::vector<UserId>> edges(n);
  for (std::size_t u = 0; u < n; ++u) {
    std::vector<std::pair<std::uint32_t, UserId>> scored;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u) continue;
      scored.emplace_back(sets[u].overlap(sets[v]), static_cast<UserId>(v));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    scored.resize(k);
    for (const auto& [ovl, v] : scored) edges[u].push_back(v);
    std::sort(edges[u].begin(), edges[u].end());
  }
  return edges;
}

// Greedy Sidon sequence (all pairwise sums distinct).
std::vector<std::uint32_t> mian_chowla(std::size_t n) {
  std::vector<std::uint32_t> a;
  std::set<std::uint64_t> sums;
  std::uint32_t cand = 1;
  while (a.size() < n) {
    bool ok = !sums.count(2ull * cand);
    for (std::uint32_t x : a) {
      if (sums.count(static_cast<std::uint64_t>(x) + cand)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (std::uint32_t x : a) sums.insert(static_cast<std::uint64_t>(x) + cand);
      sums.insert(2ull * cand);
      a.push_back(cand);
    }
    ++cand;
  }
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

TEST_CASE("build_tree shape k=2 k'=3") {
  const Network net = build_tree(2, 3, 3, 20, 0.5, 11);
  REQUIRE(net.nodes.size() == 9);
  CHECK(net.nodes[0].followees == std::vector<UserId>{1, 2});
  CHECK(net.nodes[1].followees.size() == 3);
  CHECK(net.nodes[2].followees.size() == 3);
  for (std::size_t c = 3; c < 9; ++c) CHECK(net.nodes[c].followees.empty());
  CHECK(net.root_id == UserId{0});
  CHECK_FALSE(check_network(net).has_value());
}

TEST_CASE("build_tree alpha=1 copies the root interests everywhere") {
  const Network net = build_tree(3, 4, 5, 30, 1.0, 2);
  for (const UserNode& node : net.nodes) {
    CHECK(node.interests == net.nodes[0].interests);
  }
}

TEST_CASE("build_tree is deterministic in the seed") {
  const Network a = build_tree(4, 5, 4, 40, 0.5, 77);
  const Network b = build_tree(4, 5, 4, 40, 0.5, 77);
  const Network c = build_tree(4, 5, 4, 40, 0.5, 78);
  CHECK(same_topology(a, b));
  CHECK_FALSE(same_topology(a, c));
}

TEST_CASE("every tree edge satisfies the homophily floor") {
  for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
    const Network net = build_tree(5, 6, 10, 100, alpha, 123);
    const std::uint32_t need = min_overlap(alpha, 10);
    for (const UserNode& node : net.nodes) {
      for (UserId v : node.followees) {
        CHECK(node.interests.overlap(net.nodes[v].interests) >= need);
      }
    }
    CHECK_FALSE(check_network(net).has_value());
  }
}

TEST_CASE("build_tree rejects bad parameters") {
  CHECK_THROWS_AS(build_tree(0, 3, 3, 10, 0.5, 1), invalid_parameter_error);
  CHECK_THROWS_AS(build_tree(2, 3, 11, 10, 0.5, 1), invalid_parameter_error);
  CHECK_THROWS_AS(build_tree(2, 3, 10, 12, 0.1, 1), invalid_parameter_error);
}

// ---------------------------------------------------------------------------
// TreeContracted
// ---------------------------------------------------------------------------

TEST_CASE("contraction with all-distinct interest sets is the identity") {
  // Wide overlap range and a verified seed: every interest set distinct.
  const Network tree = build_tree(4, 4, 20, 400, 0.1, 3);
  std::set<std::vector<TopicId>> distinct;
  for (const UserNode& n : tree.nodes) distinct.insert(n.interests.topics);
  REQUIRE(distinct.size() == tree.nodes.size());

  const Network contracted = build_tree_contracted(4, 4, 20, 400, 0.1, 3);
  CHECK(contracted.kind == NetworkKind::TreeContracted);
  CHECK(same_topology(tree, contracted));
}

TEST_CASE("contraction with alpha=1 collapses each layer to one node") {
  const Network net = build_tree_contracted(5, 7, 4, 4, 1.0, 9);
  REQUIRE(net.nodes.size() == 3);
  CHECK(net.nodes[0].followees == std::vector<UserId>{1});
  CHECK(net.nodes[1].followees == std::vector<UserId>{2});
  CHECK(net.nodes[2].followees.empty());
  CHECK_FALSE(check_network(net).has_value());
}

TEST_CASE("contracted followee lists carry no duplicates and stay homophilous") {
  // Tiny topic space so merges actually happen.
  const Network net = build_tree_contracted(10, 10, 2, 4, 0.5, 5);
  CHECK(net.nodes.size() < 1 + 10 + 100);
  for (const UserNode& node : net.nodes) {
    std::set<UserId> dedup(node.followees.begin(), node.followees.end());
    CHECK(dedup.size() == node.followees.size());
  }
  CHECK_FALSE(check_network(net).has_value());
}

// ---------------------------------------------------------------------------
// k-NN
// ---------------------------------------------------------------------------

TEST_CASE("knn hand-traced N=3, k=1") {
  const std::vector<InterestSet> sets = {InterestSet{{1, 2}}, InterestSet{{2, 3}},
                                         InterestSet{{4, 5}}};
  // Overlaps: 0-1 share topic 2; node 2 shares nothing.
  int follows0 = 0, follows1 = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto edges = knn_edges(sets, 1, seed);
    CHECK(edges[0] == std::vector<UserId>{1});
    CHECK(edges[1] == std::vector<UserId>{0});
    REQUIRE(edges[2].size() == 1);
    (edges[2][0] == 0 ? follows0 : follows1) += 1;
  }
  // Node 2 has no candidates; the fill-up must be uniform over {0, 1}.
  CHECK(follows0 > 60);
  CHECK(follows1 > 60);
}

TEST_CASE("knn out-degree and determinism invariants") {
  const Network a = build_knn(50, 7, 4, 30, 99);
  const Network b = build_knn(50, 7, 4, 30, 99);
  CHECK(same_topology(a, b));
  for (const UserNode& node : a.nodes) CHECK(node.followees.size() == 7);
  CHECK_FALSE(check_network(a).has_value());

  const Network c = build_knn(50, 7, 4, 30, 100);
  CHECK_FALSE(same_topology(a, c));
}

TEST_CASE("knn rejects k >= N") {
  CHECK_THROWS_AS(build_knn(5, 5, 2, 10, 1), invalid_parameter_error);
  CHECK_THROWS_AS(build_knn(1, 0, 2, 10, 1), invalid_parameter_error);
}

TEST_CASE("knn equals the brute-force oracle when overlaps cannot tie") {
  // Interval interest sets with Sidon offsets: from any node, the overlap
  // d - |a_u - a_v| is distinct for every v, so tie-breaking never fires.
  const std::size_t n = 60;
  const auto offsets = mian_chowla(n);
  const std::uint32_t span = offsets.back() - offsets.front();
  const std::uint32_t d = span + 1;  // every pair overlaps by at least 1
  std::vector<InterestSet> sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t t = 0; t < d; ++t) sets[i].topics.push_back(offsets[i] + t);
  }
  for (std::size_t u = 0; u < n; ++u) {
    std::set<std::uint32_t> overlaps;
    for (std::size_t v = 0; v < n; ++v) {
      if (v != u) overlaps.insert(sets[u].overlap(sets[v]));
    }
    REQUIRE(overlaps.size() == n - 1);  // no ties, oracle is exact
  }

  for (std::uint32_t k : {1u, 5u, 17u}) {
    const auto expected = brute_knn(sets, k);
    const auto got = knn_edges(sets, k, 4242);
    CHECK(got == expected);
  }
}

TEST_CASE("knn matches the oracle up to ties on random sets") {
  const std::uint32_t N = 200, k = 12, d = 6, D = 40;
  const Network net = build_knn(N, k, d, D, 321);
  std::vector<InterestSet> sets;
  for (const UserNode& node : net.nodes) sets.push_back(node.interests);

  for (std::uint32_t u = 0; u < N; ++u) {
    std::vector<std::uint32_t> all_scores;
    std::map<UserId, std::uint32_t> score_of;
    for (std::uint32_t v = 0; v < N; ++v) {
      if (v == u) continue;
      const std::uint32_t s = sets[u].overlap(sets[v]);
      all_scores.push_back(s);
      score_of[v] = s;
    }
    std::sort(all_scores.rbegin(), all_scores.rend());
    const std::uint32_t kth = all_scores[k - 1];

    std::vector<std::uint32_t> got_scores;
    for (UserId v : net.nodes[u].followees) got_scores.push_back(score_of[v]);
    std::sort(got_scores.rbegin(), got_scores.rend());
    // Chosen overlap multiset equals the top-k multiset...
    CHECK(std::equal(got_scores.begin(), got_scores.end(), all_scores.begin()));
    // ...and everything strictly above the k-th score is always chosen.
    for (const auto& [v, s] : score_of) {
      if (s > kth) CHECK(net.follows(u, v));
    }
  }
}
