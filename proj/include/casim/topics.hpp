#pragma once

#include <cstdint>
#include <vector>

#include "casim/rng.hpp"

namespace casim {

using TopicId = std::uint32_t;

struct TopicUniverse {
  std::uint32_t size_D = 0;  // topic ids are 0 .. size_D-1
};

// Sorted, duplicate-free set of topic ids.
struct InterestSet {
  std::vector<TopicId> topics;

  std::uint32_t size() const { return static_cast<std::uint32_t>(topics.size()); }
  bool contains(TopicId t) const;
  std::uint32_t overlap(const InterestSet& other) const;

  bool operator==(const InterestSet&) const = default;
};

// Smallest overlap a follow edge must have: ceil(alpha * d), robust against
// representation error in the product.
std::uint32_t min_overlap(double alpha, std::uint32_t d);

// Uniform m-subset of 0..n-1, sorted ascending (Floyd's algorithm).
std::vector<std::uint32_t> sample_index_subset(std::uint32_t n, std::uint32_t m, Rng& rng);

// Uniform d-subset of the topic universe.
InterestSet sample_interest_set(const TopicUniverse& universe, std::uint32_t d, Rng& rng);

// Interest set of the same size as `base` with |result ∩ base| >= ceil(alpha*d).
// The overlap size m is uniform on {ceil(alpha*d), .., d}, the shared topics a
// uniform m-subset of base and the rest a uniform subset of the complement, so
// every base topic is equally likely to be shared.
InterestSet sample_homophilous_neighbor(const InterestSet& base, double alpha,
                                        const TopicUniverse& universe, Rng& rng);

}  // namespace casim
