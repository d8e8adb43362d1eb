#include "casim/topics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "casim/error.hpp"

namespace casim {

bool InterestSet::contains(TopicId t) const {
  return std::binary_search(topics.begin(), topics.end(), t);
}

std::uint32_t InterestSet::overlap(const InterestSet& other) const {
  std::uint32_t count = 0;
  auto a = topics.begin();
  auto b = other.topics.begin();
  while (a != topics.end() && b != other.topics.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

std::uint32_t min_overlap(double alpha, std::uint32_t d) {
  const double raw = alpha * static_cast<double>(d);
  const auto r = static_cast<std::int64_t>(std::ceil(raw - 1e-9));
  if (r <= 0) return 0;
  return std::min<std::uint32_t>(static_cast<std::uint32_t>(r), d);
}

std::vector<std::uint32_t> sample_index_subset(std::uint32_t n, std::uint32_t m, Rng& rng) {
  if (m > n) throw invalid_parameter_error("subset size exceeds population");
  std::unordered_set<std::uint32_t> chosen;
  chosen.reserve(m * 2);
  for (std::uint32_t j = n - m; j < n; ++j) {
    const auto t = static_cast<std::uint32_t>(uniform_below(rng, j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint32_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

InterestSet sample_interest_set(const TopicUniverse& universe, std::uint32_t d, Rng& rng) {
  if (d < 1 || d > universe.size_D) {
    throw invalid_parameter_error("interest set size d must satisfy 1 <= d <= D");
  }
  return InterestSet{sample_index_subset(universe.size_D, d, rng)};
}

InterestSet sample_homophilous_neighbor(const InterestSet& base, double alpha,
                                        const TopicUniverse& universe, Rng& rng) {
  const std::uint32_t d = base.size();
  const std::uint32_t D = universe.size_D;
  if (alpha <= 0.0 || alpha > 1.0) throw invalid_parameter_error("alpha must be in (0, 1]");
  if (d < 1 || d > D) throw invalid_parameter_error("base interest set inconsistent with universe");
  const std::uint32_t required = min_overlap(alpha, d);
  if (d - required > D - d) {
    throw invalid_parameter_error("homophilous draw infeasible: complement smaller than d - ceil(alpha*d)");
  }

  const std::uint32_t m = required + static_cast<std::uint32_t>(uniform_below(rng, d - required + 1));

  InterestSet out;
  out.topics.reserve(d);
  for (std::uint32_t idx : sample_index_subset(d, m, rng)) {
    out.topics.push_back(base.topics[idx]);
  }
  // Complement picks: the i-th smallest non-base topic, found by shifting the
  // rank past every base topic at or below it.
  for (std::uint32_t idx : sample_index_subset(D - d, d - m, rng)) {
    TopicId v = idx;
    for (TopicId b : base.topics) {
      if (b <= v) {
        ++v;
      } else {
        break;
      }
    }
    out.topics.push_back(v);
  }
  std::sort(out.topics.begin(), out.topics.end());
  return out;
}

}  // namespace casim
