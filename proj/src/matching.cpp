#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "cimm/approx.hpp"

namespace cimm {

namespace {

constexpr std::size_t kNil = BipartiteMatching::kUnmatched;

class HopcroftKarp {
 public:
  HopcroftKarp(std::size_t right_count, std::span<const std::vector<std::size_t>> adj)
      : adj_(adj), dist_(adj.size()) {
    m_.left_to_right.assign(adj.size(), kNil);
    m_.right_to_left.assign(right_count, kNil);
    for (const auto& row : adj) {
      for (std::size_t r : row) {
        if (r >= right_count) throw PreconditionError("matching adjacency out of range");
      }
    }
  }

  BipartiteMatching run() {
    // Greedy seed in adjacency order; an already perfect seed is kept as is.
    for (std::size_t l = 0; l < adj_.size(); ++l) {
      for (std::size_t r : adj_[l]) {
        if (m_.right_to_left[r] == kNil) {
          match(l, r);
          break;
        }
      }
    }
    while (layer()) {
      for (std::size_t l = 0; l < adj_.size(); ++l) {
        if (m_.left_to_right[l] == kNil) augment(l);
      }
    }
    return m_;
  }

 private:
  void match(std::size_t l, std::size_t r) {
    if (m_.left_to_right[l] == kNil) ++m_.size;
    m_.left_to_right[l] = r;
    m_.right_to_left[r] = l;
  }

  bool layer() {
    std::queue<std::size_t> q;
    for (std::size_t l = 0; l < adj_.size(); ++l) {
      if (m_.left_to_right[l] == kNil) {
        dist_[l] = 0;
        q.push(l);
      } else {
        dist_[l] = kInf;
      }
    }
    bool found = false;
    while (!q.empty()) {
      const std::size_t l = q.front();
      q.pop();
      for (std::size_t r : adj_[l]) {
        const std::size_t next = m_.right_to_left[r];
        if (next == kNil) {
          found = true;
        } else if (dist_[next] == kInf) {
          dist_[next] = dist_[l] + 1;
          q.push(next);
        }
      }
    }
    return found;
  }

  bool augment(std::size_t l) {
    for (std::size_t r : adj_[l]) {
      const std::size_t next = m_.right_to_left[r];
      if (next == kNil || (dist_[next] == dist_[l] + 1 && augment(next))) {
        match(l, r);
        return true;
      }
    }
    dist_[l] = kInf;
    return false;
  }

  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::span<const std::vector<std::size_t>> adj_;
  std::vector<std::size_t> dist_;
  BipartiteMatching m_;
};

}  // namespace

BipartiteMatching maximum_matching(std::size_t right_count,
                                   std::span<const std::vector<std::size_t>> adjacency) {
  return HopcroftKarp(right_count, adjacency).run();
}

std::vector<std::size_t> hall_witness(std::span<const std::vector<std::size_t>> adjacency,
                                      const BipartiteMatching& m) {
  std::size_t root = kNil;
  for (std::size_t l = 0; l < adjacency.size(); ++l) {
    if (m.left_to_right[l] == kNil) {
      root = l;
      break;
    }
  }
  if (root == kNil) return {};
  std::vector<bool> seen_left(adjacency.size(), false);
  std::vector<bool> seen_right(m.right_to_left.size(), false);
  std::vector<std::size_t> stack{root};
  seen_left[root] = true;
  while (!stack.empty()) {
    const std::size_t l = stack.back();
    stack.pop_back();
    for (std::size_t r : adjacency[l]) {
      if (seen_right[r]) continue;
      seen_right[r] = true;
      const std::size_t next = m.right_to_left[r];
      if (next != kNil && !seen_left[next]) {
        seen_left[next] = true;
        stack.push_back(next);
      }
    }
  }
  std::vector<std::size_t> z;
  for (std::size_t l = 0; l < adjacency.size(); ++l) {
    if (seen_left[l]) z.push_back(l);
  }
  return z;
}

void check_isometry(const FiniteStructure& s, std::span<const std::size_t> alpha) {
  const std::size_t n = s.size();
  if (alpha.size() != n) throw PreconditionError("isometry has the wrong length");
  std::vector<bool> hit(n, false);
  for (std::size_t p : alpha) {
    if (p >= n || hit[p]) throw PreconditionError("isometry is not a bijection of the points");
    hit[p] = true;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (std::fabs(s.distance(alpha[a], alpha[b]) - s.distance(a, b)) > 1e-12) {
        throw PreconditionError("map does not preserve the distance between " + s.labels[a] +
                                " and " + s.labels[b]);
      }
    }
  }
}

MatchingResult isometry_matching(const FiniteStructure& s, const CoverResult& cover,
                                 std::span<const std::size_t> alpha, double delta) {
  check_isometry(s, alpha);
  const auto& c = cover.centers;
  const std::size_t m = c.size();
  const double limit = 2.0 * delta - 1e-12;

  std::vector<std::vector<std::size_t>> adj(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (s.distance(alpha[c[j]], c[i]) <= limit) adj[i].push_back(j);
    }
    std::stable_sort(adj[i].begin(), adj[i].end(), [&](std::size_t a, std::size_t b) {
      return s.distance(alpha[c[a]], c[i]) < s.distance(alpha[c[b]], c[i]);
    });
  }

  const BipartiteMatching bm = maximum_matching(m, adj);
  MatchingResult res;
  res.feasible = bm.size == m;
  if (res.feasible) {
    res.permutation = bm.left_to_right;
    for (std::size_t i = 0; i < m; ++i) res.distances.push_back(s.distance(alpha[c[res.permutation[i]]], c[i]));
    return res;
  }
  res.hall_witness = hall_witness(adj, bm);
  std::vector<bool> nb(m, false);
  for (std::size_t i : res.hall_witness) {
    for (std::size_t j : adj[i]) nb[j] = true;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (nb[j]) res.hall_neighbors.push_back(j);
  }
  return res;
}

}  // namespace cimm
