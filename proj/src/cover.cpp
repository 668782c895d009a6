#include <algorithm>
#include <bit>
#include <cstdint>

#include "cimm/approx.hpp"

namespace cimm {

namespace {

class Bits {
 public:
  explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  std::size_t count_and(const Bits& o) const {
    std::size_t c = 0;
    for (std::size_t k = 0; k < words_.size(); ++k) c += static_cast<std::size_t>(std::popcount(words_[k] & o.words_[k]));
    return c;
  }
  Bits minus(const Bits& o) const {
    Bits r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~o.words_[k];
    return r;
  }
  std::size_t first() const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k]) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
    }
    return static_cast<std::size_t>(-1);
  }

 private:
  std::vector<std::uint64_t> words_;
};

class CoverSearch {
 public:
  CoverSearch(std::size_t universe, std::span<const std::vector<std::size_t>> sets)
      : universe_(universe), containing_(universe) {
    for (std::size_t s = 0; s < sets.size(); ++s) {
      Bits b(universe);
      for (std::size_t e : sets[s]) {
        if (e >= universe) throw PreconditionError("set cover element out of range");
        if (!b.test(e)) containing_[e].push_back(s);
        b.set(e);
      }
      sets_.push_back(std::move(b));
    }
  }

  std::vector<std::size_t> solve() {
    Bits all(universe_);
    for (std::size_t e = 0; e < universe_; ++e) {
      if (containing_[e].empty()) throw PreconditionError("sets do not cover the universe");
      all.set(e);
    }
    best_ = greedy(all);
    search(all);
    std::sort(best_.begin(), best_.end());
    return best_;
  }

 private:
  std::vector<std::size_t> greedy(Bits uncovered) const {
    std::vector<std::size_t> chosen;
    while (uncovered.count() > 0) {
      std::size_t pick = 0, gain = 0;
      for (std::size_t s = 0; s < sets_.size(); ++s) {
        const std::size_t g = sets_[s].count_and(uncovered);
        if (g > gain) {
          gain = g;
          pick = s;
        }
      }
      chosen.push_back(pick);
      uncovered = uncovered.minus(sets_[pick]);
    }
    return chosen;
  }

  void search(const Bits& uncovered) {
    const std::size_t remaining = uncovered.count();
    if (remaining == 0) {
      if (current_.size() < best_.size()) best_ = current_;
      return;
    }
    std::size_t max_gain = 0;
    for (const auto& s : sets_) max_gain = std::max(max_gain, s.count_and(uncovered));
    const std::size_t lower = (remaining + max_gain - 1) / max_gain;
    if (current_.size() + lower >= best_.size()) return;

    // Branch on the uncovered element with the fewest covering sets.
    std::size_t pivot = uncovered.first();
    for (std::size_t e = pivot; e < universe_; ++e) {
      if (uncovered.test(e) && containing_[e].size() < containing_[pivot].size()) pivot = e;
    }
    std::vector<std::pair<std::size_t, std::size_t>> options;  // (-gain, set) ordering
    for (std::size_t s : containing_[pivot]) {
      options.emplace_back(sets_.size() - sets_[s].count_and(uncovered), s);
    }
    std::sort(options.begin(), options.end());
    for (const auto& [unused, s] : options) {
      current_.push_back(s);
      search(uncovered.minus(sets_[s]));
      current_.pop_back();
    }
  }

  std::size_t universe_;
  std::vector<Bits> sets_;
  std::vector<std::vector<std::size_t>> containing_;
  std::vector<std::size_t> best_;
  std::vector<std::size_t> current_;
};

}  // namespace

std::vector<std::size_t> minimum_set_cover(std::size_t universe,
                                           std::span<const std::vector<std::size_t>> sets) {
  if (universe == 0) return {};
  return CoverSearch(universe, sets).solve();
}

CoverResult two_stage_cover(const FiniteStructure& s, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("cover radius must be > 0");
  const std::size_t n = s.size();
  CoverResult res;
  res.delta = delta;

  // Stage 1: greedy closed delta-balls over all points.
  std::vector<bool> covered(n, false);
  std::size_t left = n;
  while (left > 0) {
    std::size_t pick = 0, gain = 0;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t g = 0;
      for (std::size_t x = 0; x < n; ++x) {
        if (!covered[x] && s.distance(c, x) <= delta) ++g;
      }
      if (g > gain) {
        gain = g;
        pick = c;
      }
    }
    res.first_stage.push_back(pick);
    for (std::size_t x = 0; x < n; ++x) {
      if (!covered[x] && s.distance(pick, x) <= delta) {
        covered[x] = true;
        --left;
      }
    }
  }
  std::sort(res.first_stage.begin(), res.first_stage.end());

  // Stage 2: fewest closed delta-balls containing every first-stage center.
  std::vector<std::vector<std::size_t>> balls(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t j = 0; j < res.first_stage.size(); ++j) {
      if (s.distance(c, res.first_stage[j]) <= delta) balls[c].push_back(j);
    }
  }
  res.centers = minimum_set_cover(res.first_stage.size(), balls);

  res.certified = true;
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t best = res.centers.front();
    for (std::size_t c : res.centers) {
      if (s.distance(x, c) < s.distance(x, best)) best = c;
    }
    res.nearest.push_back(best);
    res.nearest_distance.push_back(s.distance(x, best));
    res.certified = res.certified && s.distance(x, best) <= 2.0 * delta + kValidationTolerance;
  }
  return res;
}

}  // namespace cimm
