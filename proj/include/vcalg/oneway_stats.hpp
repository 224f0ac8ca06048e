#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vcalg/errors.hpp"
#include "vcalg/rational.hpp"

namespace vcalg {

/// Raw one-way layout: one observation vector per group.
struct GroupedData {
  std::vector<std::vector<Rational>> groups;

  std::size_t q() const { return groups.size(); }
};

/// Sufficient statistics of a one-way layout, pooled by distinct group size
/// (classes ordered by increasing size).
struct OneWayStats {
  std::vector<int> sizes;             // distinct group sizes n_i
  std::vector<int> mults;             // multiplicities m_i
  std::vector<Rational> means;        // average of the group means in class i
  std::vector<Rational> between_ss;   // B_i, spread of group means within class i
  Rational within_ss;                 // W
  long N = 0;

  int M() const { return static_cast<int>(sizes.size()); }
  int M2() const {
    return static_cast<int>(std::count_if(mults.begin(), mults.end(), [](int m) { return m >= 2; }));
  }
  int q() const { return std::accumulate(mults.begin(), mults.end(), 0); }
};

/// Checks the structural invariants and the standing model assumptions
/// (q >= 2, some group of size >= 2). Throws ModelAssumptionError or
/// InputError.
inline void validate(const OneWayStats& s) {
  const std::size_t M = s.sizes.size();
  if (M == 0 || s.mults.size() != M || s.means.size() != M || s.between_ss.size() != M) {
    throw InputError("sufficient statistics must have matching, nonempty size/mult/mean/SS lists");
  }
  long total = 0;
  for (std::size_t i = 0; i < M; ++i) {
    if (s.sizes[i] < 1) throw InputError("group sizes must be positive");
    if (s.mults[i] < 1) throw InputError("multiplicities must be positive");
    if (i > 0 && s.sizes[i] <= s.sizes[i - 1]) throw InputError("group sizes must be distinct and increasing");
    if (s.between_ss[i] < 0) throw InputError("between-group sums of squares must be nonnegative");
    if (s.mults[i] == 1 && s.between_ss[i] != 0) {
      throw InputError("a size class with one group must have zero between-group sum of squares");
    }
    total += static_cast<long>(s.sizes[i]) * s.mults[i];
  }
  if (s.within_ss < 0) throw InputError("within-group sum of squares must be nonnegative");
  if (total != s.N) throw InputError("N must equal the sum of m_i * n_i");
  if (s.q() < 2) throw ModelAssumptionError("the one-way layout needs at least two groups");
  if (s.sizes.back() < 2) throw ModelAssumptionError("at least one group must have two or more observations");
}

/// Builds validated statistics from per-class values given in any order.
inline OneWayStats make_stats(std::vector<int> sizes, std::vector<int> mults, std::vector<Rational> means,
                              std::vector<Rational> between_ss, Rational within_ss) {
  const std::size_t M = sizes.size();
  if (mults.size() != M || means.size() != M || between_ss.size() != M) {
    throw InputError("sizes, mults, means and betweenSS must have equal length");
  }
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sizes[a] < sizes[b]; });
  OneWayStats s;
  for (std::size_t k : order) {
    s.sizes.push_back(sizes[k]);
    s.mults.push_back(mults[k]);
    s.means.push_back(means[k]);
    s.between_ss.push_back(between_ss[k]);
    s.N += static_cast<long>(sizes[k]) * mults[k];
  }
  s.within_ss = std::move(within_ss);
  validate(s);
  return s;
}

/// Exact sufficient statistics of grouped data.
inline OneWayStats summarize(const GroupedData& data) {
  if (data.q() < 2) throw ModelAssumptionError("the one-way layout needs at least two groups");
  std::map<int, std::vector<Rational>> group_means;  // size -> means of the groups of that size
  Rational W = 0;
  bool any_large = false;
  for (const auto& g : data.groups) {
    if (g.empty()) throw InputError("empty group");
    Rational sum = 0;
    for (const auto& y : g) sum += y;
    Rational mean = sum / static_cast<long>(g.size());
    for (const auto& y : g) W += (y - mean) * (y - mean);
    group_means[static_cast<int>(g.size())].push_back(mean);
    any_large = any_large || g.size() >= 2;
  }
  if (!any_large) throw ModelAssumptionError("at least one group must have two or more observations");
  OneWayStats s;
  for (const auto& [n, gm] : group_means) {
    Rational mean = 0;
    for (const auto& x : gm) mean += x;
    mean /= static_cast<long>(gm.size());
    Rational B = 0;
    for (const auto& x : gm) B += (x - mean) * (x - mean);
    s.sizes.push_back(n);
    s.mults.push_back(static_cast<int>(gm.size()));
    s.means.push_back(mean);
    s.between_ss.push_back(B);
    s.N += static_cast<long>(n) * static_cast<long>(gm.size());
  }
  s.within_ss = W;
  validate(s);
  return s;
}

struct MultiplicityProfile {
  int M = 0;
  std::vector<int> distinct_sizes;  // increasing
  std::vector<int> mults;
  int M2 = 0;
};

inline MultiplicityProfile multiplicity_profile(std::span<const int> sizes_with_repeats) {
  if (sizes_with_repeats.empty()) throw InputError("group size list is empty");
  std::map<int, int> counts;
  for (int n : sizes_with_repeats) {
    if (n < 1) throw InputError("group sizes must be positive");
    ++counts[n];
  }
  MultiplicityProfile p;
  for (const auto& [n, m] : counts) {
    p.distinct_sizes.push_back(n);
    p.mults.push_back(m);
    if (m >= 2) ++p.M2;
  }
  p.M = static_cast<int>(counts.size());
  return p;
}

inline int ml_degree(int M, int M2) { return 3 * M + M2 - 3; }
inline int reml_degree(int M, int M2) { return 2 * M + 2 * M2 - 3; }

}  // namespace vcalg
