#pragma once
// Independent reference implementations used only by tests. None of these
// call into the library's numeric code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

// Sum over every ordered sequence of n draws whose multiset equals `target`
// (target[i] = multiplicity of action i). Exponential; small inputs only.
inline long double enumerate_shape_probability(const std::vector<double> &p,
                                               const std::vector<std::size_t> &target) {
  std::size_t n = 0;
  for (auto e : target)
    n += e;
  const std::size_t k = p.size();
  std::vector<std::size_t> seq(n, 0);
  long double total = 0;
  while (true) {
    std::vector<std::size_t> count(k, 0);
    long double prob = 1;
    for (auto s : seq) {
      ++count[s];
      prob *= p[s];
    }
    if (count == target)
      total += prob;
    std::size_t pos = 0;
    while (pos < n && ++seq[pos] == k)
      seq[pos++] = 0;
    if (pos == n)
      break;
  }
  return total;
}

// Smallest k with P(first success <= k) >= 1/2, by summing the geometric pmf
// term by term (Kahan, long double). No k above `limit` is searched.
inline std::optional<std::uint64_t> cdf_median(long double p, std::uint64_t limit) {
  if (p >= 1)
    return 1;
  long double sum = 0, comp = 0, term = p;
  for (std::uint64_t k = 1; k <= limit; ++k) {
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (sum >= 0.5L)
      return k;
    term *= (1 - p);
  }
  return std::nullopt;
}

// Smallest k with 1 - (1-p)^k >= 1/2, by bisection. (1-p)^k goes through
// log1p: forming 1-p directly loses digits for tiny p. Empty = infinite
// (p == 0 or below the 1e-15 floor).
inline std::optional<std::uint64_t> bisect_median(long double p) {
  if (!(p >= 1e-15L))
    return std::nullopt;
  if (p >= 0.5L)
    return 1;
  auto cdf = [&](std::uint64_t k) {
    return -std::expm1(static_cast<long double>(k) * std::log1p(-p));
  };
  std::uint64_t lo = 1, hi = 2;
  while (cdf(hi) < 0.5L)
    hi *= 2;
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    if (cdf(mid) >= 0.5L)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

// O(n^2) average ranks: 1 + (#smaller) + (#equal - 1) / 2.
inline std::vector<long double> naive_ranks(const std::vector<double> &x) {
  std::vector<long double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      less += x[j] < x[i];
      equal += x[j] == x[i];
    }
    r[i] = 1.0L + static_cast<long double>(less) +
           static_cast<long double>(equal - 1) / 2.0L;
  }
  return r;
}

inline std::optional<long double> naive_spearman(const std::vector<double> &x,
                                                 const std::vector<double> &y) {
  const auto rx = naive_ranks(x), ry = naive_ranks(y);
  const auto n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0)
    return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

// n! / prod(e_i!) * prod(p_i^e_i), all in long double.
inline long double multinomial(const std::vector<long double> &p,
                               const std::vector<std::size_t> &e) {
  long double out = 1;
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 1; j <= e[i]; ++j) {
      ++n;
      out *= static_cast<long double>(n) / static_cast<long double>(j);
      out *= p[i];
    }
  }
  return out;
}

// Lower median of a sorted copy; empty = infinite sorts last.
inline std::optional<std::optional<std::uint64_t>>
lower_median(std::vector<std::optional<std::uint64_t>> v) {
  if (v.empty())
    return std::nullopt;
  std::sort(v.begin(), v.end(), [](const auto &a, const auto &b) {
    const auto ka = a ? *a : std::numeric_limits<std::uint64_t>::max();
    const auto kb = b ? *b : std::numeric_limits<std::uint64_t>::max();
    if (ka != kb)
      return ka < kb;
    return a.has_value() && !b.has_value();
  });
  return v[(v.size() - 1) / 2];
}

} // namespace oracle
