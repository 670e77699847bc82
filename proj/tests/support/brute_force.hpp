#pragma once

// Independent short-vector oracle: scans the full coordinate box implied by
// the diagonal of the inverse Gram matrix. Slow, simple, and shares no code
// with the enumeration kernel.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "lat72/matrix.hpp"

namespace oracle {

using Gram = std::vector<std::vector<std::int64_t>>;

inline std::vector<double> inverse_diagonal(const Gram& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(2 * n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = static_cast<double>(g[i][j]);
    a[i][n + i] = 1.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i][n + i] / a[i][i];
  return d;
}

/// Counts by exact norm (numerator over den^2) of v = x + t/den with (v,v) <= bound,
/// x ranging over Z^n; the zero vector is skipped when t == 0.
inline std::map<std::int64_t, std::uint64_t> box_census(const Gram& g, const std::vector<std::int64_t>& t,
                                                        std::int64_t den, std::int64_t bound) {
  const std::size_t n = g.size();
  const auto inv = inverse_diagonal(g);
  std::vector<std::int64_t> lo(n), hi(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(static_cast<double>(bound) * inv[i]) + 1e-6;
    const double c = -static_cast<double>(t[i]) / static_cast<double>(den);
    lo[i] = static_cast<std::int64_t>(std::floor(c - r)) - 1;
    hi[i] = static_cast<std::int64_t>(std::ceil(c + r)) + 1;
    x[i] = lo[i];
  }
  std::map<std::int64_t, std::uint64_t> out;
  const std::int64_t limit = bound * den * den;
  // Outer odometer over coordinates 1..n-1; coordinate 0 is scanned as a quadratic.
  while (true) {
    std::int64_t c = 0, b = 0;
    bool rest_zero = true;
    for (std::size_t i = 1; i < n; ++i) {
      const std::int64_t vi = den * x[i] + t[i];
      if (vi != 0) rest_zero = false;
      b += g[0][i] * vi;
      for (std::size_t j = 1; j < n; ++j) c += vi * g[i][j] * (den * x[j] + t[j]);
    }
    for (std::int64_t x0 = lo[0]; x0 <= hi[0]; ++x0) {
      const std::int64_t v0 = den * x0 + t[0];
      const std::int64_t s = c + 2 * b * v0 + g[0][0] * v0 * v0;
      if ((v0 != 0 || !rest_zero) && s <= limit) ++out[s];
    }
    std::size_t k = 1;
    while (k < n && x[k] == hi[k]) x[k] = lo[k], ++k;
    if (k == n) break;
    ++x[k];
  }
  return out;
}

/// Random positive definite Gram matrix with |entries| <= 20.
inline Gram random_gram(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> diag(10, 20), off(-5, 5);
  while (true) {
    Gram g(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      g[i][i] = diag(rng);
      for (std::size_t j = 0; j < i; ++j) g[i][j] = g[j][i] = off(rng);
    }
    // Cholesky test for positive definiteness.
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    bool pd = true;
    for (std::size_t i = 0; i < n && pd; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = static_cast<double>(g[i][j]);
        for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
        if (i == j) {
          if (s < 4.0) {  // keeps the oracle box small
            pd = false;
            break;
          }
          l[i][i] = std::sqrt(s);
        } else {
          l[i][j] = s / l[j][j];
        }
      }
    if (pd) return g;
  }
}

inline lat72::IntMatrix to_matrix(const Gram& g) {
  lat72::IntMatrix m(g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) m(i, j) = static_cast<long>(g[i][j]);
  return m;
}

}  // namespace oracle
