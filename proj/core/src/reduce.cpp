#include "lat72/reduce.hpp"

#include <climits>
#include <cmath>
#include <optional>

#include "lat72/error.hpp"
#include "lat72/linalg.hpp"

namespace lat72 {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

i64 narrow(i128 v) {
  if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN))
    throw Error(ErrorKind::InvariantFailure, "64-bit overflow in Gram arithmetic");
  return static_cast<i64>(v);
}

class LllEngine {
 public:
  LllEngine(Matrix<i64>& g, Matrix<i64>& t) : g_(g), t_(t), n_(g.rows()), mu_(n_, n_), r_(n_, n_), rr_(n_) {}

  void run(double delta, int deep) {
    if (n_ < 2) return;
    compute_row(0);
    std::size_t k = 1;
    std::uint64_t guard = 0;
    while (k < n_) {
      if (++guard > 50'000'000ULL) throw Error(ErrorKind::InvariantFailure, "LLL did not terminate");
      size_reduce(k);
      long double c = static_cast<long double>(g_(k, k));
      std::size_t insert_at = k;
      for (std::size_t i = 0; i < k; ++i) {
        const bool allowed = (deep > 0 && i < static_cast<std::size_t>(deep)) || i + 1 == k;
        if (allowed && c < delta * rr_[i]) {
          insert_at = i;
          break;
        }
        c -= mu_(k, i) * mu_(k, i) * rr_[i];
      }
      if (insert_at == k) {
        ++k;
        continue;
      }
      rotate(insert_at, k);
      if (insert_at == 0) {
        compute_row(0);
        k = 1;
      } else {
        k = insert_at;
      }
    }
  }

  const Matrix<long double>& mu() const { return mu_; }
  const std::vector<long double>& rr() const { return rr_; }

  void refresh_all() {
    for (std::size_t k = 0; k < n_; ++k) compute_row(k);
  }

 private:
  void compute_row(std::size_t k) {
    for (std::size_t j = 0; j <= k; ++j) {
      long double s = static_cast<long double>(g_(k, j));
      for (std::size_t i = 0; i < j; ++i) s -= mu_(j, i) * r_(k, i);
      r_(k, j) = s;
      if (j < k) mu_(k, j) = s / rr_[j];
    }
    rr_[k] = r_(k, k);
    mu_(k, k) = 1;
  }

  void sub(std::size_t k, std::size_t j, i64 q) {
    const i128 gkk = static_cast<i128>(g_(k, k)) - 2 * static_cast<i128>(q) * g_(k, j) +
                     static_cast<i128>(q) * q * g_(j, j);
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == k) continue;
      g_(k, i) = narrow(static_cast<i128>(g_(k, i)) - static_cast<i128>(q) * g_(j, i));
      g_(i, k) = g_(k, i);
    }
    g_(k, k) = narrow(gkk);
    for (std::size_t c = 0; c < t_.cols(); ++c) t_(k, c) = narrow(static_cast<i128>(t_(k, c)) - static_cast<i128>(q) * t_(j, c));
  }

  void size_reduce(std::size_t k) {
    for (int pass = 0; pass < 64; ++pass) {
      compute_row(k);
      bool changed = false;
      for (std::size_t jj = k; jj-- > 0;) {
        const long double m = mu_(k, jj);
        if (std::fabs(m) <= 0.5L) continue;
        const i64 q = std::llround(m);
        if (q == 0) continue;
        sub(k, jj, q);
        for (std::size_t i = 0; i < jj; ++i) mu_(k, i) -= q * mu_(jj, i);
        mu_(k, jj) -= q;
        changed = true;
      }
      if (!changed) return;
    }
    compute_row(k);
  }

  // Moves basis vector k to position i (i < k), shifting the rest up.
  void rotate(std::size_t i, std::size_t k) {
    for (std::size_t p = k; p > i; --p) {
      g_.swap_rows(p, p - 1);
      t_.swap_rows(p, p - 1);
      for (std::size_t r = 0; r < n_; ++r) std::swap(g_(r, p), g_(r, p - 1));
    }
  }

  Matrix<i64>& g_;
  Matrix<i64>& t_;
  std::size_t n_;
  Matrix<long double> mu_, r_;
  std::vector<long double> rr_;
};

// Shortest nonzero vector of the projected block [k, h) by Schnorr-Euchner
// enumeration; returns block coefficients when one shorter than `radius` exists.
std::optional<std::vector<i64>> block_svp(const Matrix<long double>& mu, const std::vector<long double>& rr,
                                          std::size_t k, std::size_t h, long double radius, std::uint64_t node_cap) {
  const std::size_t m = h - k;
  std::vector<i64> x(m, 0), best;
  std::vector<long double> center(m, 0), l(m + 1, 0);
  std::vector<i64> dx(m, 0), ddx(m, 0);
  long double bound = radius;
  std::size_t lvl = m - 1;  // all-zero prefixes only step in the positive direction
  std::uint64_t nodes = 0;
  auto c_of = [&](std::size_t lv) {
    long double s = 0;
    for (std::size_t j = lv + 1; j < m; ++j) s += mu(k + j, k + lv) * x[j];
    return -s;
  };
  while (true) {
    if (++nodes > node_cap) break;
    const long double z = x[lvl] - center[lvl];
    const long double nl = l[lvl + 1] + z * z * rr[k + lvl];
    if (nl < bound) {
      if (lvl == 0) {
        if (nl > 1e-9L) {
          bound = nl;
          best = x;
        }
      } else {
        l[lvl] = nl;
        --lvl;
        center[lvl] = c_of(lvl);
        x[lvl] = std::llround(center[lvl]);
        const bool top_zero = l[lvl + 1] == 0;
        if (top_zero) {
          dx[lvl] = ddx[lvl] = 0;
          x[lvl] = 0;
        } else {
          ddx[lvl] = (center[lvl] >= x[lvl]) ? 1 : -1;
          dx[lvl] = ddx[lvl];
        }
        continue;
      }
    } else {
      ++lvl;
      if (lvl >= m) break;
    }
    // next sibling at lvl
    if (l[lvl + 1] == 0) {
      ++x[lvl];
    } else {
      x[lvl] += dx[lvl];
      ddx[lvl] = -ddx[lvl];
      dx[lvl] = ddx[lvl] - dx[lvl];
    }
  }
  if (best.empty()) return std::nullopt;
  return best;
}

void apply_block_transform(Matrix<i64>& g, Matrix<i64>& t, std::size_t k, const IntMatrix& u) {
  const std::size_t m = u.rows(), n = g.rows();
  Matrix<i64> rows(m, n), trows(m, t.cols());
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t j = 0; j < n; ++j) {
      i128 s = 0;
      for (std::size_t b = 0; b < m; ++b) s += static_cast<i128>(u(a, b).get_si()) * g(k + b, j);
      rows(a, j) = narrow(s);
    }
    for (std::size_t j = 0; j < t.cols(); ++j) {
      i128 s = 0;
      for (std::size_t b = 0; b < m; ++b) s += static_cast<i128>(u(a, b).get_si()) * t(k + b, j);
      trows(a, j) = narrow(s);
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t j = 0; j < n; ++j) g(k + a, j) = rows(a, j);
    for (std::size_t j = 0; j < t.cols(); ++j) t(k + a, j) = trows(a, j);
  }
  // columns
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<i64> col(m);
    for (std::size_t a = 0; a < m; ++a) {
      i128 s = 0;
      for (std::size_t b = 0; b < m; ++b) s += static_cast<i128>(u(a, b).get_si()) * g(i, k + b);
      col[a] = narrow(s);
    }
    for (std::size_t a = 0; a < m; ++a) g(i, k + a) = col[a];
  }
}

}  // namespace

ScaledGram ScaledGram::from(const IntegerLattice& l) {
  auto [im, den] = clear_denominators(l.gram());
  ScaledGram sg;
  sg.den = den;
  sg.g = Matrix<i64>(im.rows(), im.cols());
  for (std::size_t i = 0; i < im.rows(); ++i)
    for (std::size_t j = 0; j < im.cols(); ++j) {
      require(im(i, j).fits_slong_p(), ErrorKind::InvalidInput, "Gram entries too large for the enumeration kernel");
      sg.g(i, j) = im(i, j).get_si();
    }
  return sg;
}

void reduce_gram(Matrix<i64>& g, Matrix<i64>& t, const ReductionQuality& q) {
  LllEngine lll(g, t);
  lll.run(q.delta, q.deep);
  if (q.bkz_block < 3) return;
  const std::size_t n = g.rows();
  for (int tour = 0; tour < q.bkz_tours; ++tour) {
    bool changed = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      LllEngine fresh(g, t);
      fresh.refresh_all();
      const std::size_t h = std::min(n, k + static_cast<std::size_t>(q.bkz_block));
      auto sol = block_svp(fresh.mu(), fresh.rr(), k, h, q.delta * fresh.rr()[k], 2'000'000ULL);
      if (!sol) continue;
      std::vector<Integer> cz;
      for (auto v : *sol) cz.emplace_back(static_cast<long>(v));
      IntMatrix u = complete_to_unimodular(cz);
      apply_block_transform(g, t, k, u);
      LllEngine again(g, t);
      again.run(q.delta, q.deep);
      changed = true;
    }
    if (!changed) break;
  }
}

ReducedBasis reduce_basis(const IntegerLattice& l, const ReductionQuality& q) {
  ScaledGram sg = ScaledGram::from(l);
  const std::size_t n = sg.dim();
  Matrix<i64> t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1;
  reduce_gram(sg.g, t, q);
  IntMatrix ti(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ti(i, j) = static_cast<long>(t(i, j));
  Integer d = determinant(ti);
  if (d != 1 && d != -1) throw Error(ErrorKind::InvariantFailure, "reduction transform is not unimodular");
  IntegerLattice reduced = l.change_basis(ti);
  return {std::move(reduced), std::move(ti)};
}

GramSchmidt gram_schmidt(const Matrix<i64>& g, long double scale) {
  const std::size_t n = g.rows();
  GramSchmidt gs{Matrix<long double>(n, n), std::vector<long double>(n)};
  Matrix<long double> r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      long double s = static_cast<long double>(g(k, j)) / scale;
      for (std::size_t i = 0; i < j; ++i) s -= gs.mu(j, i) * r(k, i);
      r(k, j) = s;
      if (j < k) gs.mu(k, j) = s / gs.rr[j];
    }
    gs.rr[k] = r(k, k);
    if (!(gs.rr[k] > 0)) throw Error(ErrorKind::InvalidInput, "Gram matrix is not numerically positive definite");
    gs.mu(k, k) = 1;
  }
  return gs;
}

}  // namespace lat72
