#include "lat72/linalg.hpp"

#include "lat72/error.hpp"

namespace lat72 {

Integer common_denominator(const RatMatrix& m) {
  Integer d = 1;
  for (const auto& v : m.data()) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), v.get_den_mpz_t());
  return d;
}

std::pair<IntMatrix, Integer> clear_denominators(const RatMatrix& m) {
  Integer d = common_denominator(m);
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rational& v = m(i, j);
      r(i, j) = v.get_num() * (d / v.get_den());
    }
  return {r, d};
}

Integer determinant(IntMatrix m) {
  if (!m.square()) throw Error(ErrorKind::DimensionMismatch, "determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m(k, k) * m(i, j) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

Rational determinant(const RatMatrix& m) {
  if (!m.square()) throw Error(ErrorKind::DimensionMismatch, "determinant of non-square matrix");
  // Scale each row separately so the correction factor stays small.
  IntMatrix im(m.rows(), m.cols());
  Integer scale = 1;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer d = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), m(i, j).get_den_mpz_t());
    for (std::size_t j = 0; j < m.cols(); ++j) im(i, j) = m(i, j).get_num() * (d / m(i, j).get_den());
    scale *= d;
  }
  Rational r(determinant(std::move(im)), scale);
  r.canonicalize();
  return r;
}

std::vector<Integer> leading_minors(const IntMatrix& in) {
  IntMatrix m = in;
  const std::size_t n = m.rows();
  std::vector<Integer> minors;
  Integer prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    minors.push_back(m(k, k));
    if (m(k, k) <= 0) break;
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m(k, k) * m(i, j) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = m(k, k);
  }
  return minors;
}

bool is_positive_definite(const RatMatrix& m) {
  if (!is_symmetric(m)) return false;
  auto [im, d] = clear_denominators(m);
  auto minors = leading_minors(im);
  if (minors.size() != m.rows()) return false;
  for (const auto& x : minors)
    if (x <= 0) return false;
  return true;
}

std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (!m.square()) throw Error(ErrorKind::DimensionMismatch, "inverse of non-square matrix");
  const std::size_t n = m.rows();
  RatMatrix a = m;
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return std::nullopt;
    a.swap_rows(c, p);
    inv.swap_rows(c, p);
    Rational pivinv = 1 / a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) *= pivinv;
      inv(c, j) *= pivinv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      Rational f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        if (a(c, j) != 0) a(i, j) -= f * a(c, j);
        if (inv(c, j) != 0) inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

RatMatrix solve_right(const RatMatrix& a, const RatMatrix& b) {
  auto inv = inverse(a);
  if (!inv) throw Error(ErrorKind::InvalidInput, "solve_right: singular coefficient matrix");
  return b * *inv;
}

std::size_t rank(const RatMatrix& in) {
  RatMatrix m = in;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(r, p);
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / m(r, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

bool is_integral(const RatMatrix& m) {
  for (const auto& v : m.data())
    if (v.get_den() != 1) return false;
  return true;
}

IntMatrix to_integer(const RatMatrix& m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j).get_den() != 1) throw Error(ErrorKind::NonIntegralResult, "matrix has non-integral entries");
      r(i, j) = m(i, j).get_num();
    }
  return r;
}

namespace {

// rows a, b <- [[s, t], [p, -q]] * (rows a, b)
void combine_rows(IntMatrix& m, std::size_t a, std::size_t b, const Integer& s, const Integer& t, const Integer& p,
                  const Integer& q) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Integer x = m(a, j), y = m(b, j);
    m(a, j) = s * x + t * y;
    m(b, j) = p * x - q * y;
  }
}

}  // namespace

IntMatrix hermite_basis(IntMatrix m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::size_t piv = 0;
  for (std::size_t c = 0; c < cols && piv < rows; ++c) {
    for (std::size_t i = piv + 1; i < rows; ++i) {
      if (m(i, c) == 0) continue;
      if (m(piv, c) == 0) {
        m.swap_rows(piv, i);
        continue;
      }
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), m(piv, c).get_mpz_t(), m(i, c).get_mpz_t());
      Integer p = m(i, c) / g, q = m(piv, c) / g;
      combine_rows(m, piv, i, s, t, p, q);
    }
    if (m(piv, c) == 0) continue;
    if (m(piv, c) < 0)
      for (std::size_t j = 0; j < cols; ++j) m(piv, j) = -m(piv, j);
    for (std::size_t i = 0; i < piv; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), m(i, c).get_mpz_t(), m(piv, c).get_mpz_t());
      if (q != 0)
        for (std::size_t j = c; j < cols; ++j) m(i, j) -= q * m(piv, j);
    }
    ++piv;
  }
  return m.block(0, 0, piv, cols);
}

IntMatrix hermite_basis(IntMatrix m, const Integer& d) {
  if (d <= 0) throw Error(ErrorKind::InvalidInput, "modulus must be positive");
  const std::size_t n = m.cols();
  auto reduce = [&](IntMatrix& a, std::size_t i, std::size_t from) {
    for (std::size_t j = from; j < n; ++j) mpz_fdiv_r(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), d.get_mpz_t());
  };
  for (std::size_t i = 0; i < m.rows(); ++i) reduce(m, i, 0);
  IntMatrix h(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    // Active rows vanish before column c; fold column c into row 0.
    std::size_t rows = m.rows();
    if (rows == 0) {
      h(c, c) = d;
      continue;
    }
    for (std::size_t i = 1; i < rows; ++i) {
      if (m(i, c) == 0) continue;
      if (m(0, c) == 0) {
        m.swap_rows(0, i);
        continue;
      }
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), m(0, c).get_mpz_t(), m(i, c).get_mpz_t());
      Integer p = m(i, c) / g, q = m(0, c) / g;
      combine_rows(m, 0, i, s, t, p, q);
      reduce(m, 0, c);
      reduce(m, i, c);
    }
    // Combine with d e_c: (s, t; d/g, -p_c/g) is unimodular.
    Integer g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), m(0, c).get_mpz_t(), d.get_mpz_t());
    const Integer dg = d / g;
    for (std::size_t j = c + 1; j < n; ++j) h(c, j) = s * m(0, j);
    h(c, c) = g;
    for (std::size_t j = c; j < n; ++j) m(0, j) *= dg;
    reduce(m, 0, c);
    for (std::size_t j = c + 1; j < n; ++j)
      mpz_fdiv_r(h(c, j).get_mpz_t(), h(c, j).get_mpz_t(), d.get_mpz_t());
    IntMatrix next(0, n);
    for (std::size_t i = 0; i < rows; ++i) {
      bool zero = true;
      for (std::size_t j = c + 1; j < n && zero; ++j) zero = m(i, j) == 0;
      if (!zero) next.append_row(m.row(i));
    }
    m = std::move(next);
  }
  for (std::size_t c = 1; c < n; ++c)
    for (std::size_t i = 0; i < c; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(c, c).get_mpz_t());
      if (q != 0)
        for (std::size_t j = c; j < n; ++j) h(i, j) -= q * h(c, j);
    }
  return h;
}

IntMatrix integer_left_kernel(const IntMatrix& m) {
  // Rational RREF of m^T: x * m = 0  <=>  m^T * x^T = 0.
  const std::size_t r = m.rows(), c = m.cols();
  RatMatrix a(c, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(j, i) = m(i, j);
  std::vector<std::size_t> pivots;
  std::size_t prow = 0;
  for (std::size_t col = 0; col < r && prow < c; ++col) {
    std::size_t p = prow;
    while (p < c && a(p, col) == 0) ++p;
    if (p == c) continue;
    a.swap_rows(prow, p);
    Rational inv = 1 / a(prow, col);
    for (std::size_t j = col; j < r; ++j) a(prow, j) *= inv;
    for (std::size_t i = 0; i < c; ++i) {
      if (i == prow || a(i, col) == 0) continue;
      Rational f = a(i, col);
      for (std::size_t j = col; j < r; ++j)
        if (a(prow, j) != 0) a(i, j) -= f * a(prow, j);
    }
    pivots.push_back(col);
    ++prow;
  }
  std::vector<bool> is_pivot(r, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> frees;
  for (std::size_t j = 0; j < r; ++j)
    if (!is_pivot[j]) frees.push_back(j);
  const std::size_t k = frees.size();
  if (k == 0) return IntMatrix(0, r);

  // Free coordinates are integers; each pivot coordinate imposes a congruence.
  IntMatrix basis = IntMatrix::identity(k);
  for (std::size_t pi = 0; pi < pivots.size(); ++pi) {
    std::vector<Rational> coef(k);
    bool any_fraction = false;
    for (std::size_t f = 0; f < k; ++f) {
      coef[f] = -a(pi, frees[f]);
      if (coef[f].get_den() != 1) any_fraction = true;
    }
    if (!any_fraction) continue;
    std::vector<Rational> u(k);
    Integer d = 1;
    for (std::size_t i = 0; i < k; ++i) {
      Rational s = 0;
      for (std::size_t f = 0; f < k; ++f)
        if (basis(i, f) != 0) s += basis(i, f) * coef[f];
      u[i] = s;
      mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), s.get_den_mpz_t());
    }
    if (d == 1) continue;
    std::vector<Integer> n(k);
    for (std::size_t i = 0; i < k; ++i) n[i] = u[i].get_num() * (d / u[i].get_den());
    IntMatrix uni = IntMatrix::identity(k);
    for (std::size_t i = 1; i < k; ++i) {
      if (n[i] == 0) continue;
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), n[0].get_mpz_t(), n[i].get_mpz_t());
      Integer p = n[i] / g, q = n[0] / g;
      combine_rows(uni, 0, i, s, t, p, q);
      n[0] = g;
      n[i] = 0;
    }
    Integer g = gcd(n[0], d);
    Integer mult = d / g;
    for (std::size_t j = 0; j < k; ++j) uni(0, j) *= mult;
    basis = hermite_basis(uni * basis);
  }
  IntMatrix out(k, r);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t f = 0; f < k; ++f) out(i, frees[f]) = basis(i, f);
    for (std::size_t pi = 0; pi < pivots.size(); ++pi) {
      Rational s = 0;
      for (std::size_t f = 0; f < k; ++f)
        if (basis(i, f) != 0) s -= basis(i, f) * a(pi, frees[f]);
      if (s.get_den() != 1) throw Error(ErrorKind::InvariantFailure, "kernel saturation produced a fraction");
      out(i, pivots[pi]) = s.get_num();
    }
  }
  return out;
}

IntMatrix complete_to_unimodular(const std::vector<Integer>& c) {
  const std::size_t k = c.size();
  std::vector<Integer> n = c;
  IntMatrix uinv = IntMatrix::identity(k);
  // Bring a nonzero entry to position 0.
  std::size_t nz = 0;
  while (nz < k && n[nz] == 0) ++nz;
  if (nz == k) throw Error(ErrorKind::InvalidInput, "complete_to_unimodular: zero vector");
  if (nz != 0) {
    std::swap(n[0], n[nz]);
    for (std::size_t i = 0; i < k; ++i) std::swap(uinv(i, 0), uinv(i, nz));
  }
  for (std::size_t i = 1; i < k; ++i) {
    if (n[i] == 0) continue;
    Integer g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), n[0].get_mpz_t(), n[i].get_mpz_t());
    Integer p = n[i] / g, q = n[0] / g;
    for (std::size_t r = 0; r < k; ++r) {
      Integer x = uinv(r, 0), y = uinv(r, i);
      uinv(r, 0) = x * q + y * p;
      uinv(r, i) = x * t - y * s;
    }
    n[0] = g;
    n[i] = 0;
  }
  if (abs(n[0]) != 1) throw Error(ErrorKind::InvalidInput, "complete_to_unimodular: vector is not primitive");
  if (n[0] == -1)
    for (std::size_t r = 0; r < k; ++r) uinv(r, 0) = -uinv(r, 0);
  return uinv.transpose();
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace lat72
