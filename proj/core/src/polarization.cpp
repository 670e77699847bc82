#include "lat72/polarization.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "lat72/error.hpp"
#include "lat72/linalg.hpp"

namespace lat72 {

namespace {

bool parity(const Integer& x) { return mpz_odd_p(x.get_mpz_t()) != 0; }

bool parity(const Rational& x) {
  require(x.get_den() == 1, ErrorKind::NonIntegralResult, "value " + x.get_str() + " is not an integer");
  return parity(x.get_num());
}

// Reduced echelon form keyed on the highest set bit; rows come back sorted by
// ascending pivot, so counting c = 1, 2, ... through combinations of the rows
// visits the span in increasing numeric order.
std::vector<F2Vector> echelon_high(std::vector<F2Vector> rows, std::size_t n) {
  std::vector<F2Vector> out;
  std::vector<std::size_t> piv;
  for (auto r : rows) {
    for (std::size_t k = 0; k < out.size(); ++k)
      if (r[piv[k]]) r ^= out[k];
    if (r.none()) continue;
    std::size_t p = n;
    while (!r[--p]) {}
    for (auto& o : out)
      if (o[p]) o ^= r;
    out.push_back(r);
    piv.push_back(p);
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return piv[a] < piv[b]; });
  std::vector<F2Vector> sorted;
  for (auto i : order) sorted.push_back(out[i]);
  return sorted;
}

// {x : x . c = 0 for every c in constraints}.
std::vector<F2Vector> nullspace(const std::vector<F2Vector>& constraints, std::size_t n) {
  std::vector<F2Vector> rows;
  std::vector<std::size_t> piv;
  for (auto r : constraints) {
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (r[piv[k]]) r ^= rows[k];
    if (r.none()) continue;
    std::size_t p = 0;
    while (!r[p]) ++p;
    for (auto& o : rows)
      if (o[p]) o ^= r;
    rows.push_back(r);
    piv.push_back(p);
  }
  std::vector<bool> is_piv(n, false);
  for (auto p : piv) is_piv[p] = true;
  std::vector<F2Vector> basis;
  for (std::size_t j = 0; j < n; ++j) {
    if (is_piv[j]) continue;
    F2Vector x;
    x[j] = true;
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (rows[k][j]) x[piv[k]] = true;
    basis.push_back(x);
  }
  return basis;
}

F2Vector combination(const std::vector<F2Vector>& basis, std::uint64_t c) {
  F2Vector x;
  for (std::size_t k = 0; c; ++k, c >>= 1)
    if (c & 1) x ^= basis[k];
  return x;
}

F2Vector permute(const F2Vector& x, const std::vector<std::size_t>& perm) {
  F2Vector y;
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (x[i]) y[perm[i]] = true;
  return y;
}

std::size_t f2_rank(const std::vector<F2Vector>& rows, std::size_t n) { return n - nullspace(rows, n).size(); }

std::vector<F2Vector> rows_mod2(const IntMatrix& m) {
  std::vector<F2Vector> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = parity(m(i, j));
  return out;
}

void check(bool cond, const std::string& clause) { require(cond, ErrorKind::InvariantFailure, clause); }

}  // namespace

F2QuadSpace::F2QuadSpace(std::vector<F2Vector> bilinear, std::vector<bool> q_diag)
    : b_(std::move(bilinear)), q_(std::move(q_diag)) {
  require(b_.size() == q_.size(), ErrorKind::DimensionMismatch, "bilinear form and quadratic diagonal differ in size");
  require(q_.size() <= kMaxF2Dim, ErrorKind::RankTooLarge, "F_2 space dimension exceeds 128");
  for (std::size_t i = 0; i < dim(); ++i) {
    require(!b_[i][i], ErrorKind::InvalidInput, "b is not alternating");
    for (std::size_t j = 0; j < dim(); ++j)
      require(b_[i][j] == b_[j][i], ErrorKind::InvalidInput, "b is not symmetric");
  }
}

bool F2QuadSpace::q(const F2Vector& x) const {
  bool v = false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!x[i]) continue;
    v ^= q_[i];
    // pairs i < j
    F2Vector hi = b_[i] & x;
    for (std::size_t j = 0; j <= i; ++j) hi[j] = false;
    v ^= hi.count() & 1;
  }
  return v;
}

bool F2QuadSpace::b(const F2Vector& x, const F2Vector& y) const {
  bool v = false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i]) v ^= (b_[i] & y).count() & 1;
  return v;
}

bool F2QuadSpace::nondegenerate() const { return f2_rank(b_, dim()) == dim(); }

F2QuadSpace F2QuadSpace::hyperbolic_plane() {
  std::vector<F2Vector> b(2);
  b[0][1] = b[1][0] = true;
  return F2QuadSpace(b, {false, false});
}

F2QuadSpace F2QuadSpace::anisotropic_plane() {
  std::vector<F2Vector> b(2);
  b[0][1] = b[1][0] = true;
  return F2QuadSpace(b, {true, true});
}

F2QuadSpace mod2_space(const IntegerLattice& l) {
  IntMatrix g = l.integer_gram();
  std::size_t n = l.rank();
  require(n <= kMaxF2Dim, ErrorKind::RankTooLarge, "rank exceeds 128");
  std::vector<F2Vector> b(n);
  std::vector<bool> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(!parity(g(i, i)), ErrorKind::NotEvenUnimodular, "lattice is not even");
    q[i] = parity(Integer(g(i, i) / 2));
    for (std::size_t j = 0; j < n; ++j) b[i][j] = parity(g(i, j));
  }
  return F2QuadSpace(std::move(b), std::move(q));
}

int witt_defect(const F2QuadSpace& s) {
  std::size_t n = s.dim();
  std::vector<F2Vector> rest;
  for (std::size_t i = 0; i < n; ++i) {
    F2Vector e;
    e[i] = true;
    rest.push_back(e);
  }
  bool arf = false;
  while (!rest.empty()) {
    F2Vector x = rest.back();
    rest.pop_back();
    if (x.none()) continue;
    auto it = std::find_if(rest.begin(), rest.end(), [&](const F2Vector& z) { return s.b(x, z); });
    require(it != rest.end(), ErrorKind::Degenerate, "bilinear form has a radical");
    F2Vector y = *it;
    rest.erase(it);
    arf ^= s.q(x) && s.q(y);
    for (auto& z : rest) {
      bool zy = s.b(z, y), zx = s.b(z, x);
      if (zy) z ^= x;
      if (zx) z ^= y;
    }
  }
  return arf ? 1 : 0;
}

IsotropicPair isotropic_complement_pair(const F2QuadSpace& s, std::uint64_t seed) {
  std::size_t n = s.dim();
  require(n % 2 == 0, ErrorKind::Degenerate, "odd dimension");
  require(s.nondegenerate(), ErrorKind::Degenerate, "bilinear form has a radical");
  require(witt_defect(s) == 0, ErrorKind::DefectOne, "Arf invariant is 1; no isotropic complement pair");

  // perm maps search coordinates to space coordinates.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
  }
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;

  IsotropicPair out;
  std::vector<F2Vector> constraints;  // b-rows of chosen vectors, in search coordinates
  auto b_image = [&](const F2Vector& x) {
    F2Vector r;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i]) r ^= s.b_row(i);
    return permute(r, inv);
  };
  for (std::size_t k = 0; k < n / 2; ++k) {
    auto w = echelon_high(nullspace(constraints, n), n);
    // Half of any nondegenerate plane is isotropic, so the scan ends early; the
    // cap only matters for the counter width.
    std::uint64_t limit = w.size() < 64 ? std::uint64_t{1} << w.size() : ~std::uint64_t{0};
    F2Vector e, f;
    bool found = false;
    for (std::uint64_t c = 1; c < limit && !found; ++c) {
      F2Vector x = permute(combination(w, c), perm);
      if (!s.q(x)) e = x, found = true;
    }
    require(found, ErrorKind::NotFound, "no isotropic vector in the complement");
    found = false;
    for (std::uint64_t c = 1; c < limit && !found; ++c) {
      F2Vector x = permute(combination(w, c), perm);
      if (s.b(e, x) && !s.q(x)) f = x, found = true;
    }
    require(found, ErrorKind::NotFound, "no isotropic partner in the complement");
    out.u.push_back(e);
    out.v.push_back(f);
    constraints.push_back(b_image(e));
    constraints.push_back(b_image(f));
  }
  return out;
}

IntMatrix preimage_coords(std::size_t n, const std::vector<F2Vector>& subspace) {
  std::vector<F2Vector> rows;
  std::vector<std::size_t> piv;
  for (auto r : subspace) {
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (r[piv[k]]) r ^= rows[k];
    if (r.none()) continue;
    std::size_t p = 0;
    while (!r[p]) ++p;
    for (auto& o : rows)
      if (o[p]) o ^= r;
    rows.push_back(r);
    piv.push_back(p);
  }
  std::vector<bool> is_piv(n, false);
  for (auto p : piv) is_piv[p] = true;
  IntMatrix out(n, n);
  std::size_t r = 0;
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < n; ++j)
      if (row[j]) out(r, j) = 1;
    ++r;
  }
  for (std::size_t j = 0; j < n; ++j)
    if (!is_piv[j]) out(r++, j) = 2;
  return out;
}

void verify_polarization(const Polarization& p) {
  std::size_t n = p.parent.rank();
  check(is_even_unimodular(p.parent), "parent is even unimodular");
  check(n % 2 == 0, "parent rank is even");
  Integer expected = Integer(1) << (n / 2);
  check(abs(determinant(p.m_coords)) == expected, "[L : M] = 2^(n/2)");
  check(abs(determinant(p.n_coords)) == expected, "[L : N] = 2^(n/2)");

  for (auto* c : {&p.m_coords, &p.n_coords}) {
    IntMatrix g = c == &p.m_coords ? p.m.integer_gram() : p.n.integer_gram();
    for (std::size_t i = 0; i < n; ++i) {
      check(g(i, i) % 4 == 0, "q vanishes on the image mod 2L");
      for (std::size_t j = 0; j < i; ++j) check(!parity(g(i, j)), "image mod 2L is totally isotropic");
    }
  }
  auto mu = rows_mod2(p.m_coords), nu = rows_mod2(p.n_coords);
  check(f2_rank(mu, n) == n / 2 && f2_rank(nu, n) == n / 2, "images mod 2L have dimension n/2");
  std::vector<F2Vector> both = mu;
  both.insert(both.end(), nu.begin(), nu.end());
  check(f2_rank(both, n) == n, "M intersect N = 2L");
  check(is_even_unimodular(half(p.m)), "(M, Q/2) is even unimodular");
  check(is_even_unimodular(half(p.n)), "(N, Q/2) is even unimodular");
}

namespace {

Polarization make_polarization(const IntegerLattice& l, IntMatrix m, IntMatrix nn) {
  Polarization p{l, std::move(m), std::move(nn), l, l};
  p.m = l.change_basis(p.m_coords, l.label() + ".M");
  p.n = l.change_basis(p.n_coords, l.label() + ".N");
  verify_polarization(p);
  return p;
}

}  // namespace

Polarization preimages(const IntegerLattice& l, const IsotropicPair& uv) {
  std::size_t n = l.rank();
  return make_polarization(l, hermite_basis(preimage_coords(n, uv.u)), hermite_basis(preimage_coords(n, uv.v)));
}

Polarization polarization_from_structure(const IntegerLattice& l, const StructurePair& sp) {
  std::size_t n = l.rank();
  require(sp.A.rows() == n && sp.A.cols() == n, ErrorKind::DimensionMismatch, "structure does not match the lattice");
  IntMatrix beta = IntMatrix::identity(n) - sp.A;
  return make_polarization(l, hermite_basis(sp.A), hermite_basis(beta));
}

Polarization swap_halves(Polarization p) {
  std::swap(p.m, p.n);
  std::swap(p.m_coords, p.n_coords);
  return p;
}

IntegerLattice construction_I(const Polarization& p, std::size_t k) {
  require(k >= 1, ErrorKind::InvalidInput, "k must be positive");
  std::size_t n = p.parent.rank();
  std::size_t dim = n * k;
  IntMatrix gens(0, dim);
  std::vector<Integer> row(dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t s = 0; s < k; ++s)
      for (std::size_t j = 0; j < n; ++j) row[s * n + j] = p.n_coords(i, j);
    gens.append_row(row);
  }
  for (std::size_t s = 0; s + 1 < k; ++s)
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(row.begin(), row.end(), 0);
      for (std::size_t j = 0; j < n; ++j) {
        row[s * n + j] = p.m_coords(i, j);
        row[(s + 1) * n + j] = -p.m_coords(i, j);
      }
      gens.append_row(row);
    }
  // 2L sits in every slot, so the lattice contains 2 Z^dim.
  IntMatrix basis = hermite_basis(gens, 2);
  require(basis.rows() == dim, ErrorKind::InvariantFailure, "Construction I generators are not of full rank");

  RatMatrix ambient(dim, dim);
  const RatMatrix& g = p.parent.gram();
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ambient(s * n + i, s * n + j) = g(i, j) / 2;
  auto out = IntegerLattice::from_basis(convert<Rational>(basis), ambient,
                                        "I(" + p.parent.label() + "," + std::to_string(k) + ")");
  require(is_even_unimodular(out), ErrorKind::InvariantFailure, "Construction I result is not even unimodular");
  return out;
}

IntegerLattice neighbor_2(const IntegerLattice& m, std::span<const Rational> w_in, bool require_even) {
  std::size_t n = m.rank();
  std::vector<Rational> w(w_in.begin(), w_in.end());
  for (auto& x : w) x.canonicalize();
  require(w.size() == n, ErrorKind::DimensionMismatch, "w has the wrong length");
  require(n <= kMaxF2Dim, ErrorKind::RankTooLarge, "rank exceeds 128");
  const RatMatrix& g = m.gram();
  F2Vector par;
  for (std::size_t i = 0; i < n; ++i) {
    Rational ip = 0;
    for (std::size_t j = 0; j < n; ++j) ip += w[j] * g(j, i);
    require(ip.get_den() == 1, ErrorKind::WNotAdmissible, "(w, M) is not integral");
    par[i] = parity(ip.get_num());
  }
  std::vector<Integer> w2(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational t = 2 * w[i];
    require(t.get_den() == 1, ErrorKind::WNotAdmissible, "2w is not in M");
    w2[i] = t.get_num();
  }
  require(par.any(), ErrorKind::WNotAdmissible, "(w, M) is even, so M_w = M");
  require(std::any_of(w.begin(), w.end(), [](const Rational& x) { return x.get_den() != 1; }),
          ErrorKind::WNotAdmissible, "w lies in M");
  Rational ww = m.inner(w, w);
  require(ww.get_den() == 1, ErrorKind::WNotAdmissible, "(w, w) is not integral");
  if (require_even) require(!parity(ww), ErrorKind::WNotAdmissible, "(w, w) is odd");

  // M_w is the preimage of the hyperplane par^perp.
  IntMatrix gens = scaled(preimage_coords(n, nullspace({par}, n)), Integer(2));
  gens.append_row(w2);
  RatMatrix basis = convert<Rational>(hermite_basis(gens));
  require(basis.rows() == n, ErrorKind::InvariantFailure, "neighbor has the wrong rank");
  basis = scaled(basis, Rational(1, 2));
  return m.change_basis(basis, m.label() + "^w");
}

}  // namespace lat72
