#include "lat72/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lat72/error.hpp"
#include "lat72/linalg.hpp"

namespace lat72 {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

constexpr long double kRelativeSlack = 1e-9L;

i128 floor_to_i128(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  require(abs(f) < Integer("170141183460469231731687303715884105727"), ErrorKind::InvalidInput, "bound too large");
  // split into two 62-bit halves for portability
  Integer hi, lo;
  const Integer base = Integer(1) << 62;
  mpz_fdiv_qr(hi.get_mpz_t(), lo.get_mpz_t(), f.get_mpz_t(), base.get_mpz_t());
  return static_cast<i128>(hi.get_si()) * (static_cast<i128>(1) << 62) + static_cast<i128>(lo.get_si());
}

Integer to_integer(i128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  Integer hi(static_cast<unsigned long>(u >> 64));
  Integer lo(static_cast<unsigned long>(u & ~0ULL));
  Integer r = (hi << 64) + lo;
  return neg ? Integer(-r) : r;
}

/// Schnorr-Euchner enumeration over a fixed Gram-Schmidt profile with exact
/// re-verification of every candidate.
class Kernel {
 public:
  // Callback receives reduced coordinates and the exact scaled norm; returns false to stop.
  using Leaf = std::function<bool(std::span<const i64>, i128)>;

  Kernel(const GramSchmidt& gs, const Matrix<i64>& rg, std::vector<long double> t, std::vector<i64> tau, i64 d,
         i128 bexact, long double radius, bool symmetric, std::uint64_t budget)
      : gs_(gs), rg_(rg), n_(rg.rows()), t_(std::move(t)), tau_(std::move(tau)), d_(d), bexact_(bexact),
        radius_(radius), symmetric_(symmetric), budget_(budget) {}

  void shrink(i128 bexact, long double radius) {
    bexact_ = bexact;
    radius_ = radius;
  }

  std::uint64_t nodes() const { return nodes_; }
  bool complete() const { return complete_; }

  // Restricts the run to the slice-th value tried for the outermost coordinate.
  void restrict_root(std::int64_t slice) { slice_ = slice; }
  bool more() const { return more_; }

  void run(const Leaf& leaf) {
    const std::size_t n = n_;
    x_.assign(n, 0);
    dx_.assign(n, 0);
    ddx_.assign(n, 0);
    center_.assign(n, 0);
    l_.assign(n + 1, 0);
    allzero_.assign(n + 1, 1);
    sig_ = Matrix<long double>(n, n + 1);
    dirty_.assign(n, n - 1);
    vfix_.assign(n, 0);
    if (n == 1) {
      bulk_level0(leaf, 0.0L, true);
      return;
    }
    std::size_t k = n - 1;
    center_[k] = -t_[k];
    start_level(k);
    while (true) {
      if (budget_ && ++nodes_ > budget_) {
        complete_ = false;
        return;
      } else if (!budget_) {
        ++nodes_;
      }
      const long double z = (static_cast<long double>(x_[k]) - center_[k]);
      const long double nl = l_[k + 1] + gs_.rr[k] * z * z;
      if (nl <= radius_) {
        if (slice_ >= 0 && k == n - 1 && top_index_ != slice_) {
          if (top_index_ > slice_) {
            more_ = true;
            return;
          }
          next_sibling(k);
          continue;
        }
        allzero_[k] = allzero_[k + 1] && x_[k] == 0;
        if (k == 1) {
          l_[1] = nl;
          refresh_row(0);
          center_[0] = -(t_[0] + sig_(0, 1));
          if (!bulk_level0(leaf, nl, allzero_[1])) {
            complete_ = false;
            return;
          }
        } else {
          l_[k] = nl;
          const std::size_t i = k - 1;
          refresh_row(i);
          center_[i] = -(t_[i] + sig_(i, i + 1));
          k = i;
          start_level(k);
          continue;
        }
      } else {
        ++k;
        if (k == n) return;
      }
      next_sibling(k);
    }
  }

 private:
  void start_level(std::size_t k) {
    if (symmetric_ && allzero_[k + 1]) {
      x_[k] = 0;
      dx_[k] = ddx_[k] = 0;
    } else {
      x_[k] = std::llround(center_[k]);
      ddx_[k] = (center_[k] >= static_cast<long double>(x_[k])) ? 1 : -1;
      dx_[k] = ddx_[k];
    }
  }

  void next_sibling(std::size_t k) {
    if (symmetric_ && allzero_[k + 1]) {
      ++x_[k];
    } else {
      x_[k] += dx_[k];
      ddx_[k] = -ddx_[k];
      dx_[k] = ddx_[k] - dx_[k];
    }
    if (k > 0) dirty_[k - 1] = std::max(dirty_[k - 1], k);
    if (k + 1 == n_) ++top_index_;
  }

  // Brings sig_(i, i+1) = sum_{j > i} mu(j, i) * y_j up to date.
  void refresh_row(std::size_t i) {
    if (i + 1 < n_) {
      dirty_[i] = std::max(dirty_[i], dirty_[i + 1]);
      dirty_[i + 1] = i + 1;
    }
    for (std::size_t j = dirty_[i]; j > i; --j)
      sig_(i, j) = sig_(i, j + 1) + gs_.mu(j, i) * (static_cast<long double>(x_[j]) + t_[j]);
  }

  bool bulk_level0(const Leaf& leaf, long double partial, bool above_zero) {
    const long double c = -(t_[0] + (n_ > 1 ? sig_(0, 1) : 0.0L));
    const long double rem = radius_ - partial;
    if (rem < 0) return true;
    const long double w = std::sqrt(rem / gs_.rr[0]) * (1 + kRelativeSlack) + 1e-12L;
    i64 lo = static_cast<i64>(std::ceil(c - w));
    i64 hi = static_cast<i64>(std::floor(c + w));
    if (symmetric_ && above_zero) lo = std::max<i64>(lo, 1);
    if (lo > hi) return true;
    // Exact norm as a quadratic in the level-0 coordinate: v = tau + d * x.
    i128 rest = 0, cross = 0;
    for (std::size_t i = 1; i < n_; ++i) vfix_[i] = static_cast<i128>(tau_[i]) + static_cast<i128>(d_) * x_[i];
    for (std::size_t i = 1; i < n_; ++i) {
      if (vfix_[i] == 0) continue;
      i128 row = 0;
      for (std::size_t j = 1; j < n_; ++j) row += static_cast<i128>(rg_(i, j)) * vfix_[j];
      rest += vfix_[i] * row;
      cross += static_cast<i128>(rg_(0, i)) * vfix_[i];
    }
    for (i64 x0 = lo; x0 <= hi; ++x0) {
      const i128 v0 = static_cast<i128>(tau_[0]) + static_cast<i128>(d_) * x0;
      const i128 norm = rest + 2 * v0 * cross + v0 * v0 * rg_(0, 0);
      if (norm > bexact_) continue;
      x_[0] = x0;
      if (!leaf(x_, norm)) return false;
    }
    return true;
  }

  const GramSchmidt& gs_;
  const Matrix<i64>& rg_;
  std::size_t n_;
  std::vector<long double> t_;
  std::vector<i64> tau_;
  i64 d_;
  i128 bexact_;
  long double radius_;
  bool symmetric_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool complete_ = true;
  std::int64_t slice_ = -1;
  std::int64_t top_index_ = 0;
  bool more_ = false;

  std::vector<i64> x_, dx_, ddx_;
  std::vector<long double> center_, l_;
  std::vector<char> allzero_;
  Matrix<long double> sig_;
  std::vector<std::size_t> dirty_;
  std::vector<i128> vfix_;
};

}  // namespace

std::uint64_t ShortVectorReport::total() const {
  std::uint64_t s = 0;
  for (const auto& [k, v] : count_by_norm) s += v;
  return s;
}

std::uint64_t ShortVectorReport::count(const Rational& norm) const {
  auto it = count_by_norm.find(norm);
  return it == count_by_norm.end() ? 0 : it->second;
}

std::optional<Rational> ShortVectorReport::min_norm() const {
  if (count_by_norm.empty()) return std::nullopt;
  return count_by_norm.begin()->first;
}

void ShortVectorReport::require_complete() const {
  if (!complete) throw Error(ErrorKind::BudgetExceeded, "enumeration node budget exhausted");
}

Enumerator::Enumerator(const IntegerLattice& l, const ReductionQuality& q) : lattice_(l), n_(l.rank()) {
  ScaledGram sg = ScaledGram::from(l);
  den_ = sg.den;
  rg_ = sg.g;
  tr_ = Matrix<i64>(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) tr_(i, i) = 1;
  reduce_gram(rg_, tr_, q);
  transform_ = IntMatrix(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) transform_(i, j) = static_cast<long>(tr_(i, j));
  auto inv = inverse(convert<Rational>(transform_));
  require(inv.has_value(), ErrorKind::InvariantFailure, "reduction transform is singular");
  tinv_ = *inv;
  require(is_integral(tinv_), ErrorKind::InvariantFailure, "reduction transform is not unimodular");
  // Exact check that the reduced Gram is the conjugated original.
  IntMatrix og = to_integer(scaled(l.gram(), Rational(den_)));
  IntMatrix conj = transform_ * og * transform_.transpose();
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      require(conj(i, j) == static_cast<long>(rg_(i, j)), ErrorKind::InvariantFailure, "reduced Gram mismatch");
  gs_ = gram_schmidt(rg_, den_.get_d());
}

ShortVectorReport Enumerator::visit(std::span<const Rational> t, const Rational& bound, bool symmetric,
                                    const Visitor& visitor, std::uint64_t node_budget) const {
  bool more = false;
  return visit_impl(t, bound, symmetric, visitor, node_budget, -1, more);
}

ShortVectorReport Enumerator::visit_slice(std::span<const Rational> t, const Rational& bound, bool symmetric,
                                          const Visitor& visitor, std::size_t slice, bool& more,
                                          std::uint64_t node_budget) const {
  return visit_impl(t, bound, symmetric, visitor, node_budget, static_cast<std::int64_t>(slice), more);
}

ShortVectorReport Enumerator::visit_impl(std::span<const Rational> t, const Rational& bound, bool symmetric,
                                         const Visitor& visitor, std::uint64_t node_budget, std::int64_t slice,
                                         bool& more) const {
  require(bound >= 0, ErrorKind::InvalidInput, "enumeration bound must be non-negative");
  ShortVectorReport rep;
  rep.bound = bound;
  more = false;
  if (slice > 0 && n_ == 1) return rep;  // a one-dimensional search is a single slice
  // Reduced coordinates of the center, split into integer shift and fractional part.
  std::vector<Rational> tred(n_, Rational(0));
  bool zero_center = true;
  if (!t.empty()) {
    require(t.size() == n_, ErrorKind::DimensionMismatch, "coset center has wrong length");
    for (std::size_t j = 0; j < n_; ++j) {
      Rational s = 0;
      for (std::size_t i = 0; i < n_; ++i)
        if (t[i] != 0) s += t[i] * tinv_(i, j);
      tred[j] = s;
    }
  }
  std::vector<i64> shift(n_, 0);
  Integer d = 1;
  for (std::size_t j = 0; j < n_; ++j) {
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), tred[j].get_num_mpz_t(), tred[j].get_den_mpz_t());
    shift[j] = f.get_si();
    tred[j] -= f;
    if (tred[j] != 0) zero_center = false;
    mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), tred[j].get_den_mpz_t());
  }
  require(d.fits_slong_p(), ErrorKind::InvalidInput, "coset center denominator too large");
  symmetric = symmetric && zero_center;
  std::vector<long double> tf(n_);
  std::vector<i64> tau(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    tf[j] = static_cast<long double>(tred[j].get_d());
    Integer tj = tred[j].get_num() * (d / tred[j].get_den());
    tau[j] = tj.get_si();
  }
  const Integer scale = den_ * d * d;
  const i128 bexact = floor_to_i128(bound * scale);
  const long double radius = static_cast<long double>(bound.get_d()) * (1 + kRelativeSlack) + 1e-12L;

  Kernel kernel(gs_, rg_, tf, tau, d.get_si(), bexact, radius, symmetric, node_budget);
  if (slice >= 0 && n_ > 1) kernel.restrict_root(slice);
  std::vector<i64> xorig(n_);
  kernel.run([&](std::span<const i64> xr, i128 nscaled) {
    Rational norm(to_integer(nscaled), scale);
    norm.canonicalize();
    rep.count_by_norm[norm] += symmetric ? 2 : 1;
    if (!visitor) return true;
    for (std::size_t j = 0; j < n_; ++j) {
      i128 s = 0;
      for (std::size_t i = 0; i < n_; ++i) s += static_cast<i128>(xr[i] - shift[i]) * tr_(i, j);
      xorig[j] = static_cast<i64>(s);
    }
    return visitor(xorig, norm);
  });
  rep.nodes = kernel.nodes();
  rep.complete = kernel.complete();
  more = slice >= 0 && n_ > 1 && kernel.more();
  return rep;
}

namespace {

ShortVectorReport collect(const Enumerator& e, std::span<const Rational> t, const Rational& bound, bool symmetric,
                          const EnumOptions& opt) {
  std::vector<std::pair<std::vector<i64>, LatticeVector>> found;
  const IntMatrix& tr = e.transform();
  auto rinv = inverse(convert<Rational>(tr));
  Enumerator::Visitor vis;
  if (opt.collect_vectors) {
    vis = [&](std::span<const i64> x, const Rational& norm) {
      LatticeVector v;
      v.coords.reserve(x.size());
      for (auto c : x) v.coords.emplace_back(static_cast<long>(c));
      v.norm = norm;
      // reduced coordinates for deterministic ordering
      std::vector<i64> red(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) {
        Rational s = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (x[i] != 0) s += Rational(static_cast<long>(x[i])) * (*rinv)(i, j);
        red[j] = s.get_num().get_si();
      }
      found.emplace_back(std::move(red), std::move(v));
      return true;
    };
  }
  ShortVectorReport rep = e.visit(t, bound, symmetric, vis, opt.node_budget);
  if (opt.collect_vectors) {
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    rep.vectors.reserve(found.size());
    for (auto& f : found) rep.vectors.push_back(std::move(f.second));
  }
  return rep;
}

}  // namespace

ShortVectorReport Enumerator::short_vectors(const Rational& bound, const EnumOptions& opt) const {
  return collect(*this, {}, bound, true, opt);
}

ShortVectorReport Enumerator::coset_vectors(std::span<const Rational> t, const Rational& bound,
                                            const EnumOptions& opt) const {
  std::vector<Rational> tt(t.begin(), t.end());
  if (tt.empty()) tt.assign(n_, Rational(0));
  return collect(*this, tt, bound, false, opt);
}

ShortVectorReport short_vectors(const IntegerLattice& l, const Rational& bound, const EnumOptions& opt) {
  return Enumerator(l, opt.reduction).short_vectors(bound, opt);
}

ShortVectorReport coset_short_vectors(const IntegerLattice& l, std::span<const Rational> t, const Rational& bound,
                                      const EnumOptions& opt) {
  return Enumerator(l, opt.reduction).coset_vectors(t, bound, opt);
}

Rational minimum(const Enumerator& e) {
  // The shortest reduced basis vector bounds the minimum from above.
  const auto& rg = e.reduced_gram();
  i64 best = rg(0, 0);
  for (std::size_t i = 1; i < e.dim(); ++i) best = std::min(best, rg(i, i));
  Rational bound(Integer(static_cast<long>(best)), e.denominator());
  bound.canonicalize();
  // Try successively tighter ranges first: most minima equal the basis bound.
  ShortVectorReport rep = e.short_vectors(bound);
  auto m = rep.min_norm();
  require(m.has_value(), ErrorKind::InvariantFailure, "minimum: enumeration found no vector at the basis bound");
  return *m;
}

Rational minimum(const IntegerLattice& l, const ReductionQuality& q) { return minimum(Enumerator(l, q)); }

void write_vector_dump(std::ostream& os, const std::string& gram_hash, const ShortVectorReport& r) {
  os << "# gram-sha256: " << gram_hash << '\n';
  os << "# bound: " << format_rational(r.bound) << '\n';
  os << "# complete: " << (r.complete ? "true" : "false") << '\n';
  os << "# vectors: " << r.vectors.size() << '\n';
  for (const auto& v : r.vectors) {
    for (std::size_t i = 0; i < v.coords.size(); ++i) {
      if (i) os << ' ';
      os << v.coords[i].get_str();
    }
    os << '\n';
  }
}

}  // namespace lat72
