#include "lat72/hermitian.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "lat72/enumerate.hpp"
#include "lat72/error.hpp"
#include "lat72/linalg.hpp"

namespace lat72 {

namespace {

using i64 = std::int64_t;

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Action of alpha on the trace basis (b_1, alpha b_1, ...): alpha * alpha b = -2 b + alpha b.
IntMatrix alpha_action(std::size_t r) {
  IntMatrix a(2 * r, 2 * r);
  for (std::size_t i = 0; i < r; ++i) {
    a(2 * i, 2 * i + 1) = 1;
    a(2 * i + 1, 2 * i) = -2;
    a(2 * i + 1, 2 * i + 1) = 1;
  }
  return a;
}

// Expands K-coordinates (rows over Q(alpha), length r) into Q-coordinates on (b_1, alpha b_1, ...).
RatMatrix expand(const QAMatrix& m) {
  RatMatrix out(m.rows(), 2 * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(i, 2 * j) = m(i, j).a;
      out(i, 2 * j + 1) = m(i, j).b;
    }
  return out;
}

}  // namespace

QA inverse(const QA& x) {
  require(!x.is_zero(), ErrorKind::InvalidInput, "division by zero in Q(alpha)");
  const Rational n = x.norm();
  QA c = x.conj();
  return {c.a / n, c.b / n};
}

std::pair<ZA, ZA> divmod(const ZA& x, const ZA& y) {
  require(!y.is_zero(), ErrorKind::InvalidInput, "division by zero in Z[alpha]");
  const ZA num = x * y.conj();
  const Integer n = y.norm();
  const Integer a0 = floor_div(num.a, n), b0 = floor_div(num.b, n);
  ZA best_q, best_r;
  bool have = false;
  for (int da = 0; da <= 1; ++da)
    for (int db = 0; db <= 1; ++db) {
      ZA q(a0 + da, b0 + db);
      ZA r = x - q * y;
      if (!have || r.norm() < best_r.norm()) {
        best_q = q;
        best_r = r;
        have = true;
      }
    }
  if (!(best_r.norm() < n)) throw Error(ErrorKind::InvariantFailure, "Euclidean division failed in Z[alpha]");
  return {best_q, best_r};
}

bool is_integral(const QA& x) { return x.a.get_den() == 1 && x.b.get_den() == 1; }

ZA to_integral(const QA& x) {
  require(is_integral(x), ErrorKind::NonIntegralResult, "element of Q(alpha) is not integral: " + to_string(x));
  return {x.a.get_num(), x.b.get_num()};
}

std::string to_string(const QA& x) {
  if (x.b == 0) return format_rational(x.a);
  return format_rational(x.a) + ":" + format_rational(x.b);
}

QA parse_qa(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return QA(parse_rational(s), Rational(0));
  return QA(parse_rational(s.substr(0, colon)), parse_rational(s.substr(colon + 1)));
}

QAMatrix conj_transpose(const QAMatrix& m) {
  QAMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j).conj();
  return t;
}

std::optional<QAMatrix> inverse(const QAMatrix& in) {
  require(in.square(), ErrorKind::DimensionMismatch, "inverse of non-square matrix");
  const std::size_t n = in.rows();
  QAMatrix m = in, inv = QAMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c).is_zero()) ++p;
    if (p == n) return std::nullopt;
    m.swap_rows(c, p);
    inv.swap_rows(c, p);
    const QA f = inverse(m(c, c));
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) *= f;
      inv(c, j) *= f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m(i, c).is_zero()) continue;
      const QA g = m(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= g * m(c, j);
        inv(i, j) -= g * inv(c, j);
      }
    }
  }
  return inv;
}

QA determinant(const QAMatrix& in) {
  require(in.square(), ErrorKind::DimensionMismatch, "determinant of non-square matrix");
  const std::size_t n = in.rows();
  QAMatrix m = in;
  QA det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c).is_zero()) ++p;
    if (p == n) return 0;
    if (p != c) {
      m.swap_rows(c, p);
      det = -det;
    }
    det *= m(c, c);
    const QA f = inverse(m(c, c));
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c).is_zero()) continue;
      const QA g = m(i, c) * f;
      for (std::size_t j = c; j < n; ++j) m(i, j) -= g * m(c, j);
    }
  }
  return det;
}

HermitianLattice::HermitianLattice(QAMatrix hgram, std::string label) : h_(std::move(hgram)), label_(std::move(label)) {
  require(h_.square() && h_.rows() > 0, ErrorKind::InvalidInput, "Hermitian Gram must be square and non-empty");
  for (std::size_t i = 0; i < rank(); ++i) {
    require(h_(i, i).is_rational(), ErrorKind::InvalidInput, "Hermitian Gram has a non-rational diagonal entry");
    for (std::size_t j = 0; j < i; ++j)
      require(h_(i, j) == h_(j, i).conj(), ErrorKind::InvalidInput, "Hermitian Gram is not conjugate-symmetric");
  }
  // Positive definiteness of h is that of its trace form.
  (void)trace_lattice(*this, 1);
}

HermitianLattice::HermitianLattice(QAMatrix hgram, QAMatrix basis, QAMatrix ambient_form, std::string label)
    : HermitianLattice(std::move(hgram), std::move(label)) {
  require(basis.rows() == rank() && basis.cols() == ambient_form.rows() && ambient_form.square(),
          ErrorKind::DimensionMismatch, "Hermitian basis shape does not match");
  require(basis * ambient_form * conj_transpose(basis) == h_, ErrorKind::InvalidInput,
          "Hermitian basis does not reproduce the Gram matrix");
  basis_ = std::move(basis);
  form_ = std::move(ambient_form);
}

HermitianLattice barnes() {
  const QA one = 1, al = QA::alpha(), be = QA::beta(), two = 2;
  QAMatrix basis{{one, one, al}, {0, be, be}, {0, 0, two}};
  QAMatrix form = QAMatrix::identity(3);
  for (std::size_t i = 0; i < 3; ++i) form(i, i) = QA(Rational(1, 2), Rational(0));
  QAMatrix h = basis * form * conj_transpose(basis);
  return HermitianLattice(std::move(h), std::move(basis), std::move(form), "Barnes");
}

IntegerLattice trace_lattice(const HermitianLattice& p, const Rational& s, bool require_integral) {
  require(s > 0, ErrorKind::InvalidInput, "trace scale must be positive");
  const std::size_t r = p.rank();
  const QA lam[2] = {QA(1), QA::alpha()};
  RatMatrix g(2 * r, 2 * r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) g(2 * i + x, 2 * j + y) = s * (lam[x] * lam[y].conj() * p.hgram()(i, j)).trace();
  if (require_integral && !is_integral(g))
    throw Error(ErrorKind::NonIntegralResult, "trace lattice at scale " + format_rational(s) + " is not integral");
  return IntegerLattice(std::move(g), p.label().empty() ? std::string() : "tr(" + p.label() + ")");
}

HermitianLattice hermitian_dual(const HermitianLattice& p) {
  auto inv = inverse(p.hgram());
  require(inv.has_value(), ErrorKind::InvalidInput, "Hermitian Gram is singular");
  std::string label = p.label().empty() ? std::string() : p.label() + "*";
  if (p.basis()) return HermitianLattice(*inv, *inv * *p.basis(), *p.ambient_form(), label);
  return HermitianLattice(*inv, label);
}

bool same_module(const HermitianLattice& p, const HermitianLattice& q) {
  require(p.basis() && q.basis(), ErrorKind::StructureMismatch, "same_module needs explicit bases");
  require(*p.ambient_form() == *q.ambient_form(), ErrorKind::StructureMismatch, "ambient forms differ");
  if (p.rank() != q.rank() || !p.basis()->square()) return false;
  auto pinv = inverse(*p.basis());
  auto qinv = inverse(*q.basis());
  if (!pinv || !qinv) return false;
  const QAMatrix x = *q.basis() * *pinv, y = *p.basis() * *qinv;
  return std::all_of(x.data().begin(), x.data().end(), [](const QA& v) { return is_integral(v); }) &&
         std::all_of(y.data().begin(), y.data().end(), [](const QA& v) { return is_integral(v); });
}

bool trace_dual_check(const HermitianLattice& p, const Rational& s) {
  const std::size_t r = p.rank();
  IntegerLattice t = trace_lattice(p, s);
  auto ginv = inverse(t.gram());
  require(ginv.has_value(), ErrorKind::InvalidInput, "trace Gram is singular");
  // Rows of G^{-1}: the Z-dual basis in coordinates of (b_1, alpha b_1, ...).
  const RatMatrix& x = *ginv;
  // (1 / (s sqrt(-7))) lambda b*_j, with b*_j = sum_k (H^{-1})_{jk} b_k.
  auto hinv = inverse(p.hgram());
  require(hinv.has_value(), ErrorKind::InvalidInput, "Hermitian Gram is singular");
  const QA c = inverse(sqrt_minus7()) * QA(1 / s, Rational(0));
  QAMatrix twisted(2 * r, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < r; ++k) {
      twisted(2 * j, k) = c * (*hinv)(j, k);
      twisted(2 * j + 1, k) = QA::alpha() * c * (*hinv)(j, k);
    }
  const RatMatrix y = expand(twisted);
  auto yinv = inverse(y);
  if (!yinv) return false;
  const RatMatrix u = x * *yinv;
  if (!is_integral(u)) return false;
  const Rational d = determinant(u);
  return d == 1 || d == -1;
}

HermitianLattice hermitian_tensor(const HermitianLattice& p, const HermitianLattice& q) {
  const std::size_t r1 = p.rank(), r2 = q.rank();
  QAMatrix h(r1 * r2, r1 * r2);
  for (std::size_t i = 0; i < r1; ++i)
    for (std::size_t j = 0; j < r2; ++j)
      for (std::size_t k = 0; k < r1; ++k)
        for (std::size_t l = 0; l < r2; ++l) h(i * r2 + j, k * r2 + l) = p.hgram()(i, k) * q.hgram()(j, l);
  return HermitianLattice(std::move(h), p.label() + "(x)" + q.label());
}

HermitianLattice galois_conjugate(const HermitianLattice& p) {
  QAMatrix h = p.hgram();
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) = h(i, j).conj();
  return HermitianLattice(std::move(h), p.label().empty() ? std::string() : "conj(" + p.label() + ")");
}

std::vector<std::string> structure_violations(const StructurePair& sp) {
  const std::size_t n = sp.F.rows();
  require(sp.F.square() && sp.A.square() && sp.A.rows() == n, ErrorKind::DimensionMismatch,
          "structure matrices must be square of equal size");
  require(n % 2 == 0, ErrorKind::DimensionMismatch, "structure needs even dimension");
  std::vector<std::string> bad;
  const IntMatrix id = IntMatrix::identity(n);
  if (sp.A * sp.F * sp.A.transpose() != scaled(sp.F, 2)) bad.emplace_back("AFA^t = 2F");
  // F A^t F^{-1} = 1 - A  <=>  F A^t = (1 - A) F.
  if (sp.F * sp.A.transpose() != (id - sp.A) * sp.F) bad.emplace_back("F A^t F^-1 = 1 - A");
  if (sp.A * sp.A - sp.A + scaled(id, 2) != IntMatrix(n, n)) bad.emplace_back("A^2 - A + 2 = 0");
  if (determinant(sp.F) == 0) bad.emplace_back("F nonsingular");
  return bad;
}

bool validate_structure(const StructurePair& sp) { return structure_violations(sp).empty(); }

void write_structure(std::ostream& os, const StructurePair& sp) {
  write_gram(os, convert<Rational>(sp.F));
  os << "STRUCTURE\n";
  write_gram(os, convert<Rational>(sp.A));
}

StructurePair read_structure(std::istream& is) {
  RatMatrix f = read_gram(is);
  std::string line;
  while (std::getline(is, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    require(line.compare(b, 9, "STRUCTURE") == 0, ErrorKind::InvalidInput, "expected STRUCTURE marker");
    break;
  }
  RatMatrix a = read_gram(is);
  require(is_integral(f) && is_integral(a), ErrorKind::InvalidInput, "structure matrices must be integral");
  StructurePair sp{to_integer(f), to_integer(a)};
  auto bad = structure_violations(sp);
  if (!bad.empty()) throw Error(ErrorKind::InvalidWitness, "structure file violates " + bad.front());
  return sp;
}

StructurePair load_structure(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::InvalidInput, "cannot open structure file " + path);
  return read_structure(in);
}

namespace {

// Lattice vectors of a given norm, both signs, as int64 coordinates.
std::vector<std::vector<i64>> vectors_of_norm(const Enumerator& e, const Rational& norm) {
  std::vector<std::vector<i64>> out;
  e.visit({}, norm, true, [&](std::span<const i64> x, const Rational& n) {
    if (n == norm) {
      out.emplace_back(x.begin(), x.end());
      std::vector<i64> m(x.begin(), x.end());
      for (auto& v : m) v = -v;
      out.push_back(std::move(m));
    }
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

Matrix<i64> to_i64(const IntMatrix& m) {
  Matrix<i64> r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      require(m(i, j).fits_slong_p(), ErrorKind::InvalidInput, "entry too large");
      r(i, j) = m(i, j).get_si();
    }
  return r;
}

std::vector<i64> row_times(std::span<const i64> x, const Matrix<i64>& m) {
  std::vector<i64> y(m.cols(), 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i])
      for (std::size_t j = 0; j < m.cols(); ++j) y[j] += x[i] * m(i, j);
  return y;
}

i64 dot64(std::span<const i64> a, std::span<const i64> b) {
  i64 s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Backtracking over images v_i of a Z[alpha]-basis s_i under a map g with
// g(s_i A_src) = v_i A_dst, preserving the bilinear form.
class ImageSearch {
 public:
  using Found = std::function<bool(const std::vector<std::vector<i64>>&)>;

  ImageSearch(const IntegerLattice& l, const IntMatrix& src, const IntMatrix& a_src, const IntMatrix& a_dst,
              std::uint64_t budget)
      : g_(to_i64(l.integer_gram())), adst_(to_i64(a_dst)), r_(src.rows()), budget_(budget) {
    const Matrix<i64> s = to_i64(src), as = to_i64(a_src);
    std::vector<std::vector<i64>> sg(r_), sag(r_);
    for (std::size_t i = 0; i < r_; ++i) {
      sg[i] = row_times(s.row(i), g_);
      sag[i] = row_times(row_times(s.row(i), as), g_);
    }
    t_.assign(r_, std::vector<i64>(r_));
    u_.assign(r_, std::vector<i64>(r_));
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < r_; ++j) {
        t_[i][j] = dot64(sg[i], s.row(j));
        u_[i][j] = dot64(sag[i], s.row(j));
      }
    Enumerator e(l);
    std::map<i64, std::vector<std::vector<i64>>> pool;
    cand_.resize(r_);
    for (std::size_t i = 0; i < r_; ++i) {
      auto it = pool.find(t_[i][i]);
      if (it == pool.end()) it = pool.emplace(t_[i][i], vectors_of_norm(e, Rational(static_cast<long>(t_[i][i])))).first;
      for (const auto& v : it->second) {
        Cand c{v, row_times(v, g_), row_times(row_times(v, adst_), g_)};
        if (dot64(c.vadg, v) == u_[i][i]) cand_[i].push_back(std::move(c));
      }
    }
  }

  // Returns false when the node budget ran out.
  bool run(const Found& found) {
    chosen_.assign(r_, nullptr);
    stop_ = false;
    return descend(0, found);
  }

  std::size_t candidates(std::size_t i) const { return cand_[i].size(); }

 private:
  struct Cand {
    std::vector<i64> v, vg, vadg;  // v, v G, v A_dst G
  };

  bool descend(std::size_t i, const Found& found) {
    if (i == r_) {
      std::vector<std::vector<i64>> imgs;
      for (auto* c : chosen_) imgs.push_back(c->v);
      if (!found(imgs)) stop_ = true;
      return true;
    }
    for (const auto& c : cand_[i]) {
      if (stop_) return true;
      if (budget_ && ++nodes_ > budget_) return false;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        const Cand& p = *chosen_[j];
        ok = dot64(c.vg, p.v) == t_[i][j] && dot64(c.vadg, p.v) == u_[i][j] && dot64(p.vadg, c.v) == u_[j][i];
      }
      if (!ok) continue;
      chosen_[i] = &c;
      if (!descend(i + 1, found)) return false;
    }
    return true;
  }

  Matrix<i64> g_, adst_;
  std::size_t r_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool stop_ = false;
  std::vector<std::vector<i64>> t_, u_;
  std::vector<std::vector<Cand>> cand_;
  std::vector<const Cand*> chosen_;
};

// Map matrix M with C M = V, where C has rows (s_i, s_i A_src) and V rows (v_i, v_i A_dst).
std::optional<IntMatrix> map_from_images(const IntMatrix& src, const IntMatrix& a_src, const IntMatrix& a_dst,
                                         const std::vector<std::vector<i64>>& imgs) {
  const std::size_t r = src.rows(), n = src.cols();
  IntMatrix c(2 * r, n), v(2 * r, n);
  const IntMatrix sa = src * a_src;
  for (std::size_t i = 0; i < r; ++i) {
    IntMatrix vi(1, n);
    for (std::size_t j = 0; j < n; ++j) vi(0, j) = static_cast<long>(imgs[i][j]);
    IntMatrix via = vi * a_dst;
    for (std::size_t j = 0; j < n; ++j) {
      c(2 * i, j) = src(i, j);
      c(2 * i + 1, j) = sa(i, j);
      v(2 * i, j) = vi(0, j);
      v(2 * i + 1, j) = via(0, j);
    }
  }
  auto cinv = inverse(convert<Rational>(c));
  if (!cinv) return std::nullopt;
  RatMatrix m = *cinv * convert<Rational>(v);
  if (!is_integral(m)) return std::nullopt;
  return to_integer(m);
}

std::vector<long> key_of(const IntMatrix& m) {
  std::vector<long> k;
  k.reserve(m.data().size());
  for (const auto& v : m.data()) k.push_back(v.get_si());
  return k;
}

// Closure of the group generated by gens (BFS); used to pick a small generating set.
std::set<std::vector<long>> closure(const std::vector<IntMatrix>& gens, std::size_t n) {
  std::set<std::vector<long>> seen;
  std::vector<IntMatrix> frontier{IntMatrix::identity(n)};
  seen.insert(key_of(frontier[0]));
  while (!frontier.empty()) {
    std::vector<IntMatrix> next;
    for (const auto& g : frontier)
      for (const auto& h : gens) {
        IntMatrix p = g * h;
        if (seen.insert(key_of(p)).second) next.push_back(std::move(p));
      }
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace

StructurePair find_structure(const IntegerLattice& l, const FindOptions& opt) {
  require(l.rank() % 2 == 0, ErrorKind::PreconditionViolated, "find_structure needs even rank");
  require(is_even(l), ErrorKind::PreconditionViolated, "find_structure needs an even lattice");
  require(l.determinant().get_num() % 2 != 0, ErrorKind::PreconditionViolated,
          "find_structure needs odd determinant");
  const std::size_t n = l.rank();
  const IntMatrix f = l.integer_gram();
  const Matrix<i64> g = to_i64(f);
  Enumerator e(l);
  std::map<i64, std::vector<std::vector<i64>>> pool;
  std::mt19937_64 rng(opt.seed);
  auto candidates = [&](std::size_t j) {
    const i64 fjj = g(j, j);
    auto it = pool.find(fjj);
    if (it == pool.end()) {
      auto vs = vectors_of_norm(e, Rational(static_cast<long>(2 * fjj)));
      std::shuffle(vs.begin(), vs.end(), rng);
      it = pool.emplace(fjj, std::move(vs)).first;
    }
    std::vector<std::vector<i64>> out;
    for (const auto& v : it->second) {
      i64 s = 0;
      for (std::size_t k = 0; k < n; ++k) s += v[k] * g(k, j);
      if (2 * s == fjj) out.push_back(v);
    }
    return out;
  };
  // Known pairs (x, x A) spanning W; A is determined on W by v A = v - 2 e.
  struct Choice {
    std::size_t index;
    std::vector<i64> image;
  };
  std::vector<Choice> chosen;
  std::uint64_t nodes = 0;
  std::optional<StructurePair> result;

  auto span_rows = [&](const std::vector<Choice>& cs) {
    RatMatrix m(0, n);
    for (const auto& c : cs) {
      std::vector<Rational> ei(n, Rational(0)), vi(n);
      ei[c.index] = 1;
      for (std::size_t k = 0; k < n; ++k) vi[k] = Rational(static_cast<long>(c.image[k]));
      m.append_row(ei);
      m.append_row(vi);
    }
    return m;
  };
  auto inner = [&](std::span<const i64> a, std::span<const i64> b) {
    i64 s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (a[i])
        for (std::size_t j = 0; j < n; ++j) s += a[i] * g(i, j) * b[j];
    return s;
  };
  auto finish = [&]() -> std::optional<StructurePair> {
    RatMatrix x = span_rows(chosen), y(0, n);
    for (const auto& c : chosen) {
      std::vector<Rational> vi(n), ai(n);
      for (std::size_t k = 0; k < n; ++k) {
        vi[k] = Rational(static_cast<long>(c.image[k]));
        ai[k] = vi[k] - (k == c.index ? Rational(2) : Rational(0));
      }
      y.append_row(vi);
      y.append_row(ai);
    }
    auto xinv = inverse(x);
    if (!xinv) return std::nullopt;
    RatMatrix a = *xinv * y;
    if (!is_integral(a)) return std::nullopt;
    StructurePair sp{f, to_integer(a)};
    if (!validate_structure(sp)) return std::nullopt;
    return sp;
  };

  std::function<bool()> search = [&]() -> bool {
    RatMatrix w = span_rows(chosen);
    if (w.rows() == n) {
      result = finish();
      return result.has_value();
    }
    // Next basis vector outside W.
    std::size_t j = 0;
    const std::size_t rk = w.rows() ? rank(w) : 0;
    for (; j < n; ++j) {
      RatMatrix t = w;
      std::vector<Rational> ej(n, Rational(0));
      ej[j] = 1;
      t.append_row(ej);
      if (rank(t) > rk) break;
    }
    std::vector<i64> ej(n, 0);
    ej[j] = 1;
    for (const auto& v : candidates(j)) {
      if (opt.node_budget && ++nodes > opt.node_budget) return false;
      bool ok = true;
      for (const auto& c : chosen) {
        std::vector<i64> ec(n, 0);
        ec[c.index] = 1;
        if (inner(v, c.image) != 2 * g(j, c.index) || inner(v, ec) + inner(c.image, ej) != g(j, c.index)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      chosen.push_back({j, v});
      RatMatrix w2 = span_rows(chosen);
      if (rank(w2) == w2.rows() && search()) return true;
      chosen.pop_back();
      if (opt.node_budget && nodes > opt.node_budget) return false;
    }
    return false;
  };
  search();
  if (!result) throw Error(ErrorKind::NotFound, "no structure found within the node budget");
  return *result;
}

HermitianFromStructure hermitian_from_structure(const IntegerLattice& l, const StructurePair& sp,
                                                const Rational& s) {
  auto bad = structure_violations(sp);
  require(bad.empty(), ErrorKind::InvalidWitness, bad.empty() ? "" : "structure violates " + bad.front());
  require(l.integral() && l.integer_gram() == sp.F, ErrorKind::StructureMismatch, "structure F differs from the Gram");
  const std::size_t n = l.rank(), r = n / 2;
  const RatMatrix aq = convert<Rational>(sp.A);

  // A Q(alpha)-basis g_1..g_r chosen greedily among unit vectors.
  RatMatrix gb(0, n);
  for (std::size_t j = 0; j < n && gb.rows() < n; ++j) {
    RatMatrix e(1, n);
    e(0, j) = 1;
    RatMatrix t = gb;
    t.append_row(e.row(0));
    RatMatrix ea = e * aq;
    t.append_row(ea.row(0));
    if (rank(t) == t.rows()) gb = std::move(t);
  }
  require(gb.rows() == n, ErrorKind::NoFreeBasis, "no Q(alpha)-basis among unit vectors");
  auto gbinv = inverse(gb);
  // K-coordinates of every unit vector.
  QAMatrix c(n, r);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < r; ++i) c(k, i) = QA((*gbinv)(k, 2 * i), (*gbinv)(k, 2 * i + 1));
  Integer d = 1;
  for (const auto& v : c.data()) {
    mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), v.a.get_den_mpz_t());
    mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), v.b.get_den_mpz_t());
  }
  Matrix<ZA> m(n, r);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < r; ++i) m(k, i) = to_integral(c(k, i) * QA(Rational(d), Rational(0)));

  // Row Hermite reduction over the Euclidean ring Z[alpha].
  std::size_t prow = 0;
  for (std::size_t col = 0; col < r; ++col) {
    while (true) {
      std::size_t best = n;
      for (std::size_t i = prow; i < n; ++i)
        if (!m(i, col).is_zero() && (best == n || m(i, col).norm() < m(best, col).norm())) best = i;
      require(best != n, ErrorKind::NoFreeBasis, "module does not have full rank");
      m.swap_rows(prow, best);
      bool done = true;
      for (std::size_t i = prow + 1; i < n; ++i) {
        if (m(i, col).is_zero()) continue;
        auto [q, rem] = divmod(m(i, col), m(prow, col));
        for (std::size_t j = col; j < r; ++j) m(i, j) -= q * m(prow, j);
        if (!m(i, col).is_zero()) done = false;
      }
      if (done) break;
    }
    ++prow;
  }
  for (std::size_t i = r; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j)
      require(m(i, j).is_zero(), ErrorKind::NoFreeBasis, "Hermite reduction left a nonzero row");

  // Z[alpha]-basis b'_i = sum_j (m_ij / d) g_j and its trace basis.
  IntMatrix tb(n, n);
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<Rational> bi(n, Rational(0));
    for (std::size_t j = 0; j < r; ++j) {
      const Rational u = Rational(m(i, j).a) / d, v = Rational(m(i, j).b) / d;
      for (std::size_t k = 0; k < n; ++k) bi[k] += u * gb(2 * j, k) + v * gb(2 * j + 1, k);
    }
    RatMatrix row(1, n);
    for (std::size_t k = 0; k < n; ++k) row(0, k) = bi[k];
    RatMatrix rowa = row * aq;
    for (std::size_t k = 0; k < n; ++k) {
      require(bi[k].get_den() == 1 && rowa(0, k).get_den() == 1, ErrorKind::NoFreeBasis, "basis vector not integral");
      tb(2 * i, k) = bi[k].get_num();
      tb(2 * i + 1, k) = rowa(0, k).get_num();
    }
  }
  require(abs(determinant(tb)) == 1, ErrorKind::NoFreeBasis, "Z[alpha]-basis does not generate the lattice");

  // h(x,y) = ((4p - q) + (2q - p) alpha) / 7 with p = (x,y)/s, q = (x, yA)/s.
  const IntMatrix fq = tb * sp.F * tb.transpose();
  QAMatrix h(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      const Rational p = Rational(fq(2 * i, 2 * j)) / s, q = Rational(fq(2 * i, 2 * j + 1)) / s;
      h(i, j) = QA((4 * p - q) / 7, (2 * q - p) / 7);
    }
  HermitianLattice herm(std::move(h), l.label().empty() ? std::string() : l.label() + "/Z[a]");
  require(trace_lattice(herm, s).gram() == convert<Rational>(fq), ErrorKind::InvariantFailure,
          "trace of the recovered Hermitian form does not reproduce the Gram matrix");
  return {std::move(herm), std::move(tb)};
}

IsometrySearch hermitian_automorphisms(const HermitianLattice& p, std::uint64_t node_budget) {
  if (p.rank() > 4) throw Error(ErrorKind::RankTooLarge, "automorphism search is limited to rank 4");
  const std::size_t r = p.rank(), n = 2 * r;
  IntegerLattice t = trace_lattice(p, 1);
  // Rescale to an integral Gram; isometries are unaffected.
  const Integer den = common_denominator(t.gram());
  IntegerLattice ti = rescale(t, Rational(den));
  const IntMatrix act = alpha_action(r);
  IntMatrix src(r, n);
  for (std::size_t i = 0; i < r; ++i) src(i, 2 * i) = 1;
  ImageSearch search(ti, src, act, act, node_budget);
  IsometrySearch out;
  std::vector<IntMatrix> found;
  const bool finished = search.run([&](const std::vector<std::vector<i64>>& imgs) {
    auto m = map_from_images(src, act, act, imgs);
    if (m) found.push_back(std::move(*m));
    return true;
  });
  out.complete = finished;
  out.order = found.size();
  if (!finished) throw Error(ErrorKind::BudgetExceeded, "automorphism search exhausted its node budget");
  std::set<std::vector<long>> group{key_of(IntMatrix::identity(n))};
  for (const auto& g : found) {
    if (group.count(key_of(g))) continue;
    out.generators.push_back(g);
    group = closure(out.generators, n);
  }
  require(group.size() == out.order, ErrorKind::InvariantFailure, "automorphisms found do not form a group");
  out.elements = std::move(found);
  return out;
}

std::optional<IntMatrix> find_galois_isometry(const IntegerLattice& l, const StructurePair& sp,
                                              std::uint64_t node_budget) {
  auto hs = hermitian_from_structure(l, sp, 1);
  const std::size_t n = l.rank(), r = n / 2;
  IntMatrix src(r, n);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < n; ++k) src(i, k) = hs.trace_basis(2 * i, k);
  const IntMatrix b = IntMatrix::identity(n) - sp.A;
  ImageSearch search(l, src, sp.A, b, node_budget);
  std::optional<IntMatrix> y;
  const bool finished = search.run([&](const std::vector<std::vector<i64>>& imgs) {
    y = map_from_images(src, sp.A, b, imgs);
    return !y.has_value();
  });
  if (!y && !finished) throw Error(ErrorKind::BudgetExceeded, "Galois isometry search exhausted its node budget");
  if (y) {
    require(*y * sp.F * y->transpose() == sp.F && *y * sp.A == b * *y, ErrorKind::InvariantFailure,
            "Galois isometry search returned an invalid map");
  }
  return y;
}

IntMatrix gamma_t_basis(const StructurePair& sp) {
  const std::size_t n = sp.A.rows();
  const IntMatrix id = IntMatrix::identity(n), b = id - sp.A;
  IntMatrix t(3 * n, 3 * n);
  auto put = [&](std::size_t bi, std::size_t bj, const IntMatrix& m) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t(bi * n + i, bj * n + j) = m(i, j);
  };
  put(0, 0, id);
  put(0, 1, id);
  put(0, 2, sp.A);
  put(1, 1, b);
  put(1, 2, b);
  put(2, 2, scaled(id, 2));
  return t;
}

IntMatrix build_galois_block(const StructurePair& sp, const IntMatrix& y) {
  const std::size_t n = sp.A.rows();
  const IntMatrix b = IntMatrix::identity(n) - sp.A;
  if (!(y * sp.F * y.transpose() == sp.F) || !(y * sp.A == b * y))
    throw Error(ErrorKind::InvalidWitness, "Y must satisfy Y F Y^t = F and Y A Y^-1 = 1 - A");
  IntMatrix x(3 * n, 3 * n);
  auto put = [&](std::size_t bi, std::size_t bj, const IntMatrix& m) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) x(bi * n + i, bj * n + j) = m(i, j);
  };
  const IntMatrix neg_y = scaled(y, -1);
  put(0, 0, y);
  put(0, 1, neg_y);
  put(0, 2, sp.A * y);
  put(1, 1, scaled(b * y, -1));
  put(1, 2, y);
  put(2, 0, scaled(sp.A * y, -1));
  put(2, 2, y);
  const IntMatrix t = gamma_t_basis(sp);
  const IntMatrix amb = block_diagonal<Integer>({&sp.F, &sp.F, &sp.F});
  // Gram of Gamma on T is T (F/2 (+) F/2 (+) F/2) T^t; compare doubled values.
  const IntMatrix gt = t * amb * t.transpose();
  if (x * gt * x.transpose() != gt)
    throw Error(ErrorKind::InvariantFailure, "Galois block matrix does not preserve the Gram matrix of Gamma");
  return x;
}

}  // namespace lat72
