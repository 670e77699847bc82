#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lat72/lattice.hpp"

namespace lat72 {

/// a + b*alpha in Z[alpha] (or Q(alpha)), alpha^2 = alpha - 2.
/// The conjugate of alpha is beta = 1 - alpha, and alpha * beta = 2.
template <typename T>
struct ZAlpha {
  T a{0};
  T b{0};

  ZAlpha() = default;
  ZAlpha(int v) : a(v), b(0) {}  // NOLINT: scalars embed implicitly
  explicit ZAlpha(const T& v) : a(v), b(0) {}
  ZAlpha(T a_, T b_) : a(std::move(a_)), b(std::move(b_)) {}
  template <typename U>
  explicit ZAlpha(const ZAlpha<U>& o) : a(o.a), b(o.b) {}

  static ZAlpha alpha() { return {T(0), T(1)}; }
  static ZAlpha beta() { return {T(1), T(-1)}; }

  ZAlpha conj() const { return {a + b, -b}; }
  T trace() const { return 2 * a + b; }
  T norm() const { return a * a + a * b + 2 * b * b; }
  bool is_zero() const { return a == 0 && b == 0; }
  bool is_rational() const { return b == 0; }

  ZAlpha& operator+=(const ZAlpha& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  ZAlpha& operator-=(const ZAlpha& o) {
    a -= o.a;
    b -= o.b;
    return *this;
  }
  ZAlpha& operator*=(const ZAlpha& o) { return *this = *this * o; }

  friend ZAlpha operator+(ZAlpha x, const ZAlpha& y) { return x += y; }
  friend ZAlpha operator-(ZAlpha x, const ZAlpha& y) { return x -= y; }
  friend ZAlpha operator-(const ZAlpha& x) { return {-x.a, -x.b}; }
  friend ZAlpha operator*(const ZAlpha& x, const ZAlpha& y) {
    // (a + b al)(c + d al) = ac + (ad + bc) al + bd (al - 2)
    T bd = x.b * y.b;
    return {x.a * y.a - 2 * bd, x.a * y.b + x.b * y.a + bd};
  }
  friend bool operator==(const ZAlpha& x, const ZAlpha& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator!=(const ZAlpha& x, const ZAlpha& y) { return !(x == y); }
};

using ZA = ZAlpha<Integer>;
using QA = ZAlpha<Rational>;
using QAMatrix = Matrix<QA>;

/// Inverse in Q(alpha); throws on zero.
QA inverse(const QA& x);
inline QA operator/(const QA& x, const QA& y) { return x * inverse(y); }

/// x = q*y + r with norm(r) < norm(y); Z[alpha] is norm-Euclidean.
std::pair<ZA, ZA> divmod(const ZA& x, const ZA& y);

bool is_integral(const QA& x);
ZA to_integral(const QA& x);  // throws NonIntegralResult
std::string to_string(const QA& x);
/// Parses "a" or "a:b" (meaning a + b alpha), as written by to_string.
QA parse_qa(const std::string& s);

/// sqrt(-7) = 2*alpha - 1.
inline QA sqrt_minus7() { return {Rational(-1), Rational(2)}; }

QAMatrix conj_transpose(const QAMatrix& m);
std::optional<QAMatrix> inverse(const QAMatrix& m);
QA determinant(const QAMatrix& m);

/// Free Hermitian Z[alpha]-lattice: Gram matrix h(b_i, b_j) of a basis, where
/// h is linear in the first and conjugate-linear in the second argument.
/// Optionally carries the basis as rows over K^n with an ambient Hermitian form.
class HermitianLattice {
 public:
  explicit HermitianLattice(QAMatrix hgram, std::string label = {});
  HermitianLattice(QAMatrix hgram, QAMatrix basis, QAMatrix ambient_form, std::string label = {});

  std::size_t rank() const { return h_.rows(); }
  const QAMatrix& hgram() const { return h_; }
  const std::string& label() const { return label_; }
  const std::optional<QAMatrix>& basis() const { return basis_; }
  const std::optional<QAMatrix>& ambient_form() const { return form_; }

  bool operator==(const HermitianLattice& o) const { return h_ == o.h_; }

 private:
  QAMatrix h_;
  std::optional<QAMatrix> basis_;
  std::optional<QAMatrix> form_;
  std::string label_;
};

/// Barnes lattice: basis (1,1,alpha), (0,beta,beta), (0,0,2) with h = 1/2 sum x_i conj(y_i).
HermitianLattice barnes();

/// Trace lattice on (b_1, alpha b_1, ..., b_r, alpha b_r) with (x,y) = s * trace h(x,y).
/// With require_integral, a non-integral Gram raises NonIntegralResult.
IntegerLattice trace_lattice(const HermitianLattice& p, const Rational& s, bool require_integral = false);

/// P* = {x : h(x, P) in Z[alpha]} on the dual basis; its Gram matrix is H^{-1}.
HermitianLattice hermitian_dual(const HermitianLattice& p);

/// True when both lattices carry bases in the same ambient space and span the same Z[alpha]-module.
bool same_module(const HermitianLattice& p, const HermitianLattice& q);

/// dual(trace(P, s)) == trace lattice of (1/(s sqrt(-7))) P*, compared as Z-lattices in P's Q-span.
bool trace_dual_check(const HermitianLattice& p, const Rational& s);

/// Kronecker product: basis b_i (x) c_j in row-major order (i * rank(q) + j).
HermitianLattice hermitian_tensor(const HermitianLattice& p, const HermitianLattice& q);

/// Swaps alpha and beta in the Gram matrix.
HermitianLattice galois_conjugate(const HermitianLattice& p);

/// Z[alpha]-structure on an integer lattice: right multiplication by A is alpha.
struct StructurePair {
  IntMatrix F;
  IntMatrix A;
};

/// Names of the violated identities (empty when valid): "AFA^t = 2F",
/// "F A^t F^-1 = 1 - A", "A^2 - A + 2 = 0". Throws DimensionMismatch on bad shapes.
std::vector<std::string> structure_violations(const StructurePair& sp);
bool validate_structure(const StructurePair& sp);

void write_structure(std::ostream& os, const StructurePair& sp);
/// Reads and validates; refuses files whose identities fail.
StructurePair read_structure(std::istream& is);
StructurePair load_structure(const std::string& path);

struct FindOptions {
  std::uint64_t node_budget = 50'000'000;
  std::uint64_t seed = 1;
};

/// Searches for a structure by backtracking over the rows v_i = e_i A among
/// lattice vectors of norm 2 F_ii (equivalently S = 2A - 1, S^2 = -7, skew).
StructurePair find_structure(const IntegerLattice& l, const FindOptions& opt = {});

struct HermitianFromStructure {
  HermitianLattice lattice;
  /// Rows b_1, b_1 A, ..., b_r, b_r A in coordinates of the integer lattice; unimodular.
  IntMatrix trace_basis;
};

/// Recovers h from (x,y) = s trace h(x,y); the Z[alpha]-basis comes from a
/// Hermite form over Z[alpha] of the module generated by the lattice basis.
HermitianFromStructure hermitian_from_structure(const IntegerLattice& l, const StructurePair& sp,
                                                const Rational& s);

/// Result of an isometry search.
struct IsometrySearch {
  std::uint64_t order = 0;               // number of maps found (all of them)
  std::vector<IntMatrix> generators;     // a generating set (automorphism search only)
  std::vector<IntMatrix> elements;       // maps found, when requested
  bool complete = true;
};

/// Z[alpha]-linear automorphisms of the trace lattice (rank <= 4).
/// Matrices act on rows in the trace basis (b_1, alpha b_1, ...).
IsometrySearch hermitian_automorphisms(const HermitianLattice& p, std::uint64_t node_budget = 0);

/// Integral Y with Y F Y^t = F and Y A Y^{-1} = 1 - A.
std::optional<IntMatrix> find_galois_isometry(const IntegerLattice& l, const StructurePair& sp,
                                              std::uint64_t node_budget = 0);

/// Block matrix (Y, -Y, AY; 0, -BY, Y; -AY, 0, Y), verified to preserve the
/// Gram matrix of Gamma on the basis T = (1, 1, A; 0, B, B; 0, 0, 2).
IntMatrix build_galois_block(const StructurePair& sp, const IntMatrix& y);

/// The basis T above in Lambda^3 coordinates (3n x 3n).
IntMatrix gamma_t_basis(const StructurePair& sp);

}  // namespace lat72
