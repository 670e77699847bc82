#include "lat72/lattice.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "lat72/error.hpp"
#include "lat72/linalg.hpp"

namespace lat72 {

namespace {

void validate_gram(const RatMatrix& gram) {
  require(gram.square() && gram.rows() > 0, ErrorKind::InvalidInput, "Gram matrix must be square and non-empty");
  require(is_symmetric(gram), ErrorKind::InvalidInput, "Gram matrix is not symmetric");
  require(is_positive_definite(gram), ErrorKind::InvalidInput, "Gram matrix is not positive definite");
}

RatMatrix gram_of(const RatMatrix& basis, const RatMatrix& amb) { return basis * amb * basis.transpose(); }

}  // namespace

IntegerLattice::IntegerLattice(RatMatrix gram, std::string label) : gram_(std::move(gram)), label_(std::move(label)) {
  validate_gram(gram_);
}

IntegerLattice::IntegerLattice(RatMatrix gram, Ambient ambient, std::string label)
    : gram_(std::move(gram)), ambient_(std::move(ambient)), label_(std::move(label)) {
  validate_gram(gram_);
  require(ambient_->basis.rows() == gram_.rows() && ambient_->basis.cols() == ambient_->gram.rows(),
          ErrorKind::DimensionMismatch, "ambient basis shape does not match Gram matrix");
  require(gram_of(ambient_->basis, ambient_->gram) == gram_, ErrorKind::InvalidInput,
          "ambient basis does not reproduce the Gram matrix");
}

IntegerLattice IntegerLattice::from_basis(RatMatrix basis, RatMatrix ambient_gram, std::string label) {
  RatMatrix g = gram_of(basis, ambient_gram);
  return IntegerLattice(std::move(g), Ambient{std::move(basis), std::move(ambient_gram)}, std::move(label));
}

IntegerLattice IntegerLattice::from_integer_gram(const IntMatrix& gram, std::string label) {
  return IntegerLattice(convert<Rational>(gram), std::move(label));
}

IntegerLattice IntegerLattice::with_label(std::string label) const {
  IntegerLattice l = *this;
  l.label_ = std::move(label);
  return l;
}

Rational IntegerLattice::determinant() const { return lat72::determinant(gram_); }

bool IntegerLattice::integral() const { return is_integral(gram_); }

IntMatrix IntegerLattice::integer_gram() const { return to_integer(gram_); }

Rational IntegerLattice::norm(std::span<const Integer> c) const {
  require(c.size() == rank(), ErrorKind::DimensionMismatch, "coordinate vector has wrong length");
  Rational s = 0;
  for (std::size_t i = 0; i < rank(); ++i) {
    if (c[i] == 0) continue;
    Rational row = 0;
    for (std::size_t j = 0; j < rank(); ++j)
      if (c[j] != 0) row += gram_(i, j) * c[j];
    s += row * c[i];
  }
  return s;
}

Rational IntegerLattice::inner(std::span<const Rational> x, std::span<const Rational> y) const {
  Rational s = 0;
  for (std::size_t i = 0; i < rank(); ++i) {
    if (x[i] == 0) continue;
    Rational row = 0;
    for (std::size_t j = 0; j < rank(); ++j)
      if (y[j] != 0) row += gram_(i, j) * y[j];
    s += x[i] * row;
  }
  return s;
}

IntegerLattice IntegerLattice::change_basis(const IntMatrix& t, std::string label) const {
  return change_basis(convert<Rational>(t), std::move(label));
}

IntegerLattice IntegerLattice::change_basis(const RatMatrix& t, std::string label) const {
  require(t.cols() == rank(), ErrorKind::DimensionMismatch, "change_basis: transform width != rank");
  RatMatrix g = t * gram_ * t.transpose();
  if (label.empty()) label = label_;
  if (ambient_) return IntegerLattice(std::move(g), Ambient{t * ambient_->basis, ambient_->gram}, std::move(label));
  return IntegerLattice(std::move(g), std::move(label));
}

LatticeVector make_vector(const IntegerLattice& l, std::vector<Integer> coords) {
  Rational n = l.norm(coords);
  return {std::move(coords), n};
}

IntegerLattice dual(const IntegerLattice& l) {
  auto inv = inverse(l.gram());
  require(inv.has_value(), ErrorKind::InvalidInput, "dual: singular Gram matrix");
  std::string label = l.label().empty() ? std::string() : l.label() + "#";
  if (l.ambient()) return IntegerLattice(*inv, Ambient{*inv * l.ambient()->basis, l.ambient()->gram}, label);
  return IntegerLattice(*inv, label);
}

bool is_even(const IntegerLattice& l) {
  if (!l.integral()) return false;
  for (std::size_t i = 0; i < l.rank(); ++i)
    if (l.gram()(i, i).get_num() % 2 != 0) return false;
  return true;
}

bool is_unimodular(const IntegerLattice& l) {
  if (!l.integral()) return false;
  Rational d = l.determinant();
  return d == 1 || d == -1;
}

Integer sublattice_index(const IntegerLattice& l, const IntMatrix& coords) {
  require(coords.cols() == l.rank(), ErrorKind::DimensionMismatch, "sublattice coordinates have wrong width");
  IntMatrix h = hermite_basis(coords);
  require(h.rows() == l.rank(), ErrorKind::NotASublattice, "generators do not span a full-rank sublattice");
  Integer d = abs(determinant(h));
  // Cross-check against the Gram determinants: det(S) = [L:S]^2 det(L).
  RatMatrix gs = convert<Rational>(h) * l.gram() * convert<Rational>(h).transpose();
  require(lat72::determinant(gs) == Rational(d * d) * l.determinant(), ErrorKind::InvariantFailure,
          "index does not satisfy det(S) = [L:S]^2 det(L)");
  return d;
}

std::vector<Rational> coordinates_in(const IntegerLattice& l, std::span<const Rational> v) {
  require(l.ambient().has_value(), ErrorKind::StructureMismatch, "lattice has no ambient basis");
  const auto& amb = *l.ambient();
  require(v.size() == amb.basis.cols(), ErrorKind::DimensionMismatch, "ambient vector has wrong length");
  // Solve via the Gram matrix: c * G = (v, b_j)_j.
  RatMatrix rhs(1, l.rank());
  RatMatrix vb = amb.basis * amb.gram;
  for (std::size_t j = 0; j < l.rank(); ++j) rhs(0, j) = dot(v, vb.row(j));
  RatMatrix c = solve_right(l.gram(), rhs);
  RatMatrix back = c * amb.basis;
  for (std::size_t j = 0; j < v.size(); ++j)
    require(back(0, j) == v[j], ErrorKind::NotASublattice, "vector is not in the span of the lattice");
  return c.row_vector(0);
}

Integer sublattice_index(const IntegerLattice& l, const IntegerLattice& s) {
  require(l.ambient() && s.ambient(), ErrorKind::StructureMismatch, "sublattice_index needs ambient bases");
  require(l.ambient()->gram == s.ambient()->gram, ErrorKind::StructureMismatch, "ambient spaces differ");
  IntMatrix coords(s.rank(), l.rank());
  for (std::size_t i = 0; i < s.rank(); ++i) {
    auto c = coordinates_in(l, s.ambient()->basis.row(i));
    for (std::size_t j = 0; j < l.rank(); ++j) {
      require(c[j].get_den() == 1, ErrorKind::NotASublattice, "generator has non-integral coordinates");
      coords(i, j) = c[j].get_num();
    }
  }
  return sublattice_index(l, coords);
}

IntegerLattice orthogonal_sum(const IntegerLattice& a, const IntegerLattice& b) {
  RatMatrix g = block_diagonal<Rational>({&a.gram(), &b.gram()});
  std::string label = a.label() + "+" + b.label();
  if (a.ambient() && b.ambient()) {
    const auto& ba = a.ambient()->basis;
    const auto& bb = b.ambient()->basis;
    RatMatrix nb(ba.rows() + bb.rows(), ba.cols() + bb.cols());
    for (std::size_t i = 0; i < ba.rows(); ++i)
      for (std::size_t j = 0; j < ba.cols(); ++j) nb(i, j) = ba(i, j);
    for (std::size_t i = 0; i < bb.rows(); ++i)
      for (std::size_t j = 0; j < bb.cols(); ++j) nb(ba.rows() + i, ba.cols() + j) = bb(i, j);
    RatMatrix ng = block_diagonal<Rational>({&a.ambient()->gram, &b.ambient()->gram});
    return IntegerLattice(std::move(g), Ambient{std::move(nb), std::move(ng)}, label);
  }
  return IntegerLattice(std::move(g), label);
}

IntegerLattice rescale(const IntegerLattice& l, const Rational& s) {
  require(s > 0, ErrorKind::InvalidInput, "rescale factor must be positive");
  RatMatrix g = scaled(l.gram(), s);
  if (l.ambient()) return IntegerLattice(std::move(g), Ambient{l.ambient()->basis, scaled(l.ambient()->gram, s)}, l.label());
  return IntegerLattice(std::move(g), l.label());
}

std::string format_rational(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational parse_rational(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw Error(ErrorKind::InvalidInput, "not a rational number: '" + s + "'");
  require(r.get_den() != 0, ErrorKind::InvalidInput, "zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

void write_gram(std::ostream& os, const RatMatrix& gram) {
  os << gram.rows() << '\n';
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    for (std::size_t j = 0; j < gram.cols(); ++j) {
      if (j) os << ' ';
      os << format_rational(gram(i, j));
    }
    os << '\n';
  }
}

RatMatrix read_gram(std::istream& is) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    try {
      long long v = std::stoll(tok);
      require(v > 0, ErrorKind::InvalidInput, "rank must be positive");
      n = static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidInput, "expected rank on first line, got '" + tok + "'");
    }
    break;
  }
  require(n > 0, ErrorKind::InvalidInput, "missing rank line");
  RatMatrix g(n, n);
  std::string tok;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      require(static_cast<bool>(is >> tok), ErrorKind::InvalidInput, "truncated matrix data");
      g(i, j) = parse_rational(tok);
    }
  std::getline(is, line);  // consume the rest of the last row
  return g;
}

}  // namespace lat72
