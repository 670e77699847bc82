#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lat72/matrix.hpp"

namespace lat72 {

/// Basis vectors written in an ambient space that carries its own Gram matrix.
struct Ambient {
  RatMatrix basis;  // rank x dim
  RatMatrix gram;   // dim x dim
};

/// A positive definite lattice given by its exact Gram matrix of bilinear
/// values (b_i, b_j). Norm of v means (v, v); Q(v) = (v, v) / 2.
///
/// Construction validates symmetry and positive definiteness, and, when an
/// ambient embedding is supplied, that it reproduces the Gram matrix exactly.
class IntegerLattice {
 public:
  explicit IntegerLattice(RatMatrix gram, std::string label = {});
  IntegerLattice(RatMatrix gram, Ambient ambient, std::string label = {});

  /// Builds the Gram matrix from an ambient basis.
  static IntegerLattice from_basis(RatMatrix basis, RatMatrix ambient_gram, std::string label = {});
  static IntegerLattice from_integer_gram(const IntMatrix& gram, std::string label = {});

  std::size_t rank() const { return gram_.rows(); }
  const RatMatrix& gram() const { return gram_; }
  const std::optional<Ambient>& ambient() const { return ambient_; }
  const std::string& label() const { return label_; }
  IntegerLattice with_label(std::string label) const;

  Rational determinant() const;
  bool integral() const;
  /// Integer Gram matrix; throws NonIntegralResult when the lattice is not integral.
  IntMatrix integer_gram() const;

  Rational norm(std::span<const Integer> coords) const;
  Rational inner(std::span<const Rational> x, std::span<const Rational> y) const;

  /// New lattice on the basis rows of `transform` (coordinates in this basis).
  IntegerLattice change_basis(const IntMatrix& transform, std::string label = {}) const;
  IntegerLattice change_basis(const RatMatrix& transform, std::string label = {}) const;

  bool operator==(const IntegerLattice& o) const { return gram_ == o.gram_; }

 private:
  RatMatrix gram_;
  std::optional<Ambient> ambient_;
  std::string label_;
};

/// Coordinates with respect to a lattice basis, plus the cached exact norm.
struct LatticeVector {
  std::vector<Integer> coords;
  Rational norm;
};

LatticeVector make_vector(const IntegerLattice& l, std::vector<Integer> coords);

/// Dual lattice on the dual basis: Gram G^{-1}. The ambient embedding, if any,
/// is carried along (dual basis = G^{-1} * basis).
IntegerLattice dual(const IntegerLattice& l);

bool is_even(const IntegerLattice& l);
bool is_unimodular(const IntegerLattice& l);
inline bool is_even_unimodular(const IntegerLattice& l) { return is_even(l) && is_unimodular(l); }

/// [L : S] for S generated by rows of `coords` (coordinates of S's generators in L's basis).
Integer sublattice_index(const IntegerLattice& l, const IntMatrix& coords);
/// [L : S] when both carry ambient bases in the same ambient space.
Integer sublattice_index(const IntegerLattice& l, const IntegerLattice& s);

/// Rational coordinates of an ambient vector in the lattice basis (lattice must be full rank in its span).
std::vector<Rational> coordinates_in(const IntegerLattice& l, std::span<const Rational> ambient_vector);

IntegerLattice orthogonal_sum(const IntegerLattice& a, const IntegerLattice& b);
IntegerLattice rescale(const IntegerLattice& l, const Rational& s);

/// Plain-text Gram format: rank on the first line, then rank rows of exact rationals.
void write_gram(std::ostream& os, const RatMatrix& gram);
RatMatrix read_gram(std::istream& is);
std::string format_rational(const Rational& r);
Rational parse_rational(const std::string& s);

}  // namespace lat72
