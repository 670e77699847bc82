#pragma once

#include <bitset>
#include <cstdint>
#include <vector>

#include "lat72/hermitian.hpp"
#include "lat72/lattice.hpp"

namespace lat72 {

/// Vectors over F_2 of dimension at most 128; bit i is coordinate i.
constexpr std::size_t kMaxF2Dim = 128;
using F2Vector = std::bitset<kMaxF2Dim>;

/// The quadratic space (L/2L, q) with q(x + 2L) = Q(x) mod 2 and
/// b(x, y) = (x, y) mod 2, for an even unimodular L.
class F2QuadSpace {
 public:
  F2QuadSpace(std::vector<F2Vector> bilinear, std::vector<bool> q_diag);

  std::size_t dim() const { return q_.size(); }
  bool q(const F2Vector& x) const;
  bool b(const F2Vector& x, const F2Vector& y) const;
  /// Row i of the Gram matrix of b.
  const F2Vector& b_row(std::size_t i) const { return b_[i]; }
  bool nondegenerate() const;

  /// Hyperbolic plane and the anisotropic plane, for tests and examples.
  static F2QuadSpace hyperbolic_plane();
  static F2QuadSpace anisotropic_plane();

 private:
  std::vector<F2Vector> b_;
  std::vector<bool> q_;
};

F2QuadSpace mod2_space(const IntegerLattice& l);

/// Arf invariant of a nondegenerate space, from a symplectic basis.
int witt_defect(const F2QuadSpace& s);

/// Maximal totally isotropic U, V with U (+) V the whole space. Pairs (e_i, f_i)
/// are extracted one at a time; e_i is the smallest isotropic vector (in the
/// search order fixed by the seed; seed 0 is plain lexicographic order) orthogonal
/// to the pairs so far, and f_i the smallest partner with b(e_i, f_i) = 1, q(f_i) = 0.
struct IsotropicPair {
  std::vector<F2Vector> u;
  std::vector<F2Vector> v;
};
IsotropicPair isotropic_complement_pair(const F2QuadSpace& s, std::uint64_t seed = 0);

/// Preimage of an F_2 subspace: the lattice between 2L and L with basis
/// given by lifted reduced-echelon rows plus 2 e_j for non-pivot columns.
/// Rows are coordinates in L's basis.
IntMatrix preimage_coords(std::size_t n, const std::vector<F2Vector>& subspace);

/// A polarization (M, N) of an even unimodular L. M and N carry L's form
/// (M is a sublattice of L); half(M) is the even unimodular (M, Q/2).
struct Polarization {
  IntegerLattice parent;
  IntMatrix m_coords;  // basis of M in L coordinates
  IntMatrix n_coords;
  IntegerLattice m;
  IntegerLattice n;
};

inline IntegerLattice half(const IntegerLattice& l) { return rescale(l, Rational(1, 2)); }

/// Checks every polarization invariant; throws InvariantFailure naming the clause.
void verify_polarization(const Polarization& p);

Polarization preimages(const IntegerLattice& l, const IsotropicPair& uv);

/// M = L A (alpha L), N = L (1 - A) (beta L).
Polarization polarization_from_structure(const IntegerLattice& l, const StructurePair& sp);

/// (N, M) from (M, N). L(L B, L A, 3) is the lattice spanned by (x, x, xA),
/// (0, xB, xB), (0, 0, 2x), i.e. the tensor product with the Barnes lattice.
Polarization swap_halves(Polarization p);

/// L(M, N, k) in the ambient L^k with form (1/2) sum Q: generated by diagonal
/// N-vectors, consecutive M-differences and 2L in the first slot.
IntegerLattice construction_I(const Polarization& p, std::size_t k);

/// Kneser 2-neighbor M^w = M_w + Z w with M_w = {m : (m, w) even}; w is given
/// by rational coordinates in M's basis. Requires (w, M) integral, 2w in M, w not in M and
/// [M : M_w] = 2; with require_even also (w, w) even, so that M^w is even when M is.
IntegerLattice neighbor_2(const IntegerLattice& m, std::span<const Rational> w, bool require_even = true);

}  // namespace lat72
