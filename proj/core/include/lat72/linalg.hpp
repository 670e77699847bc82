#pragma once

// Exact linear algebra over Z and Q.

#include <optional>
#include <vector>

#include "lat72/matrix.hpp"

namespace lat72 {

/// Least common multiple of all denominators in m.
Integer common_denominator(const RatMatrix& m);

/// Scales m by its common denominator; returns (integer matrix, denominator).
std::pair<IntMatrix, Integer> clear_denominators(const RatMatrix& m);

/// Fraction-free (Bareiss) determinant. Pivots rows when a leading minor vanishes.
Integer determinant(IntMatrix m);
Rational determinant(const RatMatrix& m);

/// Leading principal minors d_1..d_n computed by Bareiss elimination without
/// pivoting. Stops at the first non-positive minor (which is still returned).
std::vector<Integer> leading_minors(const IntMatrix& m);

/// True iff the symmetric matrix is positive definite.
bool is_positive_definite(const RatMatrix& m);

/// Inverse over Q; nullopt if singular.
std::optional<RatMatrix> inverse(const RatMatrix& m);

/// Solves X * a = b for X (a square, invertible). Used for change of basis.
RatMatrix solve_right(const RatMatrix& a, const RatMatrix& b);

/// Rank over Q.
std::size_t rank(const RatMatrix& m);

bool is_integral(const RatMatrix& m);
IntMatrix to_integer(const RatMatrix& m);  // throws if not integral

/// Row Hermite normal form; returns the nonzero rows (a basis of the row lattice).
IntMatrix hermite_basis(IntMatrix gens);

/// Same for a lattice known to contain d * Z^n; all work is done modulo d, so
/// entries stay small. The result always has full rank n.
IntMatrix hermite_basis(IntMatrix gens, const Integer& d);

/// Basis of the integer left kernel {x in Z^r : x * m = 0}, LLL-free but saturated.
IntMatrix integer_left_kernel(const IntMatrix& m);

/// Unimodular matrix whose first row is the primitive vector c.
IntMatrix complete_to_unimodular(const std::vector<Integer>& c);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);

}  // namespace lat72
