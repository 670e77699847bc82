#pragma once

#include <cstdint>

#include "lat72/lattice.hpp"

namespace lat72 {

/// Integer Gram matrix with a common denominator: (b_i, b_j) = g(i, j) / den.
struct ScaledGram {
  Matrix<std::int64_t> g;
  Integer den = 1;

  static ScaledGram from(const IntegerLattice& l);
  std::size_t dim() const { return g.rows(); }
};

struct ReductionQuality {
  double delta = 0.99;
  /// Deep-insertion depth for LLL (0 disables deep insertions).
  int deep = 8;
  /// BKZ block size; values below 3 mean plain (deep) LLL.
  int bkz_block = 0;
  int bkz_tours = 8;
};

/// Reduces in place. `transform` rows are the new basis in old coordinates and
/// g is replaced by transform * g * transform^T, all in exact integer arithmetic.
void reduce_gram(Matrix<std::int64_t>& g, Matrix<std::int64_t>& transform, const ReductionQuality& q);

struct ReducedBasis {
  IntegerLattice lattice;  // Gram in the reduced basis
  IntMatrix transform;     // unimodular, rows are reduced vectors in old coordinates
};

ReducedBasis reduce_basis(const IntegerLattice& l, const ReductionQuality& q = {});

/// Floating Gram-Schmidt data of a Gram matrix: norm(sum y_i b_i) =
/// sum_j rr[j] * (y_j + sum_{i>j} mu(i, j) y_i)^2.
struct GramSchmidt {
  Matrix<long double> mu;
  std::vector<long double> rr;
};
GramSchmidt gram_schmidt(const Matrix<std::int64_t>& g, long double scale = 1.0L);

}  // namespace lat72
