#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "lat72/lattice.hpp"
#include "lat72/reduce.hpp"

namespace lat72 {

/// Result of an exhaustive enumeration.
///
/// For centered enumeration (short_vectors) `count_by_norm` counts v and -v
/// separately, while `vectors` holds one representative per pair: the one whose
/// last nonzero reduced-basis coordinate is positive. For coset enumeration no
/// symmetry is used; `vectors[i].coords` is the integer part x of v = t + x.
struct ShortVectorReport {
  Rational bound;
  std::map<Rational, std::uint64_t> count_by_norm;
  std::vector<LatticeVector> vectors;
  bool complete = true;
  std::uint64_t nodes = 0;

  std::uint64_t total() const;
  std::uint64_t count(const Rational& norm) const;
  /// Smallest norm present, if any.
  std::optional<Rational> min_norm() const;
  void require_complete() const;  // throws BudgetExceeded
};

struct EnumOptions {
  std::uint64_t node_budget = 0;  // 0 = unlimited
  bool collect_vectors = false;
  ReductionQuality reduction{};
};

/// Precomputed, immutable enumeration context for one lattice (reduced basis,
/// Gram-Schmidt data). Safe to share between threads.
class Enumerator {
 public:
  explicit Enumerator(const IntegerLattice& l, const ReductionQuality& q = {});

  const IntegerLattice& lattice() const { return lattice_; }
  const IntMatrix& transform() const { return transform_; }
  std::size_t dim() const { return n_; }
  const GramSchmidt& gso() const { return gs_; }
  const Matrix<std::int64_t>& reduced_gram() const { return rg_; }
  const Integer& denominator() const { return den_; }

  ShortVectorReport short_vectors(const Rational& bound, const EnumOptions& opt = {}) const;

  /// Enumerates {v in t + L : (v,v) <= bound}; t in coordinates of the lattice basis.
  ShortVectorReport coset_vectors(std::span<const Rational> t, const Rational& bound,
                                  const EnumOptions& opt = {}) const;

  /// Lowest-level visitor interface: called with (x in original coordinates, exact norm).
  /// Returning false stops the enumeration (report marked incomplete).
  using Visitor = std::function<bool(std::span<const std::int64_t>, const Rational&)>;
  ShortVectorReport visit(std::span<const Rational> t, const Rational& bound, bool symmetric, const Visitor& v,
                          std::uint64_t node_budget = 0) const;

  /// One slice of visit(): only the slice-th value tried for the outermost
  /// reduced coordinate (values go outward from the center). The slices
  /// 0, 1, ... partition the search; `more` is false once no later slice
  /// can contain vectors.
  ShortVectorReport visit_slice(std::span<const Rational> t, const Rational& bound, bool symmetric,
                                const Visitor& v, std::size_t slice, bool& more, std::uint64_t node_budget = 0) const;

 private:
  ShortVectorReport visit_impl(std::span<const Rational> t, const Rational& bound, bool symmetric, const Visitor& v,
                               std::uint64_t node_budget, std::int64_t slice, bool& more) const;

  IntegerLattice lattice_;
  IntMatrix transform_;      // rows: reduced basis in original coordinates
  Matrix<std::int64_t> tr_;  // same, int64
  Matrix<Rational> tinv_;    // inverse transform (original coords -> reduced coords)
  Matrix<std::int64_t> rg_;  // reduced Gram scaled by den_
  Integer den_;
  GramSchmidt gs_;
  std::size_t n_;
};

ShortVectorReport short_vectors(const IntegerLattice& l, const Rational& bound, const EnumOptions& opt = {});
ShortVectorReport coset_short_vectors(const IntegerLattice& l, std::span<const Rational> t, const Rational& bound,
                                      const EnumOptions& opt = {});

/// Exact minimum, by enumeration with an adaptive bound starting from the
/// shortest reduced basis vector.
Rational minimum(const IntegerLattice& l, const ReductionQuality& q = {});
Rational minimum(const Enumerator& e);

/// Vector dump: header with Gram hash and bound, then one vector per line.
void write_vector_dump(std::ostream& os, const std::string& gram_hash, const ShortVectorReport& r);

}  // namespace lat72
