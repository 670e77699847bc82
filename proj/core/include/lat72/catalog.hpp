#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lat72/hermitian.hpp"
#include "lat72/lattice.hpp"

namespace lat72 {

/// Extended binary Golay code [24,12,8]: the extended quadratic-residue code of
/// length 23. Coordinates 0..22 are Z/23, coordinate 23 is the extension
/// point. Generators are the 23 cyclic shifts of the residue indicator (with a
/// parity bit) plus the all-ones word, reduced to 12 independent rows.
/// Bit i of a word is coordinate i.
std::vector<std::uint32_t> golay_generators();

/// All 4096 codewords, sorted.
std::vector<std::uint32_t> golay_codewords();

/// Leech lattice from the Golay code: the vectors x/sqrt(8) with x in the
/// integral span of 2c (c in the code), 4(e_0 + e_i), 8e_0 and (-3, 1, ..., 1).
/// The basis is the Hermite form of that span; the ambient Gram is I/8.
/// Self-checked on construction: even, unimodular, and (optionally) minimum 4.
IntegerLattice build_leech(bool verify_minimum = true);

/// Automorphisms of the lattice from build_leech(), as integer matrices acting on
/// rows in its basis: the coordinate permutations x+1, 2x, -1/x of PSL2(23)
/// (coordinate 23 is infinity), the sign change on an octad, and an element
/// acting by (J/2 - I) on each tetrad of the sextet of {0,1,2,3}, up to signs.
/// Each is checked to preserve the Gram matrix.
std::vector<IntMatrix> leech_automorphisms(const IntegerLattice& leech);

/// E8 root lattice on the simple roots (Cartan matrix), ambient-free.
IntegerLattice build_e8();

/// The 72-dimensional lattice P_b (x) P for the Hermitian structure P of a
/// Z[alpha]-structure on Leech, built three ways and cross-checked.
struct GammaBuild {
  StructurePair structure;
  /// Trace lattice (1/7) tr of P_b (x) P, where Leech = (1/7) tr P.
  IntegerLattice tensor;
  /// Rows (x, x, xA), (0, xB, xB), (0, 0, 2x) in Lambda^3 coordinates.
  IntMatrix t_basis;
  /// The lattice on t_basis, with ambient Gram F/2 (+) F/2 (+) F/2.
  IntegerLattice blocks;
  /// The tensor trace basis written in Lambda^3 coordinates.
  IntMatrix tensor_in_blocks;
  /// Construction I for M = Leech B and N = Leech A with k = 3.
  IntegerLattice construction;
};

/// Builds and verifies: each version is 72-dimensional, even and unimodular;
/// the tensor basis maps isometrically into Lambda^3 onto the span of
/// t_basis; and Construction I gives the same sublattice of Lambda^3.
/// Throws InvariantFailure naming the first failed comparison.
GammaBuild build_gamma(const IntegerLattice& leech, const StructurePair& sp);

/// The lattice on t_basis for the shipped structure.
IntegerLattice build_gamma();

/// A built-in lattice and the invariants it must reproduce when built.
struct CatalogEntry {
  std::string name;
  std::function<IntegerLattice()> build;
  Rational determinant;
  Rational min;                // 0 when not checked by enumeration
  std::uint64_t kissing = 0;   // 0 when not checked
  bool even = true;
};

/// e8, leech, barnes (trace form at scale 1), gamma.
const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);  // throws NotFound

/// Re-checks an entry's invariants on a built lattice; throws SelfCheckFailed.
void verify_entry(const CatalogEntry& e, const IntegerLattice& l);

/// Directory holding shipped data files (compile-time default, overridable
/// through the LAT72_DATA environment variable).
std::string data_directory();

/// Path of the shipped Leech structure file.
std::string leech_structure_path();

}  // namespace lat72
