#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lat72/enumerate.hpp"
#include "lat72/lattice.hpp"

namespace lat72 {

/// Orthogonal splitting of a lattice G inside an ambient space with blocks of
/// sizes n and 2n (the first 24 coordinates and the last 48 for Gamma).
/// Bases are in block coordinates and in Hermite normal form.
struct DecompositionBundle {
  IntegerLattice gamma;
  std::size_t n = 0;        // size of the first block
  IntMatrix basis;          // basis of G in ambient coordinates
  IntMatrix k1, k2;         // G meets each block
  IntMatrix i1, i2;         // projections of G to each block
  IntegerLattice K1, K2, I1, I2;
  Integer index_kernel;     // [G : K1 + K2]
  Integer index_image;      // [I1 + I2 : G]
};

/// Splits G, which must carry an ambient embedding with integral coordinates
/// and a Gram matrix without terms between the first third and the rest
/// (otherwise StructureMismatch). Verifies: G is even; both indices equal 2^n;
/// I1 scaled by 2 is even unimodular with minimum 4; K1 has minimum 8; each K_j
/// is the dual of I_j in its span.
DecompositionBundle split(const IntegerLattice& gamma);

struct SliceOptions {
  std::uint64_t node_budget = 0;  // over the slices run in this call; 0 = unlimited
  std::string checkpoint_dir;     // one file per slice when set
  bool resume = false;
  std::string tag;                // file name prefix
};

struct MinimumCertificate {
  Rational claimed;
  bool verified = false;     // no vector below `claimed` and one attaining it
  std::uint64_t below = 0;   // nonzero vectors of norm < claimed that were found
  std::uint64_t nodes = 0;   // nodes of the slices run in this call
  std::size_t slices = 0;
  std::size_t slices_resumed = 0;
};

/// Proves min(l) = claimed by enumerating below `claimed`. The search is cut
/// into slices by the outermost reduced coordinate; finished slices are written to
/// the checkpoint directory so an interrupted run can resume. Throws
/// BudgetExceeded when the budget runs out (completed slices are kept).
MinimumCertificate certify_minimum(const IntegerLattice& l, const Rational& claimed, const SliceOptions& opt = {});

/// Read-only state for the per-w checks; shareable between threads.
class DecompContext {
 public:
  explicit DecompContext(DecompositionBundle b);

  const DecompositionBundle& bundle() const { return b_; }
  const Enumerator& k2_enumerator() const { return ek2_; }
  /// Norm-2 vectors of I1 (one of each pair +-v), block coordinates.
  const std::vector<std::vector<Integer>>& minimal_i1() const;
  void prepare_minimal_i1();

  /// Coordinates of an ambient vector in the basis of G, or nullopt.
  std::optional<std::vector<Integer>> gamma_coords(const std::vector<Integer>& ambient) const;
  /// w reduced modulo the Hermite basis of K2: one fixed representative per coset.
  std::vector<Integer> reduce_mod_k2(std::vector<Integer> w) const;
  std::vector<Rational> k2_coords(const std::vector<Integer>& w) const;
  bool in_k2(const std::vector<Integer>& w) const;
  /// Nonzero vectors of norm <= 4 in K2 (enumerated once).
  std::uint64_t k2_short() const { return k2_short_; }

 private:
  DecompositionBundle b_;
  Enumerator ek2_;
  RatMatrix basis_inv_;
  RatMatrix k2_inv_;
  std::uint64_t k2_short_ = 0;
  std::optional<std::vector<std::vector<Integer>>> min_i1_;
};

struct Lift {
  std::vector<Integer> w;        // reduced modulo K2
  std::vector<Integer> second;   // an independently found solution
};

/// For v in I1 of norm min(I1) = 2, finds w in I2 with v + w in G. Throws
/// PreconditionViolated for v = 0 or a v of another norm, NoLift when no w
/// exists, InvariantFailure when two solutions differ outside K2.
Lift lift_minimal(const DecompContext& ctx, const std::vector<Integer>& v);

struct IwResult {
  bool pass = false;
  std::uint64_t norm4 = 0;   // vectors of norm <= 4 in w + K2
  std::uint64_t nodes = 0;
};

/// I(w) = K2 + Zw has minimum > 4 iff neither K2 nor w + K2 has a nonzero
/// vector of norm <= 4 (2w lies in K2). Throws BudgetExceeded.
IwResult check_Iw(const DecompContext& ctx, const std::vector<Integer>& w, std::uint64_t node_budget = 0);

struct DecompOptions {
  std::optional<std::size_t> sample;  // number of random minimal vectors; all 98280 pairs when empty
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t node_budget = 0;      // per check
  std::string checkpoint_dir;
  bool resume = false;
  std::string input_hash;
};

struct DecompCheck {
  std::size_t index = 0;            // position in minimal_i1()
  std::vector<Integer> v;
  std::vector<Integer> w;
  IwResult result;
};

struct DecompReport {
  std::vector<DecompCheck> checks;  // ascending index
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  /// Sum of norm-4 counts times 2 (for -v): the norm-6 vectors of G seen
  /// through the checked v. Equals the number of norm-6 vectors of G when
  /// the run is exhaustive.
  std::uint64_t norm6 = 0;
  std::size_t total = 0;            // minimal vectors of I1 up to sign
  bool exhaustive = false;
};

DecompReport verify_decomposition(const DecompContext& ctx, const DecompOptions& opt);

void write_decomp_certificate(std::ostream& os, const DecompContext& ctx, const DecompReport& r,
                              const std::map<std::string, std::string>& inputs);

}  // namespace lat72
