#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lat72/enumerate.hpp"
#include "lat72/polarization.hpp"

namespace lat72 {

/// Integer coordinates in the basis of the polarized lattice L.
using Coords = std::vector<std::int64_t>;

/// Coordinates mod 2 packed into a word (rank <= 64); the class of v in L/2L.
std::uint64_t class_key(const Coords& v);

/// A norm-8 class of N/2L: its 48 vectors (+-k_1, ..., +-k_24), k_i first.
struct Frame {
  std::uint64_t key = 0;
  std::vector<Coords> vectors;
  const Coords& rep() const { return vectors.front(); }
};

/// The nonzero classes of N/2L, each represented by its frame of norm-8 vectors.
struct ClassTable {
  std::vector<Frame> classes;
  std::uint64_t vectors_grouped = 0;
};

/// Minimal norm of every class of Leech/2Leech (0 for the zero class, then 4,
/// 6 or 8), from one enumeration up to norm 6. Keys are class_key values.
class LeechClassifier {
 public:
  explicit LeechClassifier(const Enumerator& leech);
  int class_min(std::uint64_t key) const { return table_[key]; }
  std::uint64_t norm4() const { return n4_; }
  std::uint64_t norm6() const { return n6_; }

 private:
  std::vector<std::uint8_t> table_;
  std::uint64_t n4_ = 0;
  std::uint64_t n6_ = 0;
};

/// Shared read-only data for the counting routines on a polarization (M, N)
/// of the Leech lattice with (M, Q/2) and (N, Q/2) both isometric to Leech.
/// The prepare_* calls build the expensive parts; everything else is const
/// and may be used from several threads.
class CensusContext {
 public:
  explicit CensusContext(Polarization p);

  const Polarization& polarization() const { return p_; }
  const IntMatrix& gram() const { return f_; }
  std::int64_t inner(const Coords& x, const Coords& y) const;

  void prepare_classes();      // norm-8 vectors of N grouped into frames
  void prepare_min_vectors();  // norm-8 vectors of M
  void prepare_classifier();   // Leech/2Leech class minima
  /// Reuses class minima built for the same Leech basis.
  void set_classifier(std::shared_ptr<const LeechClassifier> c) { classifier_ = std::move(c); }
  std::shared_ptr<const LeechClassifier> shared_classifier() const { return classifier_; }
  const ClassTable& classes() const;
  const std::vector<Coords>& min_vectors_m() const;
  const LeechClassifier& classifier() const;

  /// {x in M : Q(x + w) = q} by coset enumeration in M; x in L coordinates.
  std::vector<Coords> shifted_set(const Coords& w, int q) const;

  /// Counts by norm of the vectors of norm <= 8 in v + 2L, by enumeration.
  std::map<Rational, std::uint64_t> coset_counts(const Coords& v) const;

  /// Same counts predicted from the class table (requires prepare_classifier).
  std::map<Rational, std::uint64_t> coset_counts_fast(const Coords& v) const;

 private:
  Polarization p_;
  IntMatrix f_;
  Matrix<std::int64_t> f64_;
  RatMatrix m_inv_;  // L coordinates -> M coordinates
  Enumerator em_;
  Enumerator two_l_;
  std::optional<ClassTable> classes_;
  std::optional<std::vector<Coords>> xm_;
  std::shared_ptr<const LeechClassifier> classifier_;
};

/// Groups the 196560 norm-8 vectors of N into 4095 frames of 48; throws
/// InvariantFailure if a class does not consist of 48 pairwise orthogonal
/// (up to sign) vectors.
ClassTable class_table(const CensusContext& ctx);

/// W_2(w) = {x in M : Q(x + w) = 2} and W_3(w) = {x in M : Q(x + w) = 3}.
std::vector<Coords> w2_set(const CensusContext& ctx, const Coords& w);
std::vector<Coords> w3_set(const CensusContext& ctx, const Coords& w);

/// True when {x + w : x in W_2(w)} is 24 orthogonal pairs +-v of norm 4.
bool is_24a1(const CensusContext& ctx, const Coords& w, const std::vector<Coords>& w2);

using DesignTable = std::array<std::uint64_t, 7>;

/// n_i = #{x in X : (x, w) = +-i} for the minimal vectors X of M. The direct
/// path sums over X; the other solves the 11-design moment equations together
/// with the parity count sum_{i odd} n_i = 2048 * 48.
DesignTable design_counts(bool direct, const CensusContext& ctx, const Coords& w);

/// Moment path on its own: needs only |X| and the two norms.
DesignTable design_counts_from_moments(std::uint64_t set_size, std::int64_t norm_x, std::int64_t norm_w,
                                       std::uint64_t odd_total);

struct CensusReport {
  std::uint64_t b6 = 0;
  /// (8,0,0), (4,4,0), (3,3,2), (4,2,2) in Q-units of the three components.
  std::map<std::string, std::uint64_t> type_counts;
  std::uint64_t kissing = 0;
  std::string provenance;  // "formula" or "enumeration"
  std::uint64_t classes_done = 0;
  std::uint64_t classes_total = 0;
  bool complete = false;
  /// Enumerated type-(4,2,2) count over the classes done: three positions for
  /// the norm-8 component, ordered pairs for the other two.
  std::uint64_t enumerated_422 = 0;
  /// Pairs whose coset had minimum 6 (these would be odd vectors; must be 0).
  std::uint64_t anomalies = 0;
  std::uint64_t fast_path_checked = 0;
  std::vector<std::size_t> classes;  // indices processed, ascending
};

/// Closed-form counts of the norm-8 vectors of L(M, N, 3) given b6.
CensusReport norm8_assembly(std::uint64_t b6);

struct CensusOptions {
  std::optional<std::vector<std::size_t>> sample;  // class indices; all when empty
  std::string checkpoint_dir;                      // empty: no checkpoints
  bool resume = false;
  unsigned threads = 1;
  bool fast_path = true;
  std::size_t cross_check = 1000;  // enumerated pairs compared against the fast path
  std::uint64_t seed = 1;
  std::string input_hash;  // recorded in checkpoints; mismatches are refused
};

/// Norm-6 census of L(M, N, 3): for each class w and ordered pair (x, y) in
/// W_2(w)^2 the coset w + x + y + 2L contributes 2 norm-6 vectors when its
/// minimum is 4 and 48 norm-8 vectors (per position) when it is 8.
CensusReport norm6_census(const CensusContext& ctx, const CensusOptions& opt);

/// Sorted random subset of class indices.
std::vector<std::size_t> sample_classes(std::size_t total, std::size_t k, std::uint64_t seed);

void write_census_report(std::ostream& os, const CensusReport& r, const std::map<std::string, std::string>& inputs);

}  // namespace lat72
