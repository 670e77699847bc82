#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lat72/catalog.hpp"
#include "lat72/census.hpp"
#include "lat72/decomp.hpp"
#include "lat72/error.hpp"
#include "lat72/linalg.hpp"

using namespace lat72;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::SelfCheckFailed;
}

DecompContext& gamma_context() {
  static DecompContext* ctx = [] {
    auto* c = new DecompContext(split(build_gamma()));
    c->prepare_minimal_i1();
    return c;
  }();
  return *ctx;
}

std::vector<Integer> minus(const std::vector<Integer>& a, const std::vector<Integer>& b) {
  std::vector<Integer> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("lat72_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("split of Gamma") {
  const auto& b = gamma_context().bundle();
  CHECK(b.n == 24);
  CHECK(b.index_kernel == Integer(1) << 24);
  CHECK(b.index_image == Integer(1) << 24);
  CHECK(b.K1.determinant() == Integer(1) << 24);
  CHECK(b.I1.determinant() == Rational(1, 1 << 24));
  CHECK(gamma_context().k2_short() == 0);
  CHECK(gamma_context().minimal_i1().size() == 98280);
}

TEST_CASE("split needs the block structure") {
  CHECK(kind_of([] { split(build_e8()); }) == ErrorKind::StructureMismatch);
  // Twelve orthogonal copies of A2 in a three-block ambient: blocks fine, indices wrong.
  RatMatrix g(6, 6);
  for (std::size_t i = 0; i < 6; ++i) g(i, i) = 2;
  auto l = IntegerLattice::from_basis(RatMatrix::identity(6), g);
  CHECK(kind_of([&] { split(l); }) == ErrorKind::InvariantFailure);
  RatMatrix h = g;
  h(0, 3) = h(3, 0) = 1;
  CHECK(kind_of([&] { split(IntegerLattice::from_basis(RatMatrix::identity(6), h)); }) ==
        ErrorKind::StructureMismatch);
}

TEST_CASE("minimum certificates with checkpoints") {
  auto e8 = build_e8();
  auto c = certify_minimum(e8, 2);
  CHECK(c.verified);
  CHECK(c.below == 0);
  CHECK_FALSE(certify_minimum(e8, 4).verified);
  CHECK(certify_minimum(e8, 4).below == 240);
  CHECK(kind_of([&] { certify_minimum(e8, 2, {.node_budget = 3}); }) == ErrorKind::BudgetExceeded);

  auto leech = build_leech(false);
  auto dir = scratch_dir("slices");
  SliceOptions opt{.checkpoint_dir = dir.string(), .tag = "leech"};
  auto first = certify_minimum(leech, 4, opt);
  CHECK(first.verified);
  CHECK(first.slices > 1);
  opt.resume = true;
  auto again = certify_minimum(leech, 4, opt);
  CHECK(again.verified);
  CHECK(again.slices_resumed == again.slices);
  CHECK(again.nodes == 0);
  CHECK(kind_of([&] { certify_minimum(e8, 2, opt); }) == ErrorKind::CheckpointCorrupt);
  std::filesystem::remove_all(dir);
}

TEST_CASE("lifting minimal vectors of I1") {
  auto& ctx = gamma_context();
  const auto& v = ctx.minimal_i1().front();
  auto lift = lift_minimal(ctx, v);
  CHECK(ctx.in_k2(minus(lift.w, lift.second)));
  CHECK(ctx.reduce_mod_k2(lift.second) == lift.w);
  std::vector<Integer> joined(v);
  joined.insert(joined.end(), lift.w.begin(), lift.w.end());
  CHECK(ctx.gamma_coords(joined).has_value());
  // Any other element of the coset is also a lift.
  std::vector<Integer> shifted = lift.w;
  for (std::size_t j = 0; j < shifted.size(); ++j) shifted[j] += ctx.bundle().k2(3, j);
  joined.resize(24);
  joined.insert(joined.end(), shifted.begin(), shifted.end());
  CHECK(ctx.gamma_coords(joined).has_value());

  CHECK(kind_of([&] { lift_minimal(ctx, std::vector<Integer>(24, 0)); }) == ErrorKind::PreconditionViolated);
  std::vector<Integer> twice(v);
  for (auto& x : twice) x *= 2;
  CHECK(kind_of([&] { lift_minimal(ctx, twice); }) == ErrorKind::PreconditionViolated);
}

TEST_CASE("I(w) checks on Gamma") {
  auto& ctx = gamma_context();
  auto zero = check_Iw(ctx, std::vector<Integer>(48, 0));
  CHECK(zero.pass);
  CHECK(zero.norm4 == 0);
  for (std::size_t i : {0ul, 5000ul, 77777ul}) {
    auto r = check_Iw(ctx, lift_minimal(ctx, ctx.minimal_i1()[i]).w);
    CHECK(r.pass);
    CHECK(r.nodes > 0);
  }
  CHECK(kind_of([&] { check_Iw(ctx, lift_minimal(ctx, ctx.minimal_i1()[1]).w, 100); }) == ErrorKind::BudgetExceeded);
}

TEST_CASE("sampled verification, resume and certificate") {
  auto& ctx = gamma_context();
  auto dir = scratch_dir("decomp");
  DecompOptions opt;
  opt.sample = 3;
  opt.seed = 9;
  opt.checkpoint_dir = dir.string();
  opt.input_hash = "h";
  auto r = verify_decomposition(ctx, opt);
  CHECK(r.checks.size() == 3);
  CHECK(r.passed == 3);
  CHECK(r.norm6 == 0);
  CHECK_FALSE(r.exhaustive);

  opt.resume = true;
  auto again = verify_decomposition(ctx, opt);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again.checks[i].w == r.checks[i].w);
    CHECK(again.checks[i].result.nodes == r.checks[i].result.nodes);
  }
  std::ostringstream a, b;
  write_decomp_certificate(a, ctx, r, {{"structure", "x"}});
  write_decomp_certificate(b, ctx, again, {{"structure", "x"}});
  CHECK(a.str() == b.str());
  CHECK(a.str().find("passed: 3\n") != std::string::npos);

  opt.input_hash = "other";
  CHECK(kind_of([&] { verify_decomposition(ctx, opt); }) == ErrorKind::CheckpointCorrupt);
  std::filesystem::remove_all(dir);
}

// On the lattice of the second shipped structure the norm-6 vectors with first
// component a = w + x (w a class representative, x in W_2(w)) are counted twice:
// by the census, two per y in W_2(w) whose coset w + x + y + 2L has minimum 4,
// and by the decomposition, as the norm-4 vectors of the coset lifted from a.
TEST_CASE("census and decomposition agree on norm-6 vectors") {
  auto leech = build_leech(false);
  auto sp = load_structure(data_directory() + "/leech_structure_alt.txt");
  CensusContext cc(swap_halves(polarization_from_structure(leech, sp)));
  cc.prepare_classifier();
  cc.prepare_classes();
  DecompContext dc(split(build_gamma(leech, sp).blocks));
  REQUIRE(dc.k2_short() == 0);

  int fails = 0, passes = 0;
  for (std::size_t c = 0; c < 4095 && (fails < 2 || passes < 1); ++c) {
    const auto& w = cc.classes().classes[c].rep();
    auto w2 = w2_set(cc, w);
    for (std::size_t i = 0; i < w2.size() && (fails < 2 || passes < 1); ++i) {
      std::uint64_t hits = 0;
      for (const auto& y : w2) {
        Coords v = w;
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += w2[i][k] + y[k];
        hits += cc.classifier().class_min(class_key(v)) == 4;
      }
      if (hits ? fails >= 2 : passes >= 1) continue;
      std::vector<Integer> a(24);
      for (std::size_t k = 0; k < 24; ++k) a[k] = w[k] + w2[i][k];
      auto r = check_Iw(dc, lift_minimal(dc, a).w);
      CHECK(r.norm4 == 2 * hits);
      CHECK(r.pass == (hits == 0));
      (hits ? fails : passes)++;
    }
  }
  CHECK(fails == 2);
  CHECK(passes == 1);
}
