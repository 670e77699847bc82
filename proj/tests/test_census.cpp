#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "lat72/catalog.hpp"
#include "lat72/census.hpp"
#include "lat72/error.hpp"
#include "lat72/hermitian.hpp"

using namespace lat72;

namespace {

// One context for the whole file: the class minima take ~20 s to build.
CensusContext& leech_context() {
  static CensusContext* ctx = [] {
    auto leech = build_leech(false);
    auto* c = new CensusContext(
        swap_halves(polarization_from_structure(leech, load_structure(leech_structure_path()))));
    c->prepare_classes();
    c->prepare_min_vectors();
    c->prepare_classifier();
    return c;
  }();
  return *ctx;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("lat72_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("closed-form norm-8 counts") {
  auto r = norm8_assembly(0);
  CHECK(r.type_counts.at("(8,0,0)") == 589680);
  CHECK(r.type_counts.at("(4,4,0)") == 28304640);
  CHECK(r.type_counts.at("(3,3,2)") == 4830658560ULL);
  CHECK(r.type_counts.at("(4,2,2)") == 1358622720ULL);
  CHECK(r.kissing == 6218175600ULL);
  CHECK(r.provenance == "formula");

  auto s = norm8_assembly(104832);
  CHECK(s.type_counts.at("(4,2,2)") == 1358622720ULL - 72 * 104832ULL);
  CHECK(s.type_counts.at("(8,0,0)") == 589680);
}

TEST_CASE("design moments") {
  DesignTable expected{46488, 78848, 47216, 18944, 4536, 512, 16};
  CHECK(design_counts_from_moments(196560, 8, 8, 2048 * 48) == expected);
  std::uint64_t sum = 0;
  for (auto x : expected) sum += x;
  CHECK(sum == 196560);
  // An impossible parity count has no integral solution.
  CHECK_THROWS_AS(design_counts_from_moments(196560, 8, 8, 2048 * 48 + 1), Error);
}

TEST_CASE("class table of N/2L") {
  auto& ctx = leech_context();
  const auto& t = ctx.classes();
  REQUIRE(t.classes.size() == 4095);
  CHECK(t.vectors_grouped == 196560);
  std::set<std::uint64_t> keys;
  for (const auto& f : t.classes) {
    keys.insert(f.key);
    REQUIRE(f.vectors.size() == 48);
  }
  CHECK(keys.size() == 4095);
  // Spot-check frame orthogonality on a few classes.
  for (std::size_t c : {0ul, 1000ul, 4094ul}) {
    const auto& f = t.classes[c];
    for (std::size_t i = 0; i < 24; ++i)
      for (std::size_t j = 0; j < 24; ++j) CHECK(ctx.inner(f.vectors[i], f.vectors[j]) == (i == j ? 8 : 0));
    for (std::size_t i = 0; i < 24; ++i)
      for (std::size_t k = 0; k < 24; ++k) CHECK(f.vectors[24 + i][k] == -f.vectors[i][k]);
  }
}

TEST_CASE("W-sets on sampled classes") {
  auto& ctx = leech_context();
  for (auto c : sample_classes(4095, 4, 11)) {
    const auto& w = ctx.classes().classes[c].rep();
    auto w2 = w2_set(ctx, w);
    CHECK(w2.size() == 48);
    CHECK(is_24a1(ctx, w, w2));
    CHECK(w3_set(ctx, w).size() == 4096);
  }
}

TEST_CASE("design table by direct summation") {
  auto& ctx = leech_context();
  auto moments = design_counts(false, ctx, ctx.classes().classes[0].rep());
  for (auto c : sample_classes(4095, 3, 5)) CHECK(design_counts(true, ctx, ctx.classes().classes[c].rep()) == moments);
}

TEST_CASE("fast path agrees with coset enumeration") {
  auto& ctx = leech_context();
  const auto& w = ctx.classes().classes[7].rep();
  auto w2 = w2_set(ctx, w);
  for (std::size_t i = 0; i < 6; ++i) {
    Coords v = w;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += w2[i][k] + w2[(5 * i + 3) % 48][k];
    CHECK(ctx.coset_counts(v) == ctx.coset_counts_fast(v));
  }
}

TEST_CASE("sampled census and checkpoints") {
  auto& ctx = leech_context();
  auto dir = scratch_dir("census");
  CensusOptions opt;
  opt.sample = sample_classes(4095, 3, 2);
  opt.cross_check = 50;
  opt.checkpoint_dir = dir.string();
  opt.input_hash = "abc";
  auto r = norm6_census(ctx, opt);
  CHECK(r.b6 == 0);
  CHECK(r.anomalies == 0);
  CHECK(r.classes_done == 3);
  CHECK_FALSE(r.complete);
  CHECK(r.fast_path_checked == 50);
  CHECK(r.enumerated_422 == 3 * 48 * 3 * 48 * 48);

  opt.resume = true;
  opt.cross_check = 0;
  auto again = norm6_census(ctx, opt);
  CHECK(again.enumerated_422 == r.enumerated_422);

  auto file = dir / ("class_" + std::to_string((*opt.sample)[0]) + ".ckpt");
  REQUIRE(std::filesystem::exists(file));
  opt.input_hash = "other";
  CHECK_THROWS_WITH_AS(norm6_census(ctx, opt), doctest::Contains("different inputs"), Error);
  opt.input_hash = "abc";
  {
    std::ofstream os(file);
    os << "lat72-census-checkpoint 1\ninput: abc\nclass: 1\n";
  }
  try {
    norm6_census(ctx, opt);
    FAIL("truncated checkpoint accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CheckpointCorrupt);
  }
  std::filesystem::remove_all(dir);
}
