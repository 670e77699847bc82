#include <random>

#include "doctest.h"
#include "lat72/enumerate.hpp"
#include "lat72/error.hpp"
#include "lat72/linalg.hpp"
#include "support/brute_force.hpp"

using namespace lat72;

TEST_CASE("one-dimensional counts") {
  auto z = IntegerLattice(RatMatrix{{1}});
  auto rep = short_vectors(z, 4);
  CHECK(rep.count(1) == 2);
  CHECK(rep.count(4) == 2);
  CHECK(rep.total() == 4);
  CHECK(rep.complete);
}

TEST_CASE("A2 minimum and reduction") {
  auto a2 = IntegerLattice(RatMatrix{{2, 1}, {1, 2}});
  CHECK(minimum(a2) == 2);
  CHECK(short_vectors(a2, 2).count(2) == 6);
  auto red = reduce_basis(IntegerLattice(RatMatrix{{2, 0}, {0, 2}}));
  CHECK(red.transform == IntMatrix::identity(2));
  auto skew = IntegerLattice(RatMatrix{{2, 7}, {7, 26}});
  auto rs = reduce_basis(skew);
  CHECK(rs.lattice.determinant() == skew.determinant());
  CHECK(rs.lattice.gram()(0, 0) == 2);
}

TEST_CASE("coset enumeration includes the zero vector and is symmetric") {
  auto a2 = IntegerLattice(RatMatrix{{2, 1}, {1, 2}});
  std::vector<Rational> zero(2, Rational(0));
  auto rep = coset_short_vectors(a2, zero, 2);
  CHECK(rep.count(0) == 1);
  CHECK(rep.count(2) == 6);
  std::vector<Rational> t{Rational(1, 3), Rational(1, 3)}, mt{Rational(-1, 3), Rational(-1, 3)};
  auto p = coset_short_vectors(a2, t, 4);
  auto m = coset_short_vectors(a2, mt, 4);
  CHECK(p.count_by_norm == m.count_by_norm);
  CHECK(p.count(Rational(2, 3)) == 3);
}

TEST_CASE("collected vectors carry exact norms in a deterministic order") {
  auto l = IntegerLattice(RatMatrix{{4, 1, 0}, {1, 3, 1}, {0, 1, 5}});
  EnumOptions opt;
  opt.collect_vectors = true;
  auto a = short_vectors(l, 12, opt);
  auto b = short_vectors(l, 12, opt);
  REQUIRE(a.vectors.size() * 2 == a.total());
  for (std::size_t i = 0; i < a.vectors.size(); ++i) {
    CHECK(a.vectors[i].coords == b.vectors[i].coords);
    CHECK(l.norm(a.vectors[i].coords) == a.vectors[i].norm);
  }
}

TEST_CASE("node budget marks the report incomplete") {
  auto l = IntegerLattice(RatMatrix::identity(6));
  EnumOptions opt;
  opt.node_budget = 10;
  auto rep = short_vectors(l, 6, opt);
  CHECK_FALSE(rep.complete);
  CHECK_THROWS_AS(rep.require_complete(), Error);
}

TEST_CASE("agreement with the coordinate-box oracle") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t n = 4 + trial % 5;
    auto g = oracle::random_gram(rng, n);
    auto lat = IntegerLattice::from_integer_gram(oracle::to_matrix(g));
    const std::int64_t bound = 12 + trial % 7;
    auto expect = oracle::box_census(g, std::vector<std::int64_t>(n, 0), 1, bound);
    auto rep = short_vectors(lat, bound);
    std::map<Rational, std::uint64_t> want;
    for (auto [k, v] : expect) want[Rational(static_cast<long>(k))] = v;
    CHECK(rep.count_by_norm == want);

    std::uniform_int_distribution<int> coord(-5, 5);
    const std::int64_t den = 2 + trial % 3;
    std::vector<std::int64_t> t(n);
    std::vector<Rational> tq(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = coord(rng);
      tq[i] = Rational(static_cast<long>(t[i]), static_cast<long>(den));
      tq[i].canonicalize();
    }
    auto cexpect = oracle::box_census(g, t, den, bound);
    auto crep = coset_short_vectors(lat, tq, bound);
    std::map<Rational, std::uint64_t> cwant;
    for (auto [k, v] : cexpect) {
      Rational q(static_cast<long>(k), static_cast<long>(den * den));
      q.canonicalize();
      cwant[q] += v;
    }
    bool integral = true;
    for (auto ti : t) integral = integral && ti % den == 0;
    if (integral) cwant[Rational(0)] = 1;
    CHECK(crep.count_by_norm == cwant);
  }
}

TEST_CASE("slices partition the search") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 1 + trial % 6;
    auto lat = IntegerLattice::from_integer_gram(oracle::to_matrix(oracle::random_gram(rng, n)));
    Enumerator e(lat);
    std::vector<Rational> t(n, Rational(0));
    if (trial % 2) t[0] = Rational(1, 3);
    const Rational bound = 30;
    auto whole = e.visit(t, bound, true, {});
    std::map<Rational, std::uint64_t> sum;
    bool more = true;
    std::size_t slices = 0;
    for (std::size_t c = 0; more; ++c, ++slices) {
      auto part = e.visit_slice(t, bound, true, {}, c, more);
      REQUIRE(part.complete);
      for (auto [k, v] : part.count_by_norm) sum[k] += v;
      REQUIRE(slices < 100);
    }
    CHECK(sum == whole.count_by_norm);
  }
}

TEST_CASE("node budget applies to a slice") {
  Enumerator e(IntegerLattice(RatMatrix::identity(6)));
  bool more = false;
  auto rep = e.visit_slice({}, 6, true, {}, 0, more, 10);
  CHECK_FALSE(rep.complete);
}
