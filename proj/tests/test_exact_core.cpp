#include <random>
#include <sstream>

#include "doctest.h"
#include "lat72/error.hpp"
#include "lat72/lattice.hpp"
#include "lat72/linalg.hpp"

using namespace lat72;

namespace {

IntegerLattice gram(std::initializer_list<std::initializer_list<Rational>> g) { return IntegerLattice(RatMatrix(g)); }

}  // namespace

TEST_CASE("dual of small lattices") {
  CHECK(dual(gram({{1}})).gram() == RatMatrix{{1}});
  auto a2 = gram({{2, 1}, {1, 2}});
  CHECK(dual(a2).determinant() == Rational(1, 3));
  CHECK(dual(dual(a2)).gram() == a2.gram());
}

TEST_CASE("parity and unimodularity predicates") {
  auto a1 = gram({{2}});
  CHECK(is_even(a1));
  CHECK_FALSE(is_unimodular(a1));
  auto z8 = IntegerLattice(RatMatrix::identity(8));
  CHECK_FALSE(is_even(z8));
  CHECK(is_unimodular(z8));
  auto half = gram({{Rational(1, 2)}});
  CHECK_FALSE(is_even(half));
  CHECK_FALSE(is_unimodular(half));
}

TEST_CASE("constructor rejects invalid Gram matrices") {
  CHECK_THROWS_AS(gram({{1, 2}, {2, 1}}), Error);
  CHECK_THROWS_AS(gram({{2, 1}, {0, 2}}), Error);
  RatMatrix basis{{1, 0}, {0, 1}};
  CHECK_THROWS_AS(IntegerLattice(RatMatrix{{2, 0}, {0, 2}}, Ambient{basis, RatMatrix::identity(2)}), Error);
}

TEST_CASE("sublattice index") {
  auto a2 = gram({{2, 1}, {1, 2}});
  IntMatrix twice{{2, 0}, {0, 2}};
  CHECK(sublattice_index(a2, twice) == 4);
  CHECK(sublattice_index(a2, IntMatrix::identity(2)) == 1);
  IntMatrix gens{{1, 1}, {1, -1}, {2, 0}};
  CHECK(sublattice_index(a2, gens) == 2);

  auto amb = IntegerLattice::from_basis(RatMatrix::identity(3), RatMatrix::identity(3));
  auto sub = IntegerLattice::from_basis(RatMatrix{{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}, RatMatrix::identity(3));
  CHECK(sublattice_index(amb, sub) == 8);
  auto bad = IntegerLattice::from_basis(RatMatrix{{Rational(1, 2), 0, 0}, {0, 1, 0}, {0, 0, 1}}, RatMatrix::identity(3));
  CHECK_THROWS_AS(sublattice_index(amb, bad), Error);
  try {
    sublattice_index(amb, bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotASublattice);
  }
}

TEST_CASE("orthogonal sum and rescaling") {
  auto a1 = gram({{2}});
  CHECK(orthogonal_sum(a1, a1).gram() == RatMatrix{{2, 0}, {0, 2}});
  auto a2 = gram({{2, 1}, {1, 2}});
  CHECK(rescale(a2, 1) == a2);
  CHECK(rescale(rescale(a2, Rational(3, 7)), Rational(7, 3)) == a2);
  auto e = IntegerLattice::from_basis(RatMatrix{{1, 0}}, RatMatrix{{2, 0}, {0, 3}});
  auto f = IntegerLattice::from_basis(RatMatrix{{0, 1}}, RatMatrix{{2, 0}, {0, 3}});
  auto s = orthogonal_sum(e, f);
  REQUIRE(s.ambient().has_value());
  CHECK(s.ambient()->basis.rows() == 2);
  CHECK(s.ambient()->basis.cols() == 4);
}

TEST_CASE("determinant and HNF") {
  IntMatrix m{{2, 3, 1}, {4, 1, 0}, {0, 5, 7}};
  CHECK(determinant(m) == -50);
  IntMatrix z{{0, 1}, {1, 0}};
  CHECK(determinant(z) == -1);
  IntMatrix gens{{4, 6}, {6, 9}, {2, 3}};
  CHECK(hermite_basis(gens).rows() == 1);
  auto k = integer_left_kernel(IntMatrix{{2}, {4}, {6}});
  CHECK(k.rows() == 2);
  for (std::size_t i = 0; i < k.rows(); ++i) CHECK(2 * k(i, 0) + 4 * k(i, 1) + 6 * k(i, 2) == 0);
  auto u = complete_to_unimodular({Integer(3), Integer(5), Integer(7)});
  CHECK(abs(determinant(u)) == 1);
  CHECK(u(0, 0) == 3);
  CHECK(u(0, 2) == 7);
}

TEST_CASE("modular HNF agrees with the plain one") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> entry(-20, 20);
  for (int d : {2, 6, 49}) {
    for (int trial = 0; trial < 10; ++trial) {
      IntMatrix gens(4, 5);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 5; ++j) gens(i, j) = entry(rng);
      IntMatrix all(9, 5);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 5; ++j) all(i, j) = gens(i, j);
      for (std::size_t j = 0; j < 5; ++j) all(4 + j, j) = d;
      CHECK(hermite_basis(gens, d) == hermite_basis(all));
    }
  }
}

TEST_CASE("Gram file round trip") {
  RatMatrix g{{2, Rational(1, 2)}, {Rational(1, 2), 3}};
  std::stringstream ss;
  write_gram(ss, g);
  CHECK(ss.str() == "2\n2 1/2\n1/2 3\n");
  CHECK(read_gram(ss) == g);
  std::stringstream bad("2\n1 2\n3\n");
  CHECK_THROWS_AS(read_gram(bad), Error);
}
