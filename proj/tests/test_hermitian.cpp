#include <random>
#include <sstream>

#include "doctest.h"
#include "lat72/catalog.hpp"
#include "lat72/enumerate.hpp"
#include "lat72/error.hpp"
#include "lat72/hermitian.hpp"
#include "lat72/linalg.hpp"

using namespace lat72;

namespace {

HermitianLattice unit_rank1() { return HermitianLattice(QAMatrix{{QA(1)}}); }

StructurePair companion() { return {IntMatrix{{2, 1}, {1, 4}}, IntMatrix{{0, 1}, {-2, 1}}}; }

}  // namespace

TEST_CASE("Z[alpha] scalar algebra") {
  const ZA al = ZA::alpha();
  CHECK(al * al == al - ZA(2));
  CHECK(al * ZA::beta() == ZA(2));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(-30, 30);
  for (int i = 0; i < 200; ++i) {
    ZA x(d(rng), d(rng)), y(d(rng), d(rng));
    CHECK((x * y).conj() == x.conj() * y.conj());
    CHECK(ZA(x.trace()) == x + x.conj());
    CHECK(ZA(x.norm()) == x * x.conj());
    CHECK(x.norm() >= 0);
    if (!y.is_zero()) {
      auto [q, r] = divmod(x, y);
      CHECK(q * y + r == x);
      CHECK(r.norm() < y.norm());
    }
  }
  CHECK(sqrt_minus7() * sqrt_minus7() == QA(-7));
  CHECK(parse_qa(to_string(QA(Rational(3, 2), Rational(-5)))) == QA(Rational(3, 2), Rational(-5)));
}

TEST_CASE("Barnes lattice") {
  auto pb = barnes();
  for (std::size_t i = 0; i < 3; ++i) CHECK(pb.hgram()(i, i) == QA(2));
  CHECK(same_module(hermitian_dual(pb), pb));
  CHECK(trace_lattice(pb, 1).determinant() == 343);
  CHECK(trace_dual_check(pb, 1));
  CHECK(trace_dual_check(pb, Rational(1, 7)));
  auto t = trace_lattice(pb, 1);
  CHECK(is_even(t));
  CHECK(minimum(t) == 4);
}

TEST_CASE("trace lattice of the rank-one unit form") {
  auto t = trace_lattice(unit_rank1(), 1);
  CHECK(t.gram() == RatMatrix{{2, 1}, {1, 4}});
  CHECK(hermitian_dual(unit_rank1()).hgram() == QAMatrix{{QA(1)}});
  CHECK_THROWS_AS(trace_lattice(unit_rank1(), Rational(1, 7), true), Error);
  CHECK_NOTHROW(trace_lattice(unit_rank1(), Rational(1, 7), false));
}

TEST_CASE("tensor products") {
  auto pb = barnes();
  auto t = hermitian_tensor(pb, pb);
  CHECK(t.rank() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(t.hgram()(i, i) == QA(4));
  // det of trace(P (x) Q, s) = (7^{deg} / ...) exactly: compare with the direct formula on small cases.
  auto u = unit_rank1();
  CHECK(trace_lattice(hermitian_tensor(pb, u), 1).gram() == trace_lattice(pb, 1).gram());
  CHECK(galois_conjugate(galois_conjugate(pb)) == pb);
}

TEST_CASE("structure validation") {
  CHECK(validate_structure(companion()));
  StructurePair bad{IntMatrix{{2, 1}, {1, 4}}, IntMatrix::identity(2)};
  CHECK_FALSE(validate_structure(bad));
  CHECK(structure_violations(bad).front() == "AFA^t = 2F");
  CHECK_THROWS_AS(validate_structure({IntMatrix::identity(2), IntMatrix::identity(3)}), Error);
  std::stringstream ss;
  write_structure(ss, companion());
  auto back = read_structure(ss);
  CHECK(back.A == companion().A);
  std::stringstream tampered("2\n2 1\n1 4\nSTRUCTURE\n2\n1 0\n0 1\n");
  CHECK_THROWS_AS(read_structure(tampered), Error);
}

TEST_CASE("find_structure and round trip on small lattices") {
  auto toy = IntegerLattice::from_integer_gram(IntMatrix{{2, 1}, {1, 4}});
  auto sp = find_structure(toy);
  CHECK(validate_structure(sp));
  auto hs = hermitian_from_structure(toy, sp, 1);
  CHECK(hs.lattice.rank() == 1);
  CHECK(hs.lattice.hgram() == QAMatrix{{QA(1)}});
  CHECK_THROWS_AS(find_structure(IntegerLattice(RatMatrix::identity(2))), Error);

  auto e8 = build_e8();
  auto se = find_structure(e8);
  CHECK(validate_structure(se));
  auto he = hermitian_from_structure(e8, se, 1);
  CHECK(he.lattice.rank() == 4);
  CHECK(abs(determinant(he.trace_basis)) == 1);
  CHECK(trace_lattice(he.lattice, 1).gram() == convert<Rational>(he.trace_basis * se.F * he.trace_basis.transpose()));
}

TEST_CASE("automorphism groups") {
  CHECK(hermitian_automorphisms(unit_rank1()).order == 2);
  auto pb = hermitian_automorphisms(barnes());
  CHECK(pb.order == 336);
  CHECK_FALSE(pb.generators.empty());
  CHECK_THROWS_AS(hermitian_automorphisms(hermitian_tensor(barnes(), barnes())), Error);
}

TEST_CASE("Galois isometries") {
  auto toy = IntegerLattice::from_integer_gram(IntMatrix{{2, 1}, {1, 4}});
  auto y = find_galois_isometry(toy, companion());
  REQUIRE(y.has_value());
  CHECK(*y * companion().F * y->transpose() == companion().F);
  auto e8 = build_e8();
  auto se = find_structure(e8);
  auto ye = find_galois_isometry(e8, se);
  REQUIRE(ye.has_value());
  auto block = build_galois_block(se, *ye);
  CHECK(block.rows() == 24);
  CHECK(abs(determinant(block)) == 1);
  CHECK_THROWS_AS(build_galois_block(se, IntMatrix::identity(8)), Error);
}
