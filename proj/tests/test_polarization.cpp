#include <ostream>
#include <vector>

#include "doctest.h"
#include "lat72/catalog.hpp"
#include "lat72/enumerate.hpp"
#include "lat72/error.hpp"
#include "lat72/linalg.hpp"
#include "lat72/polarization.hpp"

using namespace lat72;

namespace {

// Q(x) mod 2 straight from the integer Gram matrix.
bool q_direct(const IntMatrix& g, unsigned x) {
  Integer s = 0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.rows(); ++j)
      if ((x >> i & 1) && (x >> j & 1)) s += g(i, j);
  return Integer(s / 2) % 2 != 0;
}

F2Vector bits(unsigned x) { return F2Vector(x); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::SelfCheckFailed;
}

}  // namespace

TEST_CASE("small quadratic spaces") {
  auto h = F2QuadSpace::hyperbolic_plane();
  auto a = F2QuadSpace::anisotropic_plane();
  CHECK(h.nondegenerate());
  CHECK(witt_defect(h) == 0);
  CHECK(witt_defect(a) == 1);
  auto uv = isotropic_complement_pair(h);
  REQUIRE(uv.u.size() == 1);
  CHECK(uv.u[0] == bits(1));
  CHECK(uv.v[0] == bits(2));
  CHECK(kind_of([&] { isotropic_complement_pair(a); }) == ErrorKind::DefectOne);

  std::vector<F2Vector> deg(2);
  auto d = F2QuadSpace(deg, {false, false});
  CHECK_FALSE(d.nondegenerate());
  CHECK(kind_of([&] { witt_defect(d); }) == ErrorKind::Degenerate);
}

TEST_CASE("E8 modulo 2") {
  auto e8 = build_e8();
  auto s = mod2_space(e8);
  auto g = e8.integer_gram();
  int aniso = 0, iso = 0;
  for (unsigned x = 1; x < 256; ++x) {
    bool q = s.q(bits(x));
    CHECK(q == q_direct(g, x));
    (q ? aniso : iso)++;
  }
  // 240 roots fall into 120 classes; the 2160 norm-4 vectors into 135.
  CHECK(aniso == 120);
  CHECK(iso == 135);
  CHECK(witt_defect(s) == 0);

  for (std::uint64_t seed : {0, 1, 7}) {
    auto uv = isotropic_complement_pair(s, seed);
    REQUIRE(uv.u.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK_FALSE(s.q(uv.u[i]));
      CHECK_FALSE(s.q(uv.v[i]));
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(s.b(uv.u[i], uv.v[j]) == (i == j));
        CHECK_FALSE(s.b(uv.u[i], uv.u[j]));
        CHECK_FALSE(s.b(uv.v[i], uv.v[j]));
      }
    }
    auto p = preimages(e8, uv);
    CHECK(minimum(p.m) == 4);
    CHECK(minimum(half(p.n)) == 2);
  }
}

TEST_CASE("preimage coordinates") {
  auto c = preimage_coords(3, {bits(3)});
  CHECK(abs(determinant(c)) == 4);
  CHECK(c == IntMatrix{{1, 1, 0}, {0, 2, 0}, {0, 0, 2}});
  CHECK(abs(determinant(preimage_coords(3, {}))) == 8);
}

TEST_CASE("polarization from a structure") {
  auto e8 = build_e8();
  auto sp = find_structure(e8);
  auto p = polarization_from_structure(e8, sp);
  CHECK(half(p.m).determinant() == 1);
  CHECK(minimum(half(p.m)) == 2);

  auto bad = p;
  bad.n_coords = p.m_coords;
  bad.n = p.m;
  CHECK(kind_of([&] { verify_polarization(bad); }) == ErrorKind::InvariantFailure);
}

TEST_CASE("Construction I") {
  auto e8 = build_e8();
  auto p = preimages(e8, isotropic_complement_pair(mod2_space(e8)));
  auto one = construction_I(p, 1);
  CHECK(one.rank() == 8);
  CHECK(is_even_unimodular(one));
  for (std::size_t k = 2; k <= 3; ++k) {
    auto l = construction_I(p, k);
    CHECK(l.rank() == 8 * k);
    CHECK(is_even_unimodular(l));
  }
}

TEST_CASE("2-neighbors") {
  auto e8 = build_e8();
  auto p = polarization_from_structure(e8, find_structure(e8));
  const auto& m = p.m;  // isometric to sqrt(2) E8, so M* = M/2

  // w = m/2 for a norm-8 vector m of M gives (w, w) = 2.
  auto sv = short_vectors(m, 8, {.collect_vectors = true});
  const LatticeVector* pick = nullptr;
  for (const auto& v : sv.vectors)
    if (v.norm == 8) {
      pick = &v;
      break;
    }
  REQUIRE(pick);
  std::vector<Rational> w;
  for (const auto& c : pick->coords) w.push_back(Rational(c) / 2);
  auto nb = neighbor_2(m, w);
  CHECK(nb.rank() == 8);
  CHECK(is_even(nb));
  CHECK(nb.determinant() == m.determinant());
  CHECK_FALSE(nb.gram() == m.gram());

  std::vector<Rational> inside(8, 0);
  inside[0] = 1;
  CHECK(kind_of([&] { neighbor_2(m, inside); }) == ErrorKind::WNotAdmissible);

  // A norm-4 vector halved: (w, w) = 1 is odd.
  for (const auto& v : sv.vectors)
    if (v.norm == 4) {
      std::vector<Rational> odd;
      for (const auto& c : v.coords) odd.push_back(Rational(c) / 2);
      CHECK(kind_of([&] { neighbor_2(m, odd); }) == ErrorKind::WNotAdmissible);
      auto l = neighbor_2(m, odd, false);
      CHECK_FALSE(is_even(l));
      break;
    }

  std::vector<Rational> third(8, 0);
  third[0] = Rational(1, 3);
  CHECK(kind_of([&] { neighbor_2(m, third); }) == ErrorKind::WNotAdmissible);
}
