#include <optional>

#include "doctest.h"
#include "lat72/catalog.hpp"
#include "lat72/error.hpp"
#include "lat72/linalg.hpp"
#include "lat72/polarization.hpp"

using namespace lat72;

namespace {

std::optional<ErrorKind> kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("catalog entries reproduce their invariants") {
  for (const char* name : {"e8", "barnes", "leech"}) {
    CAPTURE(name);
    const auto& e = catalog_entry(name);
    auto l = e.build();
    CHECK_NOTHROW(verify_entry(e, l));
  }
  CHECK(kind_of([] { catalog_entry("d4"); }) == ErrorKind::NotFound);
  CHECK(kind_of([] { verify_entry(catalog_entry("leech"), build_e8()); }) == ErrorKind::SelfCheckFailed);
}

TEST_CASE("three constructions of Gamma coincide") {
  auto leech = build_leech(false);
  auto g = build_gamma(leech, load_structure(leech_structure_path()));
  CHECK(g.tensor.rank() == 72);
  CHECK(g.blocks.rank() == 72);
  CHECK(g.blocks.determinant() == 1);
  CHECK(is_even(g.blocks));
  auto x = convert<Rational>(g.tensor_in_blocks);
  CHECK(g.tensor.gram() == x * g.blocks.ambient()->gram * x.transpose());
  CHECK(hermite_basis(g.tensor_in_blocks, 2) == hermite_basis(g.t_basis, 2));
  // Every Construction I vector lies in the span of the block basis.
  auto c = to_integer(g.construction.ambient()->basis);
  CHECK(c.rows() == 72);
  CHECK(hermite_basis(c, 2) == hermite_basis(g.t_basis, 2));
}
