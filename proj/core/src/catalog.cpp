#include "lat72/catalog.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <optional>

#include "lat72/enumerate.hpp"
#include "lat72/error.hpp"
#include "lat72/linalg.hpp"
#include "lat72/polarization.hpp"

namespace lat72 {

std::vector<std::uint32_t> golay_generators() {
  std::vector<std::uint32_t> words;
  std::uint32_t residues = 0;
  for (int i = 1; i < 23; ++i) residues |= 1u << ((i * i) % 23);
  for (int s = 0; s < 23; ++s) {
    std::uint32_t w = 1u << 23;
    for (int j = 0; j < 23; ++j)
      if (residues >> j & 1) w |= 1u << ((j + s) % 23);
    words.push_back(w);
  }
  words.push_back((1u << 24) - 1);
  // Gaussian elimination on the highest set bit.
  std::vector<std::uint32_t> basis;
  for (auto w : words) {
    for (auto b : basis) w = std::min(w, w ^ b);
    if (w) {
      basis.push_back(w);
      std::sort(basis.rbegin(), basis.rend());
    }
  }
  if (basis.size() != 12) throw Error(ErrorKind::SelfCheckFailed, "Golay generators do not have rank 12");
  return basis;
}

std::vector<std::uint32_t> golay_codewords() {
  const auto g = golay_generators();
  std::vector<std::uint32_t> out;
  out.reserve(4096);
  for (std::uint32_t m = 0; m < 4096; ++m) {
    std::uint32_t w = 0;
    for (int i = 0; i < 12; ++i)
      if (m >> i & 1) w ^= g[i];
    out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

IntegerLattice build_leech(bool verify_minimum) {
  IntMatrix gens(0, 24);
  auto add = [&](std::vector<Integer> v) { gens.append_row(v); };
  for (auto w : golay_generators()) {
    std::vector<Integer> v(24, 0);
    for (int i = 0; i < 24; ++i) v[i] = (w >> i & 1) ? 2 : 0;
    add(v);
  }
  for (int i = 1; i < 24; ++i) {
    std::vector<Integer> v(24, 0);
    v[0] = 4;
    v[i] = 4;
    add(v);
  }
  {
    std::vector<Integer> v(24, 0);
    v[0] = 8;
    add(v);
  }
  {
    std::vector<Integer> v(24, 1);
    v[0] = -3;
    add(v);
  }
  IntMatrix basis = hermite_basis(gens);
  if (basis.rows() != 24) throw Error(ErrorKind::SelfCheckFailed, "Leech generators do not span rank 24");
  RatMatrix amb = scaled(RatMatrix::identity(24), Rational(1, 8));
  IntegerLattice leech = IntegerLattice::from_basis(convert<Rational>(basis), amb, "Leech");
  if (!is_even_unimodular(leech)) throw Error(ErrorKind::SelfCheckFailed, "Leech lattice is not even unimodular");
  if (verify_minimum && minimum(leech) != 4) throw Error(ErrorKind::SelfCheckFailed, "Leech lattice has roots");
  return leech;
}

namespace {

// Ambient matrix (acting on rows) to lattice coordinates; nullopt if it does
// not map the lattice onto itself.
std::optional<IntMatrix> to_lattice_coords(const IntegerLattice& leech, const RatMatrix& p) {
  const RatMatrix& b = leech.ambient()->basis;
  RatMatrix g = solve_right(b, b * p);
  if (!is_integral(g)) return std::nullopt;
  IntMatrix gi = to_integer(g);
  if (abs(determinant(gi)) != 1) return std::nullopt;
  return gi;
}

RatMatrix permutation_matrix(const std::array<int, 24>& perm) {
  RatMatrix p(24, 24);
  for (int i = 0; i < 24; ++i) p(i, perm[i]) = 1;
  return p;
}

}  // namespace

std::vector<IntMatrix> leech_automorphisms(const IntegerLattice& leech) {
  require(leech.ambient().has_value() && leech.rank() == 24, ErrorKind::PreconditionViolated,
          "expects the lattice from build_leech");
  constexpr int inf = 23;
  auto inv23 = [](int x) {
    for (int y = 1; y < 23; ++y)
      if (x * y % 23 == 1) return y;
    return 0;
  };
  std::array<int, 24> shift{}, dbl{}, flip{};
  for (int x = 0; x < 23; ++x) {
    shift[x] = (x + 1) % 23;
    dbl[x] = 2 * x % 23;
    flip[x] = x == 0 ? inf : (23 - inv23(x)) % 23;
  }
  shift[inf] = dbl[inf] = inf;
  flip[inf] = 0;

  std::vector<RatMatrix> ambient = {permutation_matrix(shift), permutation_matrix(dbl), permutation_matrix(flip)};

  const auto words = golay_codewords();
  std::vector<std::uint32_t> octads;
  for (auto w : words)
    if (std::popcount(w) == 8) octads.push_back(w);
  {
    RatMatrix e = RatMatrix::identity(24);
    for (int i = 0; i < 24; ++i)
      if (octads.front() >> i & 1) e(i, i) = -1;
    ambient.push_back(e);
  }

  // Sextet of the tetrad {0,1,2,3}: the octads through it cut out the other five tetrads.
  std::vector<std::uint32_t> tetrads = {0xFu};
  for (auto o : octads)
    if ((o & 0xFu) == 0xFu) tetrads.push_back(o & ~0xFu);
  require(tetrads.size() == 6, ErrorKind::SelfCheckFailed, "sextet of {0,1,2,3} does not have six tetrads");

  std::vector<IntMatrix> out;
  for (const auto& p : ambient) {
    auto g = to_lattice_coords(leech, p);
    require(g.has_value(), ErrorKind::SelfCheckFailed, "monomial generator does not preserve the Leech lattice");
    out.push_back(*g);
  }
  bool found = false;
  for (unsigned signs = 0; signs < 64 && !found; ++signs) {
    RatMatrix x(24, 24);
    for (int t = 0; t < 6; ++t) {
      Rational s = (signs >> t & 1) ? -1 : 1;
      for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j)
          if ((tetrads[t] >> i & 1) && (tetrads[t] >> j & 1)) x(i, j) = s * (Rational(1, 2) - (i == j ? 1 : 0));
    }
    if (auto g = to_lattice_coords(leech, x)) {
      out.push_back(*g);
      found = true;
    }
  }
  require(found, ErrorKind::SelfCheckFailed, "no sextet element preserves the Leech lattice");
  IntMatrix f = leech.integer_gram();
  for (const auto& g : out)
    require(g * f * g.transpose() == f, ErrorKind::SelfCheckFailed, "generator does not preserve the Gram matrix");
  return out;
}

IntegerLattice build_e8() {
  // Bourbaki numbering: chain 1-3-4-5-6-7-8 with 2 attached to 4.
  IntMatrix c = IntMatrix::identity(8);
  for (std::size_t i = 0; i < 8; ++i) c(i, i) = 2;
  auto link = [&](int a, int b) { c(a - 1, b - 1) = c(b - 1, a - 1) = -1; };
  link(1, 3);
  link(3, 4);
  link(4, 5);
  link(5, 6);
  link(6, 7);
  link(7, 8);
  link(2, 4);
  IntegerLattice e8 = IntegerLattice::from_integer_gram(c, "E8");
  if (!is_even_unimodular(e8)) throw Error(ErrorKind::SelfCheckFailed, "E8 is not even unimodular");
  return e8;
}

namespace {

// x in Z[alpha] acting on Lambda coordinates: a + b A.
IntMatrix za_action(const QA& x, const IntMatrix& a) {
  if (!is_integral(x)) throw Error(ErrorKind::NonIntegralResult, "coefficient not in Z[alpha]");
  const std::size_t n = a.rows();
  IntMatrix m = scaled(a, Integer(x.b.get_num()));
  for (std::size_t i = 0; i < n; ++i) m(i, i) += x.a.get_num();
  return m;
}

}  // namespace

GammaBuild build_gamma(const IntegerLattice& leech, const StructurePair& sp) {
  require(leech.rank() == sp.F.rows() && leech.integer_gram() == sp.F, ErrorKind::StructureMismatch,
          "structure does not belong to this lattice");
  const std::size_t n = sp.F.rows();
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvariantFailure, what); };

  auto herm = hermitian_from_structure(leech, sp, Rational(1, 7));
  auto pb = barnes();
  auto tensor = trace_lattice(hermitian_tensor(pb, herm.lattice), Rational(1, 7), true).with_label("Gamma");
  if (tensor.rank() != 3 * n || !is_even_unimodular(tensor)) fail("tensor route is not even unimodular");

  IntMatrix t = gamma_t_basis(sp);
  RatMatrix amb(3 * n, 3 * n);
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) amb(s * n + i, s * n + j) = Rational(sp.F(i, j)) / 2;
  auto blocks = IntegerLattice::from_basis(convert<Rational>(t), amb, "Gamma");
  if (!is_even_unimodular(blocks)) fail("basis T does not give an even unimodular lattice");

  // Trace basis vector lambda (b_i (x) c_j) has slot k equal to c_j (b_ik lambda) in Lambda coordinates.
  const QAMatrix& bb = *pb.basis();
  const std::size_t r = herm.lattice.rank();
  IntMatrix x(3 * n, 3 * n);
  const IntMatrix id = IntMatrix::identity(n);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t e = 0; e < 2; ++e) {
        const std::size_t row = 2 * (i * r + j) + e;
        for (std::size_t k = 0; k < 3; ++k) {
          IntMatrix act = za_action(bb(i, k), sp.A);
          if (e) act = act * sp.A;
          for (std::size_t c = 0; c < n; ++c) {
            Integer v = 0;
            for (std::size_t d = 0; d < n; ++d) v += herm.trace_basis(2 * j, d) * act(d, c);
            x(row, k * n + c) = v;
          }
        }
      }
  if (!(convert<Rational>(x) * amb * convert<Rational>(x).transpose() == tensor.gram()))
    fail("tensor basis is not isometric to its image in Lambda^3");
  const IntMatrix h = hermite_basis(t, 2);
  if (!(hermite_basis(x, 2) == h)) fail("tensor basis and T span different sublattices of Lambda^3");

  auto pol = swap_halves(polarization_from_structure(leech, sp));
  verify_polarization(pol);
  auto constr = construction_I(pol, 3);
  if (constr.determinant() != blocks.determinant()) fail("Construction I determinant differs");
  if (!(to_integer(constr.ambient()->basis) == h)) fail("Construction I and T span different sublattices of Lambda^3");

  return {sp, std::move(tensor), std::move(t), std::move(blocks), std::move(x), std::move(constr)};
}

IntegerLattice build_gamma() {
  auto leech = build_leech(false);
  return build_gamma(leech, load_structure(leech_structure_path())).blocks;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"e8", [] { return build_e8(); }, 1, 2, 240, true},
      {"leech", [] { return build_leech(); }, 1, 4, 196560, true},
      {"barnes", [] { return trace_lattice(barnes(), 1); }, 343, 4, 42, true},
      {"gamma", [] { return build_gamma(); }, 1, 0, 0, true},
  };
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw Error(ErrorKind::NotFound, "no catalog lattice named '" + name + "'");
}

void verify_entry(const CatalogEntry& e, const IntegerLattice& l) {
  auto fail = [&](const std::string& what) { throw Error(ErrorKind::SelfCheckFailed, e.name + ": " + what); };
  if (l.determinant() != e.determinant) fail("determinant " + format_rational(l.determinant()));
  if (e.even && !is_even(l)) fail("not even");
  if (e.min != 0) {
    auto rep = short_vectors(l, e.min);
    if (rep.total() != e.kissing || rep.count(e.min) != e.kissing)
      fail("expected " + std::to_string(e.kissing) + " vectors of norm " + format_rational(e.min) + ", found " +
           std::to_string(rep.total()));
  }
}

std::string data_directory() {
  if (const char* env = std::getenv("LAT72_DATA"); env && *env) return env;
  return LAT72_DATA_DIR;
}

std::string leech_structure_path() { return data_directory() + "/leech_structure.txt"; }

}  // namespace lat72
