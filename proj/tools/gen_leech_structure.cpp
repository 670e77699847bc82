// Searches for Z[alpha]-structures on the Leech lattice that commute with an
// automorphism of order 13, writes every one found, and ranks them by the
// number of norm-6 vectors of the 72-dimensional lattice on a class sample.
//
//   gen_leech_structure [--seed N] [--out DIR] [--sample K] [--select FILE]
//
// A structure is A = (S + 1)/2 where S = K F^-1 with K antisymmetric,
// S^2 = -7 and S = 1 mod 2. Commuting with g means g K g^t = K, a linear
// condition; on that module tr(K F^-1 K^t F^-1) is a positive definite form
// and every solution has value 7 * 24 = 168, so a coset enumeration finds them all.

#include <bitset>
#include <cstdint>
#include <optional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "lat72/catalog.hpp"
#include "lat72/census.hpp"
#include "lat72/enumerate.hpp"
#include "lat72/hermitian.hpp"
#include "lat72/linalg.hpp"

using namespace lat72;

namespace {

using I64Matrix = Matrix<std::int64_t>;

std::uint64_t order_of(const I64Matrix& g, std::uint64_t limit) {
  I64Matrix id = I64Matrix::identity(g.rows());
  I64Matrix p = g;
  for (std::uint64_t k = 1; k <= limit; ++k) {
    if (p == id) return k;
    p = p * g;
  }
  return 0;
}

using F2Row = std::bitset<64>;

// Solves sum_u x_u row[u] = row[r] over F_2 (column r is the right-hand side).
std::optional<std::vector<bool>> solve_f2(std::vector<F2Row> rows, std::size_t r) {
  std::vector<std::size_t> piv;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t p = rank;
    while (p < rows.size() && !rows[p][col]) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != rank && rows[i][col]) rows[i] ^= rows[rank];
    piv.push_back(col);
    ++rank;
  }
  for (std::size_t i = rank; i < rows.size(); ++i)
    if (rows[i][r]) return std::nullopt;
  std::vector<bool> x(r, false);
  for (std::size_t k = 0; k < piv.size(); ++k) x[piv[k]] = rows[k][r];
  return x;
}

I64Matrix power(I64Matrix g, std::uint64_t e) {
  I64Matrix r = I64Matrix::identity(g.rows());
  for (; e; e >>= 1) {
    if (e & 1) r = r * g;
    g = g * g;
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search for Z[alpha]-structures on the Leech lattice"};
  std::uint64_t seed = 1;
  std::string out = "structures";
  app.add_option("--seed", seed, "random word seed");
  app.add_option("--out", out, "output directory");
  std::size_t sample = 32;
  app.add_option("--sample", sample, "classes sampled when ranking by norm-6 count");
  std::string select;
  app.add_option("--select", select, "write the first structure with no norm-6 vectors here and stop");
  CLI11_PARSE(app, argc, argv);

  auto leech = build_leech();
  auto gens = leech_automorphisms(leech);
  IntMatrix f = leech.integer_gram();
  IntMatrix finv = to_integer(*inverse(convert<Rational>(f)));
  const std::size_t n = 24;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  std::vector<I64Matrix> g64;
  for (const auto& g : gens) {
    I64Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = g(i, j).get_si();
    g64.push_back(m);
  }
  I64Matrix g13;
  for (int attempt = 0;; ++attempt) {
    I64Matrix w = I64Matrix::identity(n);
    for (int k = 0; k < 30; ++k) w = w * g64[pick(rng)];
    std::uint64_t ord = order_of(w, 200);
    if (ord && ord % 13 == 0) {
      g13 = power(w, ord / 13);
      std::cerr << "order-13 element from a word of order " << ord << " after " << attempt + 1 << " words\n";
      break;
    }
  }

  // Antisymmetric K on the basis E_ab - E_ba (a < b); row p of phi is g K_p g^t - K_p.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  const std::size_t d = pairs.size();
  IntMatrix phi(d, d);
  for (std::size_t p = 0; p < d; ++p) {
    auto [a, b] = pairs[p];
    for (std::size_t q = 0; q < d; ++q) {
      auto [i, j] = pairs[q];
      std::int64_t v = g13(i, a) * g13(j, b) - g13(i, b) * g13(j, a);
      if (q == p) v -= 1;
      phi(p, q) = v;
    }
  }
  IntMatrix kernel = integer_left_kernel(phi);
  const std::size_t r = kernel.rows();
  std::cerr << "invariant antisymmetric module has rank " << r << "\n";

  auto k_matrix = [&](std::span<const Integer> c) {
    IntMatrix k(n, n);
    for (std::size_t p = 0; p < d; ++p) {
      if (c[p] == 0) continue;
      auto [a, b] = pairs[p];
      k(a, b) += c[p];
      k(b, a) -= c[p];
    }
    return k;
  };
  std::vector<IntMatrix> ks;
  for (std::size_t u = 0; u < r; ++u) ks.push_back(k_matrix(kernel.row(u)));
  std::vector<IntMatrix> kf;
  for (const auto& k : ks) kf.push_back(k * finv);
  IntMatrix gram(r, r);
  for (std::size_t u = 0; u < r; ++u)
    for (std::size_t v = 0; v < r; ++v) {
      // tr(K_u F^-1 K_v^t F^-1) = -tr(S_u S_v)
      Integer t = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t -= kf[u](i, j) * kf[v](j, i);
      gram(u, v) = t;
    }
  // S = 1 mod 2 fixes the coefficients mod 2, so the solutions lie in one coset
  // c/2 + Z^r of the module scaled by 2.
  std::vector<F2Row> rows;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      F2Row e;
      for (std::size_t u = 0; u < r; ++u) e[u] = kf[u](i, j) % 2 != 0;
      e[r] = i == j;
      rows.push_back(e);
    }
  auto c = solve_f2(rows, r);
  if (!c) {
    std::cerr << "no element of the module is congruent to 1 mod 2\n";
    return 1;
  }
  auto module = IntegerLattice::from_integer_gram(scaled(gram, Integer(4)), "commutant");
  std::vector<Rational> t(r);
  for (std::size_t u = 0; u < r; ++u) t[u] = Rational((*c)[u] ? 1 : 0, 2);
  EnumOptions opt;
  opt.collect_vectors = true;
  auto report = coset_short_vectors(module, t, 168, opt);
  std::cerr << "coset vectors of value <= 168: " << report.total() << " (" << report.count(168) << " at 168)\n";

  std::filesystem::create_directories(out);
  std::set<std::vector<Integer>> seen;
  std::vector<StructurePair> found;
  int written = 0;
  IntMatrix id = IntMatrix::identity(n);
  for (const auto& v : report.vectors) {
    if (v.norm != 168) continue;
    {
      IntMatrix s(n, n);
      for (std::size_t u = 0; u < r; ++u) {
        Integer x = 2 * v.coords[u] + ((*c)[u] ? 1 : 0);
        if (x != 0) s = s + scaled(kf[u], x);
      }
      if (!(s * s == scaled(id, Integer(-7)))) continue;
      IntMatrix a = s + id;
      bool even = true;
      for (std::size_t i = 0; i < n && even; ++i)
        for (std::size_t j = 0; j < n && even; ++j) even = a(i, j) % 2 == 0;
      if (!even) continue;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= 2;
      StructurePair sp{f, a};
      if (!validate_structure(sp)) continue;
      if (!seen.insert(a.data()).second) continue;
      std::string path = out + "/structure_" + std::to_string(written++) + ".txt";
      std::ofstream os(path);
      write_structure(os, sp);
      std::cout << path << "\n";
      found.push_back(sp);
    }
  }
  std::cerr << written << " structures written\n";
  if (!written) return 1;

  // Rank by the norm-6 count of L(L B, L A, 3) on a class sample.
  std::shared_ptr<const LeechClassifier> classes;
  for (std::size_t k = 0; k < found.size(); ++k) {
    CensusContext ctx(swap_halves(polarization_from_structure(leech, found[k])));
    if (classes)
      ctx.set_classifier(classes);
    else
      ctx.prepare_classifier(), classes = ctx.shared_classifier();
    ctx.prepare_classes();
    CensusOptions co;
    co.sample = sample_classes(ctx.classes().classes.size(), sample, seed);
    co.cross_check = k == 0 ? 1000 : 0;
    auto rep = norm6_census(ctx, co);
    std::cout << "structure_" << k << " sampled_b6 " << rep.b6 << "\n" << std::flush;
    if (!select.empty() && rep.b6 == 0) {
      co.sample.reset();
      auto full = norm6_census(ctx, co);
      std::cout << "structure_" << k << " b6 " << full.b6 << "\n";
      if (full.b6 == 0) {
        std::ofstream os(select);
        write_structure(os, found[k]);
        std::cout << "selected structure_" << k << " -> " << select << "\n";
        return 0;
      }
    }
  }
  return select.empty() ? 0 : 1;
}
