#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "cli.hpp"
#include "lat72/linalg.hpp"

namespace lat72::cli {
namespace {

// Reads the two matrices of a structure file without refusing invalid ones.
StructurePair read_raw_structure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  auto f = read_gram(in);
  std::string marker;
  in >> marker;
  if (marker != "STRUCTURE") throw UsageError(path + ": expected STRUCTURE after the Gram matrix");
  auto a = read_gram(in);
  if (!is_integral(f) || !is_integral(a)) throw UsageError(path + ": structure matrices must be integral");
  return {to_integer(f), to_integer(a)};
}

// Polarization of L from a structure file, or from a seeded isotropic splitting of L/2L.
Polarization polarization_for(const IntegerLattice& l, const std::string& structure, std::uint64_t seed) {
  if (!structure.empty()) {
    auto sp = load_structure(structure);
    if (!(sp.F == l.integer_gram())) throw UsageError("structure Gram matrix differs from the lattice");
    return polarization_from_structure(l, sp);
  }
  auto p = preimages(l, isotropic_complement_pair(mod2_space(l), seed));
  verify_polarization(p);
  return p;
}

struct PolarizationSource {
  std::string gram;
  std::string structure;
  bool swap = false;
};

void add_source(CLI::App* c, PolarizationSource& s) {
  c->add_option("gram", s.gram, "Gram file of an even unimodular lattice")->required();
  c->add_option("--structure", s.structure, "Structure file (M = L A, N = L B); otherwise the global --seed is used");
  c->add_flag("--swap", s.swap, "Exchange M and N");
}

}  // namespace

void add_structure_commands(CLI::App& app, const Globals& g) {
  {
    auto* c = app.add_subcommand("find-structure", "Search for a Z[alpha]-structure (A with A^2 - A + 2 = 0)");
    auto path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    c->add_option("gram", *path, "Gram file")->required();
    c->add_option("-o,--output", *out, "Structure file (default stdout)");
    c->callback([=, &g] {
      auto l = load_lattice(*path);
      FindOptions opt;
      opt.seed = g.seed;
      if (g.budget) opt.node_budget = g.budget;
      std::ostringstream os;
      write_structure(os, find_structure(l, opt));
      emit_text(*out, os.str());
    });
  }
  {
    auto* c = app.add_subcommand("validate-structure", "Check the three structure identities");
    auto path = std::make_shared<std::string>();
    c->add_option("file", *path, "Structure file")->required();
    c->callback([=] {
      auto sp = read_raw_structure(*path);
      auto bad = structure_violations(sp);
      for (const char* id : {"AFA^t = 2F", "F A^t F^-1 = 1 - A", "A^2 - A + 2 = 0"}) {
        bool ok = std::find(bad.begin(), bad.end(), id) == bad.end();
        std::cout << id << ": " << (ok ? "ok" : "violated") << "\n";
      }
      if (!bad.empty()) throw VerificationFailed(*path + ": " + bad.front());
    });
  }
  {
    auto* c = app.add_subcommand("polarize", "Polarization (M, N) of an even unimodular lattice");
    auto src = std::make_shared<PolarizationSource>();
    auto prefix = std::make_shared<std::string>();
    add_source(c, *src);
    c->add_option("-o,--output", *prefix, "Writes PREFIX.M.gram and PREFIX.N.gram, the halves scaled by 1/2")
        ->required();
    c->callback([=, &g] {
      auto l = load_lattice(src->gram);
      auto p = polarization_for(l, src->structure, g.seed);
      if (src->swap) p = swap_halves(std::move(p));
      verify_polarization(p);
      auto m = half(p.m), n = half(p.n);
      std::cout << "index: " << sublattice_index(l, p.m_coords) << "\n"
                << "M_even_unimodular: " << (is_even_unimodular(m) ? "true" : "false") << "\n"
                << "N_even_unimodular: " << (is_even_unimodular(n) ? "true" : "false") << "\n";
      emit_gram(*prefix + ".M.gram", m.gram());
      emit_gram(*prefix + ".N.gram", n.gram());
    });
  }
  {
    auto* c = app.add_subcommand("construction-i", "L(M, N, k) in L^k with form (1/2) sum Q");
    auto src = std::make_shared<PolarizationSource>();
    auto k = std::make_shared<std::size_t>(3);
    auto out = std::make_shared<std::string>();
    add_source(c, *src);
    c->add_option("-k", *k, "Number of copies")->capture_default_str()->check(CLI::Range(1, 16));
    c->add_option("-o,--output", *out, "Output Gram file (default stdout)");
    c->callback([=, &g] {
      auto l = load_lattice(src->gram);
      auto p = polarization_for(l, src->structure, g.seed);
      if (src->swap) p = swap_halves(std::move(p));
      auto r = construction_I(p, *k);
      std::cerr << "rank: " << r.rank() << "\ndeterminant: " << format_rational(r.determinant())
                << "\neven: " << (is_even(r) ? "true" : "false") << "\n";
      emit_gram(*out, r.gram());
    });
  }
  {
    auto* c = app.add_subcommand("neighbor", "Kneser 2-neighbor M^w for w with 2w in M");
    auto path = std::make_shared<std::string>();
    auto w = std::make_shared<std::string>();
    auto odd = std::make_shared<bool>(false);
    auto out = std::make_shared<std::string>();
    c->add_option("gram", *path, "Gram file")->required();
    c->add_option("--w", *w, "w in basis coordinates, e.g. \"1/2 1/2 0 0\"")->required();
    c->add_flag("--allow-odd", *odd, "Accept (w, w) odd");
    c->add_option("-o,--output", *out, "Output Gram file (default stdout)");
    c->callback([=] {
      auto l = load_lattice(*path);
      auto v = parse_vector(*w);
      if (v.size() != l.rank()) throw UsageError("--w needs " + std::to_string(l.rank()) + " coordinates");
      auto r = neighbor_2(l, v, !*odd);
      std::cerr << "determinant: " << format_rational(r.determinant()) << "\neven: " << (is_even(r) ? "true" : "false")
                << "\n";
      emit_gram(*out, r.gram());
    });
  }
}

}  // namespace lat72::cli
