#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "cli.hpp"
#include "lat72/catalog.hpp"
#include "lat72/enumerate.hpp"
#include "lat72/hash.hpp"
#include "lat72/linalg.hpp"

namespace lat72::cli {
namespace {

void print_counts(std::ostream& os, const ShortVectorReport& r) {
  os << "bound: " << format_rational(r.bound) << "\n";
  for (const auto& [norm, n] : r.count_by_norm) os << "norm " << format_rational(norm) << ": " << n << "\n";
  os << "total: " << r.total() << "\n"
     << "nodes: " << r.nodes << "\n"
     << "complete: " << (r.complete ? "true" : "false") << "\n";
}

void write_dump(const std::string& path, const IntegerLattice& l, const ShortVectorReport& r) {
  std::ostringstream os;
  write_vector_dump(os, gram_hash(l.gram()), r);
  emit_text(path, os.str());
}

// "barnes", or a structure file whose Gram matrix F is recovered as s tr h.
HermitianLattice hermitian_operand(const std::string& name, const Rational& s) {
  if (name == "barnes") return barnes();
  auto sp = load_structure(name);
  return hermitian_from_structure(IntegerLattice::from_integer_gram(sp.F), sp, s).lattice;
}

void write_hgram(std::ostream& os, const QAMatrix& h) {
  os << h.rows() << "\n";
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) os << (j ? " " : "") << to_string(h(i, j));
    os << "\n";
  }
}

void info(const std::string& path, bool with_min, const Globals& g) {
  auto l = load_lattice(path);
  std::cout << "gram_sha256: " << gram_hash(l.gram()) << "\n"
            << "rank: " << l.rank() << "\n"
            << "positive_definite: " << (is_positive_definite(l.gram()) ? "true" : "false") << "\n"
            << "determinant: " << format_rational(l.determinant()) << "\n"
            << "integral: " << (l.integral() ? "true" : "false") << "\n";
  if (l.integral())
    std::cout << "even: " << (is_even(l) ? "true" : "false") << "\n"
              << "unimodular: " << (is_unimodular(l) ? "true" : "false") << "\n";
  if (!with_min) return;
  Enumerator e(l);
  auto m = minimum(e);
  EnumOptions opt;
  opt.node_budget = g.budget;
  auto r = e.short_vectors(m, opt);
  r.require_complete();
  std::cout << "minimum: " << format_rational(m) << "\n"
            << "kissing: " << r.count(m) << "\n";
}

void build(const std::string& name, const std::string& out, const std::string& cert_path,
           const std::string& structure) {
  std::ostringstream cert;
  cert << "report: build\n"
       << "lattice: " << name << "\n";
  std::optional<IntegerLattice> built;
  if (name == "gamma") {
    auto path = structure_path_or_default(structure);
    auto sp = load_structure(path);
    auto gb = build_gamma(build_leech(), sp);
    built = gb.blocks;
    cert << "input structure: " << file_hash(path) << "\n"
         << "check structure_identities: ok\n"
         << "check tensor_route: rank " << gb.tensor.rank() << ", determinant "
         << format_rational(gb.tensor.determinant()) << ", even\n"
         << "check tensor_isometric_to_blocks: ok\n"
         << "check construction_i_same_sublattice: ok\n";
  } else {
    const auto& e = catalog_entry(name);
    built = e.build();
    verify_entry(e, *built);
    if (e.min != 0) cert << "check minimum: " << format_rational(e.min) << "\ncheck kissing: " << e.kissing << "\n";
  }
  const auto& l = *built;
  bool eu = is_even(l) && l.determinant() == catalog_entry(name).determinant;
  cert << "gram_sha256: " << gram_hash(l.gram()) << "\n"
       << "rank: " << l.rank() << "\n"
       << "determinant: " << format_rational(l.determinant()) << "\n"
       << "even: " << (is_even(l) ? "true" : "false") << "\n"
       << "verified: " << (eu ? "true" : "false") << "\n";
  emit_gram(out, l.gram());
  if (!cert_path.empty()) emit_text(cert_path, cert.str());
  else std::cerr << cert.str();
  if (!eu) throw VerificationFailed(name + ": invariants differ from the catalog");
}

}  // namespace

void add_lattice_commands(CLI::App& app, const Globals& g) {
  {
    auto* c = app.add_subcommand("info", "Rank, determinant, parity and optionally minimum and kissing number");
    auto path = std::make_shared<std::string>();
    auto with_min = std::make_shared<bool>(false);
    c->add_option("gram", *path, "Gram file")->required();
    c->add_flag("--min", *with_min, "Also compute the minimum and the number of minimal vectors");
    c->callback([=, &g] { info(*path, *with_min, g); });
  }
  {
    auto* c = app.add_subcommand("short-vectors", "Count (or dump) vectors of norm <= bound");
    auto path = std::make_shared<std::string>();
    auto bound = std::make_shared<std::string>();
    auto dump = std::make_shared<std::string>();
    c->add_option("gram", *path, "Gram file")->required();
    c->add_option("--bound", *bound, "Norm bound (rational)")->required();
    c->add_option("--dump", *dump, "Write the vectors to this file ('-' for stdout)");
    c->callback([=, &g] {
      auto l = load_lattice(*path);
      EnumOptions opt;
      opt.node_budget = g.budget;
      opt.collect_vectors = !dump->empty();
      auto r = short_vectors(l, parse_rational(*bound), opt);
      print_counts(dump->empty() || *dump != "-" ? std::cout : std::cerr, r);
      if (!dump->empty()) write_dump(*dump, l, r);
      r.require_complete();
    });
  }
  {
    auto* c = app.add_subcommand("coset", "Count (or dump) vectors of norm <= bound in t + L");
    auto path = std::make_shared<std::string>();
    auto bound = std::make_shared<std::string>();
    auto t = std::make_shared<std::string>();
    auto dump = std::make_shared<std::string>();
    c->add_option("gram", *path, "Gram file")->required();
    c->add_option("--t", *t, "Shift in basis coordinates, e.g. \"1/2 0 0 1/2\"")->required();
    c->add_option("--bound", *bound, "Norm bound (rational)")->required();
    c->add_option("--dump", *dump, "Write the vectors (coordinates of v - t) to this file");
    c->callback([=, &g] {
      auto l = load_lattice(*path);
      auto shift = parse_vector(*t);
      if (shift.size() != l.rank()) throw UsageError("--t needs " + std::to_string(l.rank()) + " coordinates");
      EnumOptions opt;
      opt.node_budget = g.budget;
      opt.collect_vectors = !dump->empty();
      auto r = coset_short_vectors(l, shift, parse_rational(*bound), opt);
      print_counts(dump->empty() || *dump != "-" ? std::cout : std::cerr, r);
      if (!dump->empty()) write_dump(*dump, l, r);
      r.require_complete();
    });
  }
  {
    auto* c = app.add_subcommand("dual", "Gram matrix of the dual lattice on the dual basis");
    auto path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    c->add_option("gram", *path, "Gram file")->required();
    c->add_option("-o,--output", *out, "Output Gram file (default stdout)");
    c->callback([=] { emit_gram(*out, dual(load_lattice(*path)).gram()); });
  }
  {
    auto* c = app.add_subcommand("trace", "Trace lattice s tr h of a Hermitian Z[alpha]-lattice");
    auto operand = std::make_shared<std::string>();
    auto scale = std::make_shared<std::string>("1/7");
    auto out = std::make_shared<std::string>();
    auto show = std::make_shared<bool>(false);
    c->add_option("lattice", *operand, "'barnes' or a structure file")->required();
    c->add_option("--scale", *scale, "s in (x, y) = s tr h(x, y)")->capture_default_str();
    c->add_option("-o,--output", *out, "Output Gram file (default stdout)");
    c->add_flag("--hermitian", *show, "Print the Hermitian Gram matrix (a:b = a + b alpha) to stderr");
    c->callback([=] {
      auto s = parse_rational(*scale);
      auto h = hermitian_operand(*operand, s);
      if (*show) write_hgram(std::cerr, h.hgram());
      emit_gram(*out, trace_lattice(h, s).gram());
    });
  }
  {
    auto* c = app.add_subcommand("tensor", "Trace lattice of the Hermitian tensor product of two lattices");
    auto first = std::make_shared<std::string>();
    auto second = std::make_shared<std::string>();
    auto scale = std::make_shared<std::string>("1/7");
    auto out = std::make_shared<std::string>();
    c->add_option("first", *first, "'barnes' or a structure file")->required();
    c->add_option("second", *second, "'barnes' or a structure file")->required();
    c->add_option("--scale", *scale, "s used to read structures and to take the trace")->capture_default_str();
    c->add_option("-o,--output", *out, "Output Gram file (default stdout)");
    c->callback([=] {
      auto s = parse_rational(*scale);
      auto l = trace_lattice(hermitian_tensor(hermitian_operand(*first, s), hermitian_operand(*second, s)), s);
      std::cerr << "rank: " << l.rank() << "\ndeterminant: " << format_rational(l.determinant()) << "\n";
      emit_gram(*out, l.gram());
    });
  }
  {
    auto* c = app.add_subcommand("build", "Build a catalog lattice, verify it and write its Gram matrix");
    auto name = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto cert = std::make_shared<std::string>();
    auto structure = std::make_shared<std::string>();
    c->add_option("name", *name, "Catalog entry")->required()->check(CLI::IsMember({"gamma", "leech", "e8", "barnes"}));
    c->add_option("-o,--output", *out, "Output Gram file (default stdout)");
    c->add_option("--certificate", *cert, "Certificate file (default stderr)");
    c->add_option("--structure", *structure, "Structure file for gamma (default: shipped Leech structure)");
    c->callback([=] { build(*name, *out, *cert, *structure); });
  }
}

}  // namespace lat72::cli
