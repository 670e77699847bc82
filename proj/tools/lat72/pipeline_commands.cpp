#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "cli.hpp"
#include "lat72/catalog.hpp"
#include "lat72/census.hpp"
#include "lat72/decomp.hpp"
#include "lat72/hash.hpp"

namespace lat72::cli {
namespace {

constexpr std::size_t kClasses = 4095;

struct StructureInput {
  std::string path;
  StructurePair sp;
  std::string hash;
};

StructureInput load_input(const std::string& given) {
  StructureInput in;
  in.path = structure_path_or_default(given);
  in.sp = load_structure(in.path);
  in.hash = file_hash(in.path);
  return in;
}

void add_structure_option(CLI::App* c, std::string& s) {
  c->add_option("--structure", s, "Leech structure file (default: the shipped one)");
}

std::vector<std::size_t> pick_classes(const std::vector<std::size_t>& given, std::size_t sample, std::uint64_t seed) {
  for (auto c : given)
    if (c >= kClasses) throw UsageError("class index " + std::to_string(c) + " out of range");
  return given.empty() ? sample_classes(kClasses, sample, seed) : given;
}

std::string checkpoint_input(const std::string& what, const std::string& hash) {
  return sha256_hex(what + ":" + hash).substr(0, 32);
}

void class_table_cmd(const std::string& structure, bool list) {
  auto in = load_input(structure);
  CensusContext ctx(census_polarization(in.sp));
  ctx.prepare_classes();
  const auto& t = ctx.classes();
  std::cout << "input structure: " << in.hash << "\n"
            << "classes: " << t.classes.size() << "\n"
            << "vectors: " << t.vectors_grouped << "\n"
            << "frame: 48 vectors, (k_i, k_j) = 8 delta_ij\n";
  if (list)
    for (std::size_t i = 0; i < t.classes.size(); ++i) {
      std::cout << "class " << i << ":";
      for (auto x : t.classes[i].rep()) std::cout << " " << x;
      std::cout << "\n";
    }
  if (t.classes.size() != kClasses || t.vectors_grouped != 196560)
    throw VerificationFailed("expected 4095 classes covering 196560 vectors");
}

void w_sets_cmd(const std::string& structure, const std::vector<std::size_t>& given, std::size_t sample,
                std::uint64_t seed) {
  auto in = load_input(structure);
  CensusContext ctx(census_polarization(in.sp));
  ctx.prepare_classes();
  std::size_t bad = 0;
  for (auto c : pick_classes(given, sample, seed)) {
    const auto& w = ctx.classes().classes[c].rep();
    auto w2 = w2_set(ctx, w);
    bool frame = w2.size() == 48 && is_24a1(ctx, w, w2);
    auto n3 = w3_set(ctx, w).size();
    std::cout << "class " << c << ": W2 " << w2.size() << " 24A1 " << (frame ? "yes" : "no") << " W3 " << n3 << "\n";
    bad += !frame || n3 != 4096;
  }
  if (bad) throw VerificationFailed(std::to_string(bad) + " classes differ from |W2| = 48 (24A1), |W3| = 4096");
}

void design_cmd(const std::string& structure, bool direct, const std::vector<std::size_t>& given,
                std::size_t sample, std::uint64_t seed) {
  auto moments = design_counts_from_moments(196560, 8, 8, 2048 * 48);
  auto print = [](const DesignTable& t) {
    for (std::size_t i = 0; i < t.size(); ++i) std::cout << "  n" << i << ": " << t[i] << "\n";
  };
  std::cout << "moments:\n";
  print(moments);
  if (!direct) return;
  auto in = load_input(structure);
  CensusContext ctx(census_polarization(in.sp));
  ctx.prepare_classes();
  ctx.prepare_min_vectors();
  std::size_t bad = 0;
  for (auto c : pick_classes(given, sample, seed)) {
    auto t = design_counts(true, ctx, ctx.classes().classes[c].rep());
    std::cout << "class " << c << (t == moments ? " (agrees)" : " (DIFFERS)") << ":\n";
    print(t);
    bad += t != moments;
  }
  if (bad) throw VerificationFailed(std::to_string(bad) + " classes disagree with the moment solution");
}

struct CensusArgs {
  std::string structure;
  std::size_t sample = 0;
  bool full = false;
  bool resume = false;
  bool no_fast_path = false;
  std::size_t cross_check = 1000;
  std::string output;
};

void census_cmd(const CensusArgs& a, const Globals& g) {
  if (!a.full && a.sample == 0) throw UsageError("give --sample K or --full");
  if (a.resume && g.checkpoint_dir.empty()) throw UsageError("--resume needs --checkpoint-dir");
  auto in = load_input(a.structure);
  CensusContext ctx(census_polarization(in.sp));
  ctx.prepare_classes();
  ctx.prepare_min_vectors();
  ctx.prepare_classifier();

  CensusOptions opt;
  if (!a.full) opt.sample = sample_classes(kClasses, a.sample, g.seed);
  opt.checkpoint_dir = g.checkpoint_dir;
  opt.resume = a.resume;
  opt.threads = g.threads;
  opt.fast_path = !a.no_fast_path;
  opt.cross_check = a.cross_check;
  opt.seed = g.seed;
  opt.input_hash = checkpoint_input("census", in.hash);
  auto r = norm6_census(ctx, opt);

  std::ostringstream os;
  write_census_report(os, r,
                      {{"structure", in.hash},
                       {"gram_M", gram_hash(half(ctx.polarization().m).gram())},
                       {"gram_N", gram_hash(half(ctx.polarization().n).gram())},
                       {"seed", std::to_string(g.seed)}});
  emit_text(a.output, os.str());
  if (r.anomalies) throw VerificationFailed(std::to_string(r.anomalies) + " cosets with minimum 6");
  if (r.complete && r.enumerated_422 != r.type_counts.at("(4,2,2)"))
    throw VerificationFailed("enumerated (4,2,2) count differs from the closed form");
}

struct DecompArgs {
  std::string structure;
  std::size_t sample = 0;
  bool exhaustive = false;
  bool resume = false;
  bool certify = false;
  std::string output;
};

void decomp_cmd(const DecompArgs& a, const Globals& g) {
  if (a.resume && g.checkpoint_dir.empty()) throw UsageError("--resume needs --checkpoint-dir");
  auto in = load_input(a.structure);
  auto gamma = build_gamma(build_leech(), in.sp).blocks;
  DecompContext ctx(split(gamma));
  ctx.prepare_minimal_i1();

  std::ostringstream extra;
  bool minima_ok = true;
  if (a.certify) {
    const auto& b = ctx.bundle();
    for (auto [name, l, claimed] : {std::tuple{"I2", &b.I2, 4}, std::tuple{"K2", &b.K2, 8}}) {
      SliceOptions so;
      so.node_budget = g.budget;
      so.checkpoint_dir = g.checkpoint_dir;
      so.resume = a.resume;
      so.tag = name;
      auto c = certify_minimum(*l, claimed, so);
      extra << "certified_min " << name << ": " << claimed << " verified=" << (c.verified ? "true" : "false")
            << " below=" << c.below << " slices=" << c.slices << " resumed=" << c.slices_resumed << "\n";
      minima_ok = minima_ok && c.verified;
    }
  }

  DecompOptions opt;
  if (!a.exhaustive) opt.sample = a.sample ? a.sample : 64;
  opt.seed = g.seed;
  opt.threads = g.threads;
  opt.node_budget = g.budget;
  opt.checkpoint_dir = g.checkpoint_dir;
  opt.resume = a.resume;
  opt.input_hash = checkpoint_input("decomp", in.hash);
  auto r = verify_decomposition(ctx, opt);

  std::ostringstream os;
  write_decomp_certificate(os, ctx, r,
                           {{"structure", in.hash}, {"gram_gamma", gram_hash(gamma.gram())}, {"seed", std::to_string(g.seed)}});
  os << extra.str();
  emit_text(a.output, os.str());
  if (r.failed) throw VerificationFailed(std::to_string(r.failed) + " lifted w give I(w) a vector of norm <= 4");
  if (!minima_ok) throw VerificationFailed("a block minimum is below its claimed value");
}

}  // namespace

void add_pipeline_commands(CLI::App& app, const Globals& g) {
  {
    auto* c = app.add_subcommand("class-table", "Norm-8 classes of N/2L and their 48-frames");
    auto structure = std::make_shared<std::string>();
    auto list = std::make_shared<bool>(false);
    add_structure_option(c, *structure);
    c->add_flag("--list", *list, "Print one representative per class");
    c->callback([=] { class_table_cmd(*structure, *list); });
  }
  {
    auto* c = app.add_subcommand("w-sets", "|W2(w)|, its 24A1 pattern and |W3(w)| for classes w");
    auto structure = std::make_shared<std::string>();
    auto classes = std::make_shared<std::vector<std::size_t>>();
    auto sample = std::make_shared<std::size_t>(4);
    add_structure_option(c, *structure);
    c->add_option("--class", *classes, "Class indices (0..4094)");
    c->add_option("--sample", *sample, "Random classes when --class is absent")->capture_default_str();
    c->callback([=, &g] { w_sets_cmd(*structure, *classes, *sample, g.seed); });
  }
  {
    auto* c = app.add_subcommand("design-counts", "The table n_i = #{x : (x, w) = +-i}");
    auto structure = std::make_shared<std::string>();
    auto direct = std::make_shared<bool>(false);
    auto classes = std::make_shared<std::vector<std::size_t>>();
    auto sample = std::make_shared<std::size_t>(1);
    add_structure_option(c, *structure);
    c->add_flag("--direct", *direct, "Also sum over the minimal vectors and compare");
    c->add_option("--class", *classes, "Class indices for --direct");
    c->add_option("--sample", *sample, "Random classes for --direct when --class is absent")->capture_default_str();
    c->callback([=, &g] { design_cmd(*structure, *direct, *classes, *sample, g.seed); });
  }
  {
    auto* c = app.add_subcommand("census", "Norm-6 census of L(M, N, 3) over the classes w");
    auto a = std::make_shared<CensusArgs>();
    add_structure_option(c, a->structure);
    auto* s = c->add_option("--sample", a->sample, "Number of random classes");
    auto* f = c->add_flag("--full", a->full, "All 4095 classes");
    s->excludes(f);
    c->add_flag("--resume", a->resume, "Reuse finished classes from --checkpoint-dir");
    c->add_flag("--no-fast-path", a->no_fast_path, "Enumerate every coset instead of using the class table");
    c->add_option("--cross-check", a->cross_check, "Cosets compared between fast path and enumeration")
        ->capture_default_str();
    c->add_option("-o,--output", a->output, "Report file (default stdout)");
    c->callback([=, &g] { census_cmd(*a, g); });
  }
  {
    auto* c = app.add_subcommand("verify-decomp", "Split Gamma and check I(w) for lifted minimal vectors");
    auto a = std::make_shared<DecompArgs>();
    add_structure_option(c, a->structure);
    auto* s = c->add_option("--sample", a->sample, "Number of random minimal vectors (default 64)");
    auto* e = c->add_flag("--exhaustive", a->exhaustive, "All minimal vectors of I1 up to sign");
    s->excludes(e);
    c->add_flag("--resume", a->resume, "Reuse finished checks from --checkpoint-dir");
    c->add_flag("--certify-minima", a->certify, "Also prove min(I2) = 4 and min(K2) = 8 by enumeration");
    c->add_option("-o,--output", a->output, "Certificate file (default stdout)");
    c->callback([=, &g] { decomp_cmd(*a, g); });
  }
}

}  // namespace lat72::cli
