// End-to-end acceptance run: one PASS/FAIL line per criterion.
// All comparisons are exact; the only tolerance is the wall-clock limit on
// the closed-form identity.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "lat72/catalog.hpp"
#include "lat72/census.hpp"
#include "lat72/decomp.hpp"
#include "lat72/enumerate.hpp"
#include "lat72/error.hpp"
#include "lat72/hermitian.hpp"
#include "lat72/polarization.hpp"
#include "support/brute_force.hpp"

using namespace lat72;

namespace {

constexpr double kClosedFormSeconds = 1.0;
constexpr std::size_t kSampledClasses = 32;
constexpr std::size_t kSampledLifts = 64;
constexpr int kRandomLattices = 100;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note << " [exception: " << e.what() << "]";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s %2d %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.note.str().c_str(), secs);
  std::fflush(stdout);
  failures += !o.pass;
}

// The census polarization of the shipped structure, built once.
CensusContext& census_context() {
  static CensusContext* ctx = [] {
    auto leech = build_leech(false);
    auto* c = new CensusContext(swap_halves(polarization_from_structure(leech, load_structure(leech_structure_path()))));
    c->prepare_classes();
    c->prepare_min_vectors();
    c->prepare_classifier();
    return c;
  }();
  return *ctx;
}

void closed_form(Outcome& o) {
  auto start = std::chrono::steady_clock::now();
  auto r = norm8_assembly(0);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.expect(r.type_counts.at("(8,0,0)") == 589680, "(8,0,0)");
  o.expect(r.type_counts.at("(4,4,0)") == 28304640, "(4,4,0)");
  o.expect(r.type_counts.at("(3,3,2)") == 4830658560ULL, "(3,3,2)");
  o.expect(r.type_counts.at("(4,2,2)") == 1358622720ULL, "(4,2,2)");
  std::uint64_t sum = 0;
  for (const auto& [k, v] : r.type_counts) sum += v;
  o.expect(sum == 6218175600ULL && r.kissing == sum, "sum");
  o.expect(secs < kClosedFormSeconds, "time limit");
  o.note << " kissing " << r.kissing;
}

void design_table(Outcome& o) {
  DesignTable expected{46488, 78848, 47216, 18944, 4536, 512, 16};
  auto& ctx = census_context();
  o.expect(design_counts(false, ctx, ctx.classes().classes[0].rep()) == expected, "moment solution");
  std::size_t agree = 0;
  for (auto c : sample_classes(4095, kSampledClasses, kSeed))
    agree += design_counts(true, ctx, ctx.classes().classes[c].rep()) == expected;
  o.expect(agree == kSampledClasses, "direct summation");
  o.note << " direct path agrees on " << agree << "/" << kSampledClasses << " classes";
}

void leech_checks(Outcome& o) {
  auto leech = build_leech(true);
  o.expect(is_even_unimodular(leech), "even unimodular");
  auto r4 = short_vectors(leech, 4);
  o.expect(r4.total() == 196560 && r4.count(4) == 196560, "196560 minimal vectors");
  auto r6 = short_vectors(leech, 6);
  std::uint64_t n4 = r6.count(4), n6 = r6.count(6);
  o.expect(r6.count(2) == 0, "no roots");
  o.expect(n4 % 2 == 0 && n6 % 2 == 0, "pairs");
  // |L4|/2 + |L6|/2 + |L8|/48 = 2^24 - 1.
  std::int64_t rest = (std::int64_t{1} << 24) - 1 - static_cast<std::int64_t>(n4 / 2 + n6 / 2);
  o.expect(rest > 0, "identity leaves a positive class count");
  std::int64_t n8 = 48 * rest;
  o.expect(n8 % 48 == 0 && n8 == 398034000, "|L8| = 398034000");
  o.note << " |L6| = " << n6 << ", |L8| = " << n8;
}

void w_sets(Outcome& o) {
  auto& ctx = census_context();
  std::size_t good = 0;
  for (auto c : sample_classes(4095, kSampledClasses, kSeed + 1)) {
    const auto& w = ctx.classes().classes[c].rep();
    auto w2 = w2_set(ctx, w);
    good += w2.size() == 48 && is_24a1(ctx, w, w2) && w3_set(ctx, w).size() == 4096;
  }
  o.expect(good == kSampledClasses, "W-set sizes");
  o.note << " " << good << "/" << kSampledClasses << " classes with |W2| = 48 (24A1), |W3| = 4096";
}

void class_table_check(Outcome& o) {
  auto& ctx = census_context();
  const auto& t = ctx.classes();
  o.expect(t.classes.size() == 4095, "4095 classes");
  std::size_t frames = 0;
  for (const auto& f : t.classes) {
    bool ok = f.vectors.size() == 48;
    for (std::size_t i = 0; ok && i < 24; ++i)
      for (std::size_t j = 0; ok && j < 24; ++j) ok = ctx.inner(f.vectors[i], f.vectors[j]) == (i == j ? 8 : 0);
    for (std::size_t i = 0; ok && i < 24; ++i)
      for (std::size_t k = 0; ok && k < f.vectors[i].size(); ++k) ok = f.vectors[24 + i][k] == -f.vectors[i][k];
    frames += ok;
  }
  o.expect(frames == 4095, "orthogonal frames");
  o.note << " " << t.classes.size() << " classes, " << frames << " orthogonal 48-frames";
}

void gamma_construction(Outcome& o) {
  auto sp = load_structure(leech_structure_path());
  o.expect(structure_violations(sp).empty(), "structure identities");
  auto g = build_gamma(build_leech(false), sp);
  o.expect(g.tensor.rank() == 72 && is_even_unimodular(g.tensor), "tensor route");
  o.expect(g.construction.rank() == 72 && is_even_unimodular(g.construction), "Construction I route");
  o.expect(g.tensor.determinant() == g.construction.determinant(), "determinants");
  o.expect(is_even_unimodular(g.blocks), "block basis");
  o.note << " rank " << g.tensor.rank() << ", determinant " << format_rational(g.tensor.determinant())
         << " on both routes";
}

void hermitian_small(Outcome& o) {
  auto pb = barnes();
  auto aut = hermitian_automorphisms(pb);
  o.expect(aut.complete && aut.order == 336, "automorphism order");
  o.expect(trace_lattice(pb, 1).determinant() == 343, "determinant 7^3");
  o.expect(same_module(hermitian_dual(pb), pb), "self-dual");
  o.note << " |Aut| = " << aut.order;
}

void e8_analogue(Outcome& o) {
  auto e8 = build_e8();
  auto sp = find_structure(e8);
  o.expect(validate_structure(sp), "structure");
  auto l = construction_I(polarization_from_structure(e8, sp), 3);
  o.expect(l.rank() == 24 && is_even_unimodular(l), "even unimodular of rank 24");
  auto m1 = minimum(l);
  auto m2 = minimum(l, ReductionQuality{0.75, 0, 0, 0});
  auto again = minimum(construction_I(polarization_from_structure(e8, find_structure(e8)), 3));
  o.expect(m1 == m2 && m1 == again, "minimum stable");
  o.note << " minimum " << format_rational(m1) << ", " << short_vectors(l, m1).count(m1) << " minimal vectors";
}

void decomposition(Outcome& o) {
  DecompContext ctx(split(build_gamma()));
  const auto& b = ctx.bundle();
  Integer two24 = Integer(1) << 24;
  o.expect(b.index_kernel == two24 && b.index_image == two24, "indices 2^24");
  auto i2 = certify_minimum(b.I2, 4);
  auto k1 = certify_minimum(b.K1, 8);
  auto k2 = certify_minimum(b.K2, 8);
  o.expect(i2.verified, "min(I2) = 4");
  o.expect(k1.verified, "min(K1) = 8");
  o.expect(k2.verified, "min(K2) = 8");
  ctx.prepare_minimal_i1();
  DecompOptions opt;
  opt.sample = kSampledLifts;
  opt.seed = kSeed;
  auto r = verify_decomposition(ctx, opt);
  o.expect(r.checks.size() == kSampledLifts && r.passed == kSampledLifts, "sampled I(w) checks");
  o.note << " min I2/K1/K2 = 4/8/8 certified (" << i2.nodes + k1.nodes + k2.nodes << " nodes), " << r.passed << "/"
         << kSampledLifts << " lifted w pass";
}

void full_census(Outcome& o) {
  CensusOptions opt;
  opt.seed = kSeed;
  auto r = norm6_census(census_context(), opt);
  o.expect(r.complete && r.classes_done == 4095, "all classes");
  o.expect(r.b6 == 0, "b6 = 0");
  o.expect(r.anomalies == 0, "no odd cosets");
  o.expect(r.enumerated_422 == norm8_assembly(0).type_counts.at("(4,2,2)"), "(4,2,2) closed form");
  o.note << " b6 = " << r.b6 << ", enumerated (4,2,2) = " << r.enumerated_422 << ", fast path cross-checked on "
         << r.fast_path_checked << " cosets";
}

void oracle_equivalence(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  int agree = 0;
  for (int trial = 0; trial < kRandomLattices; ++trial) {
    const std::size_t n = 4 + trial % 5;
    auto g = oracle::random_gram(rng, n);
    auto lat = IntegerLattice::from_integer_gram(oracle::to_matrix(g));
    const std::int64_t bound = 10 + trial % 9;
    std::map<Rational, std::uint64_t> want;
    for (auto [k, v] : oracle::box_census(g, std::vector<std::int64_t>(n, 0), 1, bound))
      want[Rational(static_cast<long>(k))] = v;

    std::uniform_int_distribution<int> coord(-7, 7);
    const std::int64_t den = 2 + trial % 4;
    std::vector<std::int64_t> t(n);
    std::vector<Rational> tq(n);
    bool integral = true;
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = coord(rng);
      tq[i] = Rational(static_cast<long>(t[i]), static_cast<long>(den));
      tq[i].canonicalize();
      integral = integral && t[i] % den == 0;
    }
    std::map<Rational, std::uint64_t> cwant;
    for (auto [k, v] : oracle::box_census(g, t, den, bound)) {
      Rational q(static_cast<long>(k), static_cast<long>(den * den));
      q.canonicalize();
      cwant[q] += v;
    }
    if (integral) cwant[Rational(0)] = 1;
    agree += short_vectors(lat, bound).count_by_norm == want &&
             coset_short_vectors(lat, tq, bound).count_by_norm == cwant;
  }
  o.expect(agree == kRandomLattices, "all lattices agree");
  o.note << " " << agree << "/" << kRandomLattices << " lattices agree (lattice and coset)";
}

}  // namespace

int main() {
  criterion(1, "closed-form norm-8 counts", closed_form);
  criterion(2, "design table", design_table);
  criterion(3, "Leech self-checks", leech_checks);
  criterion(4, "W-set propositions", w_sets);
  criterion(5, "class table", class_table_check);
  criterion(6, "Gamma construction", gamma_construction);
  criterion(7, "Hermitian small-scale", hermitian_small);
  criterion(8, "E8 analogue", e8_analogue);
  criterion(9, "decomposition pipeline", decomposition);
  criterion(10, "full norm-6 census", full_census);
  criterion(11, "oracle equivalence", oracle_equivalence);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures ? 1 : 0;
}
