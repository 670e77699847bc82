#include "lat72/decomp.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "lat72/census.hpp"
#include "lat72/error.hpp"
#include "lat72/hash.hpp"
#include "lat72/linalg.hpp"
#include "checkpoint.hpp"

namespace lat72 {

namespace {

constexpr const char* kSliceHeader = "lat72-slice-checkpoint 1";
constexpr const char* kDecompHeader = "lat72-decomp-checkpoint 1";

Integer power_of_two(std::size_t e) {
  Integer x = 1;
  x <<= e;
  return x;
}

IntMatrix columns(const IntMatrix& m, std::size_t from, std::size_t count) { return m.block(0, from, m.rows(), count); }

RatMatrix block_gram(const RatMatrix& g, std::size_t from, std::size_t count) {
  return g.block(from, from, count, count);
}

// K is dual to I in their common span: the dual basis G^-1 k spans the lattice of i.
bool dual_in_span(const IntegerLattice& k_lat, const IntMatrix& k, const IntMatrix& i) {
  auto ginv = inverse(k_lat.gram());
  if (!ginv) return false;
  RatMatrix d = *ginv * convert<Rational>(k);
  if (!is_integral(d)) return false;
  // A full-rank lattice contains |det| Z^m, which keeps the Hermite form small.
  const IntMatrix di = to_integer(d);
  return hermite_basis(di, abs(determinant(di))) == i;
}

std::string join(std::span<const Integer> v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

std::vector<Integer> row_times(std::span<const Integer> x, const IntMatrix& m) {
  std::vector<Integer> out(m.cols(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += x[i] * m(i, j);
  }
  return out;
}

std::vector<Rational> row_times(std::span<const Integer> x, const RatMatrix& m) {
  std::vector<Rational> out(m.cols(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += x[i] * m(i, j);
  }
  return out;
}

// Integer x with x * a = v, by a combination of left-kernel vectors of [a; v]
// whose last entry is -1. Rows are tried in the given order, so two orders
// give two independent solutions.
std::optional<std::vector<Integer>> solve_integral(const IntMatrix& a, std::span<const Integer> v, bool reverse) {
  IntMatrix m = a;
  m.append_row(v);
  IntMatrix ker = integer_left_kernel(m);
  const std::size_t last = a.rows();
  std::vector<Integer> acc(last + 1, 0);
  Integer g = 0;
  for (std::size_t r = 0; r < ker.rows(); ++r) {
    std::size_t row = reverse ? ker.rows() - 1 - r : r;
    const Integer& e = ker(row, last);
    if (e == 0) continue;
    Integer ng, s, t;
    mpz_gcdext(ng.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
    for (std::size_t j = 0; j <= last; ++j) acc[j] = s * acc[j] + t * ker(row, j);
    g = ng;
    if (abs(g) == 1) break;
  }
  if (abs(g) != 1) return std::nullopt;
  // acc * [a; v] = 0 with acc_last = g = +-1, so x = -g * acc[0..last).
  std::vector<Integer> x(last);
  for (std::size_t j = 0; j < last; ++j) x[j] = -g * acc[j];
  return x;
}

}  // namespace

DecompositionBundle split(const IntegerLattice& gamma) {
  require(gamma.ambient().has_value(), ErrorKind::StructureMismatch, "lattice has no ambient embedding");
  const auto& amb = *gamma.ambient();
  const std::size_t dim = gamma.rank();
  require(amb.basis.rows() == dim && amb.basis.cols() == dim && dim % 3 == 0, ErrorKind::StructureMismatch,
          "ambient is not a full-rank space of dimension 3n");
  require(is_integral(amb.basis), ErrorKind::StructureMismatch, "basis is not integral in ambient coordinates");
  require(is_even(gamma), ErrorKind::InvariantFailure, "lattice is not even");
  const std::size_t n = dim / 3;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = n; j < dim; ++j)
      require(amb.gram(i, j) == 0, ErrorKind::StructureMismatch, "first block is not orthogonal to the others");

  DecompositionBundle b{gamma, n, to_integer(amb.basis), {}, {}, {}, {},
                        gamma, gamma, gamma, gamma, 0, 0};
  const IntMatrix t1 = columns(b.basis, 0, n), t2 = columns(b.basis, n, 2 * n);
  b.i1 = hermite_basis(t1);
  b.i2 = hermite_basis(t2);
  const IntMatrix c1 = integer_left_kernel(t2), c2 = integer_left_kernel(t1);
  b.k1 = hermite_basis(columns(c1 * b.basis, 0, n));
  b.k2 = hermite_basis(columns(c2 * b.basis, n, 2 * n));
  require(b.i1.rows() == n && b.k1.rows() == n && b.i2.rows() == 2 * n && b.k2.rows() == 2 * n,
          ErrorKind::InvariantFailure, "projections or intersections do not have full rank");

  const RatMatrix a1 = block_gram(amb.gram, 0, n), a2 = block_gram(amb.gram, n, 2 * n);
  b.K1 = IntegerLattice::from_basis(convert<Rational>(b.k1), a1, "K1");
  b.K2 = IntegerLattice::from_basis(convert<Rational>(b.k2), a2, "K2");
  b.I1 = IntegerLattice::from_basis(convert<Rational>(b.i1), a1, "I1");
  b.I2 = IntegerLattice::from_basis(convert<Rational>(b.i2), a2, "I2");

  IntMatrix c = c1;
  for (std::size_t r = 0; r < c2.rows(); ++r) c.append_row(c2.row(r));
  b.index_kernel = abs(determinant(c));
  b.index_image = abs(determinant(b.basis)) / (abs(determinant(b.i1)) * abs(determinant(b.i2)));

  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvariantFailure, what); };
  const Integer expected = power_of_two(n);
  if (b.index_kernel != expected) fail("[G : K1 + K2] = " + b.index_kernel.get_str() + ", expected 2^" + std::to_string(n));
  if (b.index_image != expected) fail("[I1 + I2 : G] = " + b.index_image.get_str() + ", expected 2^" + std::to_string(n));
  auto i1x2 = rescale(b.I1, 2);
  if (!is_even_unimodular(i1x2)) fail("I1 scaled by 2 is not even unimodular");
  if (minimum(i1x2) != 4) fail("I1 scaled by 2 does not have minimum 4");
  if (minimum(b.K1) != 8) fail("K1 does not have minimum 8");
  if (!dual_in_span(b.K1, b.k1, b.i1)) fail("I1 is not the dual of K1 in its span");
  if (!dual_in_span(b.K2, b.k2, b.i2)) fail("I2 is not the dual of K2 in its span");
  return b;
}

MinimumCertificate certify_minimum(const IntegerLattice& l, const Rational& claimed, const SliceOptions& opt) {
  require(claimed > 0, ErrorKind::InvalidInput, "claimed minimum must be positive");
  MinimumCertificate cert;
  cert.claimed = claimed;
  const std::size_t n = l.rank();
  Enumerator e(l);

  // Norms lie in step * Z, step = gcd of the G_ii and 2 G_ij.
  const Integer den = common_denominator(l.gram());
  Integer g = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Rational v = l.gram()(i, j) * den * (i == j ? 1 : 2);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_num_mpz_t());
    }
  const Rational step = Rational(g, den);
  Rational below = claimed - step;
  require(below >= 0, ErrorKind::InvalidInput, "claimed minimum is below the norm grid");

  bool attained = false;
  {
    const RatMatrix rg = convert<Rational>(e.reduced_gram());
    for (std::size_t i = 0; i < n && !attained; ++i) attained = rg(i, i) / e.denominator() == claimed;
    if (!attained) {
      auto rep = e.visit({}, claimed, true, [&](auto, const Rational& norm) {
        attained = norm == claimed;
        return !attained;
      }, opt.node_budget);
      if (!attained && !rep.complete) throw Error(ErrorKind::BudgetExceeded, "budget exhausted looking for a vector of norm " + format_rational(claimed));
    }
  }

  if (!opt.checkpoint_dir.empty()) std::filesystem::create_directories(opt.checkpoint_dir);
  auto slice_path = [&](std::size_t c) {
    return opt.checkpoint_dir + "/" + (opt.tag.empty() ? std::string("min") : opt.tag) + "_slice_" + std::to_string(c) + ".ckpt";
  };
  const std::string input = gram_hash(l.gram()) + " " + format_rational(claimed);

  std::uint64_t budget_left = opt.node_budget;
  for (std::size_t c = 0;; ++c) {
    const std::string path = slice_path(c);
    if (!opt.checkpoint_dir.empty() && opt.resume) {
      if (auto kv = detail::read_kv_file(path, kSliceHeader)) {
        if ((*kv)["input"] != input) throw Error(ErrorKind::CheckpointCorrupt, path + ": written for different inputs");
        if (detail::kv_u64(*kv, "slice", path) != c) throw Error(ErrorKind::CheckpointCorrupt, path + ": slice mismatch");
        cert.below += detail::kv_u64(*kv, "below", path);
        ++cert.slices_resumed;
        ++cert.slices;
        if (detail::kv_u64(*kv, "more", path) == 0) break;
        continue;
      }
    }
    bool more = false;
    auto rep = e.visit_slice({}, below, true, {}, c, more, budget_left);
    cert.nodes += rep.nodes;
    if (!rep.complete)
      throw Error(ErrorKind::BudgetExceeded, "node budget exhausted in slice " + std::to_string(c) + " of the minimum check");
    if (opt.node_budget) budget_left = rep.nodes >= budget_left ? 1 : budget_left - rep.nodes;
    cert.below += rep.total();
    ++cert.slices;
    if (!opt.checkpoint_dir.empty())
      detail::write_kv_file(path, kSliceHeader,
                            {{"input", input},
                             {"slice", std::to_string(c)},
                             {"below", std::to_string(rep.total())},
                             {"nodes", std::to_string(rep.nodes)},
                             {"more", more ? "1" : "0"}});
    if (!more) break;
  }
  cert.verified = attained && cert.below == 0;
  return cert;
}

DecompContext::DecompContext(DecompositionBundle b) : b_(std::move(b)), ek2_(b_.K2) {
  basis_inv_ = *inverse(convert<Rational>(b_.basis));
  k2_inv_ = *inverse(convert<Rational>(b_.k2));
  auto rep = ek2_.short_vectors(4);
  k2_short_ = rep.total();
}

void DecompContext::prepare_minimal_i1() {
  if (min_i1_) return;
  Enumerator e(b_.I1);
  std::vector<std::vector<std::int64_t>> found;
  bool short_found = false;
  e.visit({}, 2, true, [&](std::span<const std::int64_t> x, const Rational& norm) {
    short_found = short_found || norm != 2;
    found.emplace_back(x.begin(), x.end());
    return true;
  });
  require(!short_found, ErrorKind::InvariantFailure, "I1 has vectors below norm 2");
  std::vector<std::vector<Integer>> out;
  out.reserve(found.size());
  for (const auto& x : found) {
    std::vector<Integer> c(x.begin(), x.end());
    out.push_back(row_times(c, b_.i1));
  }
  std::sort(out.begin(), out.end());
  min_i1_ = std::move(out);
}

const std::vector<std::vector<Integer>>& DecompContext::minimal_i1() const {
  require(min_i1_.has_value(), ErrorKind::PreconditionViolated, "prepare_minimal_i1 was not called");
  return *min_i1_;
}

std::optional<std::vector<Integer>> DecompContext::gamma_coords(const std::vector<Integer>& ambient) const {
  require(ambient.size() == b_.basis.cols(), ErrorKind::DimensionMismatch, "vector has the wrong length");
  auto x = row_times(ambient, basis_inv_);
  std::vector<Integer> out;
  for (auto& c : x) {
    if (c.get_den() != 1) return std::nullopt;
    out.push_back(c.get_num());
  }
  return out;
}

std::vector<Integer> DecompContext::reduce_mod_k2(std::vector<Integer> w) const {
  const IntMatrix& h = b_.k2;  // upper triangular, positive diagonal
  for (std::size_t i = 0; i < h.rows(); ++i) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), w[i].get_mpz_t(), h(i, i).get_mpz_t());
    if (q != 0)
      for (std::size_t j = i; j < w.size(); ++j) w[j] -= q * h(i, j);
  }
  return w;
}

std::vector<Rational> DecompContext::k2_coords(const std::vector<Integer>& w) const { return row_times(w, k2_inv_); }

bool DecompContext::in_k2(const std::vector<Integer>& w) const {
  auto x = k2_coords(w);
  return std::all_of(x.begin(), x.end(), [](const Rational& r) { return r.get_den() == 1; });
}

Lift lift_minimal(const DecompContext& ctx, const std::vector<Integer>& v) {
  const auto& b = ctx.bundle();
  const std::size_t n = b.n;
  require(v.size() == n, ErrorKind::DimensionMismatch, "v must have the length of the first block");
  require(std::any_of(v.begin(), v.end(), [](const Integer& x) { return x != 0; }), ErrorKind::PreconditionViolated,
          "v must be nonzero");
  std::vector<Rational> vr(v.begin(), v.end());
  require(dot(vr, row_times(v, b.I1.ambient()->gram)) == 2, ErrorKind::PreconditionViolated,
          "v must have norm min(I1) = 2");

  const IntMatrix t1 = columns(b.basis, 0, n);
  auto lift = [&](bool reverse) {
    auto x = solve_integral(t1, v, reverse);
    if (!x) throw Error(ErrorKind::NoLift, "v has no preimage in G");
    auto full = row_times(*x, b.basis);
    return std::vector<Integer>(full.begin() + n, full.end());
  };
  Lift out;
  out.w = lift(false);
  out.second = lift(true);
  std::vector<Integer> diff(out.w.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = out.w[i] - out.second[i];
  require(ctx.in_k2(diff), ErrorKind::InvariantFailure, "two lifts differ by a vector outside K2");
  out.w = ctx.reduce_mod_k2(out.w);

  std::vector<Integer> joined(v);
  joined.insert(joined.end(), out.w.begin(), out.w.end());
  require(ctx.gamma_coords(joined).has_value(), ErrorKind::InvariantFailure, "v + w is not in G");
  return out;
}

IwResult check_Iw(const DecompContext& ctx, const std::vector<Integer>& w, std::uint64_t node_budget) {
  const auto& b = ctx.bundle();
  require(w.size() == 2 * b.n, ErrorKind::DimensionMismatch, "w must have the length of the second block");
  IwResult r;
  const Enumerator& e = ctx.k2_enumerator();
  auto t = ctx.k2_coords(w);
  bool integral = std::all_of(t.begin(), t.end(), [](const Rational& x) { return x.get_den() == 1; });
  // For w in K2 the coset is K2 itself; its zero vector is not counted.
  auto rep = integral ? e.short_vectors(4, {.node_budget = node_budget}) : e.coset_vectors(t, 4, {.node_budget = node_budget});
  if (!rep.complete) throw Error(ErrorKind::BudgetExceeded, "node budget exhausted in the coset w + K2");
  r.nodes = rep.nodes;
  r.norm4 = rep.total();
  r.pass = r.norm4 == 0 && ctx.k2_short() == 0;
  return r;
}

DecompReport verify_decomposition(const DecompContext& ctx, const DecompOptions& opt) {
  const auto& mins = ctx.minimal_i1();
  DecompReport rep;
  rep.total = mins.size();
  std::vector<std::size_t> indices;
  if (opt.sample) {
    indices = sample_classes(mins.size(), std::min(*opt.sample, mins.size()), opt.seed);
  } else {
    indices.resize(mins.size());
    std::iota(indices.begin(), indices.end(), 0);
    rep.exhaustive = true;
  }
  auto path_of = [&](std::size_t idx) { return opt.checkpoint_dir + "/w_" + std::to_string(idx) + ".ckpt"; };
  if (!opt.checkpoint_dir.empty()) std::filesystem::create_directories(opt.checkpoint_dir);

  std::vector<std::optional<DecompCheck>> results(indices.size());
  auto from_checkpoint = [&](std::size_t idx) -> std::optional<DecompCheck> {
    const std::string path = path_of(idx);
    auto kv = detail::read_kv_file(path, kDecompHeader);
    if (!kv) return std::nullopt;
    if ((*kv)["input"] != opt.input_hash) throw Error(ErrorKind::CheckpointCorrupt, path + ": written for different inputs");
    if (detail::kv_u64(*kv, "index", path) != idx) throw Error(ErrorKind::CheckpointCorrupt, path + ": index mismatch");
    DecompCheck c;
    c.index = idx;
    c.v = mins[idx];
    std::istringstream ws((*kv)["w"]);
    Integer x;
    while (ws >> x) c.w.push_back(x);
    if (c.w.size() != 2 * ctx.bundle().n) throw Error(ErrorKind::CheckpointCorrupt, path + ": bad w");
    c.result.norm4 = detail::kv_u64(*kv, "norm4", path);
    c.result.nodes = detail::kv_u64(*kv, "nodes", path);
    c.result.pass = c.result.norm4 == 0 && ctx.k2_short() == 0;
    return c;
  };
  if (!opt.checkpoint_dir.empty() && opt.resume)
    for (std::size_t k = 0; k < indices.size(); ++k) results[k] = from_checkpoint(indices[k]);

  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (;;) {
        std::size_t k = next.fetch_add(1);
        if (k >= indices.size()) return;
        if (results[k]) continue;
        DecompCheck c;
        c.index = indices[k];
        c.v = mins[c.index];
        c.w = lift_minimal(ctx, c.v).w;
        c.result = check_Iw(ctx, c.w, opt.node_budget);
        std::lock_guard lock(io);
        if (!opt.checkpoint_dir.empty())
          detail::write_kv_file(path_of(c.index), kDecompHeader,
                                {{"input", opt.input_hash},
                                 {"index", std::to_string(c.index)},
                                 {"w", join(c.w)},
                                 {"norm4", std::to_string(c.result.norm4)},
                                 {"nodes", std::to_string(c.result.nodes)}});
        results[k] = std::move(c);
      }
    } catch (...) {
      std::lock_guard lock(io);
      if (!failure) failure = std::current_exception();
      next = indices.size();
    }
  };
  unsigned nt = std::max(1u, opt.threads);
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& r : results) {
    (r->result.pass ? rep.passed : rep.failed)++;
    rep.norm6 += 2 * r->result.norm4;
    rep.checks.push_back(std::move(*r));
  }
  return rep;
}

void write_decomp_certificate(std::ostream& os, const DecompContext& ctx, const DecompReport& r,
                              const std::map<std::string, std::string>& inputs) {
  const auto& b = ctx.bundle();
  os << "report: verify-decomp\n";
  for (const auto& [k, v] : inputs) os << "input " << k << ": " << v << "\n";
  os << "block: " << b.n << "\n"
     << "index_kernel: " << b.index_kernel << "\n"
     << "index_image: " << b.index_image << "\n"
     << "minimal_vectors_I1: " << r.total << "\n"
     << "mode: " << (r.exhaustive ? "exhaustive" : "sample") << "\n"
     << "checked: " << r.checks.size() << "\n"
     << "passed: " << r.passed << "\n"
     << "failed: " << r.failed << "\n"
     << "norm6_seen: " << r.norm6 << "\n";
  for (const auto& c : r.checks)
    os << "w " << c.index << ": v=(" << join(c.v) << ") w=(" << join(c.w) << ") result="
       << (c.result.pass ? "pass" : "fail") << " norm4=" << c.result.norm4 << "\n";
}

}  // namespace lat72
