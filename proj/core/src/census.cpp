#include "lat72/census.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "lat72/error.hpp"
#include "lat72/linalg.hpp"
#include "checkpoint.hpp"

namespace lat72 {

namespace {

constexpr std::uint64_t kFrames = 4095;
constexpr std::uint64_t kFrameSize = 48;

Coords times(const std::vector<Integer>& x, const IntMatrix& basis) {
  Coords out(basis.cols(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    std::int64_t c = x[i].get_si();
    for (std::size_t j = 0; j < basis.cols(); ++j) out[j] += c * basis(i, j).get_si();
  }
  return out;
}

Coords operator+(Coords a, const Coords& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Coords negate(Coords a) {
  for (auto& x : a) x = -x;
  return a;
}

Coords times(std::span<const std::int64_t> x, const IntMatrix& basis) {
  Coords out(basis.cols(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < basis.cols(); ++j) out[j] += x[i] * basis(i, j).get_si();
  }
  return out;
}

// All vectors of norm 8 (both signs) of a sublattice of minimum 8, in L coordinates.
std::vector<Coords> norm8_vectors(const Enumerator& e, const IntMatrix& coords, const std::string& name) {
  std::vector<Coords> out;
  bool shorter = false;
  auto r = e.visit(std::vector<Rational>(e.dim(), 0), 8, true,
                   [&](std::span<const std::int64_t> x, const Rational& norm) {
                     if (norm != 8) shorter = true;
                     Coords c = times(x, coords);
                     out.push_back(negate(c));
                     out.push_back(std::move(c));
                     return true;
                   });
  r.require_complete();
  require(!shorter, ErrorKind::InvariantFailure, name + " has vectors of norm below 8");
  return out;
}

}  // namespace

std::uint64_t class_key(const Coords& v) {
  require(v.size() <= 64, ErrorKind::RankTooLarge, "class keys need rank <= 64");
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] & 1) k |= std::uint64_t{1} << i;
  return k;
}

LeechClassifier::LeechClassifier(const Enumerator& leech) {
  require(leech.dim() == 24, ErrorKind::PreconditionViolated, "classifier expects the Leech lattice");
  table_.assign(std::size_t{1} << 24, 8);
  table_[0] = 0;
  std::vector<Rational> zero(24, 0);
  bool collision = false;
  auto report = leech.visit(
      zero, 6, true,
      [&](std::span<const std::int64_t> x, const Rational& norm) {
        Coords c(x.begin(), x.end());
        auto& slot = table_[class_key(c)];
        if (slot != 8) collision = true;
        if (norm == 4) {
          slot = 4;
          ++n4_;
        } else if (norm == 6) {
          slot = 6;
          ++n6_;
        } else {
          collision = true;
        }
        return true;
      });
  report.require_complete();
  require(!collision, ErrorKind::InvariantFailure, "a class of Leech/2Leech holds two short vector pairs");
  n4_ *= 2;
  n6_ *= 2;
}

CensusContext::CensusContext(Polarization p)
    : p_(std::move(p)),
      f_(p_.parent.integer_gram()),
      em_(p_.m),
      two_l_(rescale(p_.parent, 4)) {
  require(p_.parent.rank() == 24, ErrorKind::PreconditionViolated, "census expects a polarization of Leech");
  f64_ = Matrix<std::int64_t>(24, 24);
  for (std::size_t i = 0; i < 24; ++i)
    for (std::size_t j = 0; j < 24; ++j) f64_(i, j) = f_(i, j).get_si();
  m_inv_ = *inverse(convert<Rational>(p_.m_coords));
}

std::int64_t CensusContext::inner(const Coords& x, const Coords& y) const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i]) continue;
    std::int64_t r = 0;
    for (std::size_t j = 0; j < y.size(); ++j) r += f64_(i, j) * y[j];
    s += x[i] * r;
  }
  return s;
}

void CensusContext::prepare_classes() {
  if (!classes_) classes_ = class_table(*this);
}

void CensusContext::prepare_min_vectors() {
  if (!xm_) xm_ = norm8_vectors(em_, p_.m_coords, "M");
}

void CensusContext::prepare_classifier() {
  if (!classifier_) classifier_ = std::make_shared<const LeechClassifier>(Enumerator(p_.parent));
}

const ClassTable& CensusContext::classes() const {
  require(classes_.has_value(), ErrorKind::PreconditionViolated, "class table not prepared");
  return *classes_;
}

const std::vector<Coords>& CensusContext::min_vectors_m() const {
  require(xm_.has_value(), ErrorKind::PreconditionViolated, "minimal vectors of M not prepared");
  return *xm_;
}

const LeechClassifier& CensusContext::classifier() const {
  require(classifier_ != nullptr, ErrorKind::PreconditionViolated, "class minima not prepared");
  return *classifier_;
}

std::vector<Coords> CensusContext::shifted_set(const Coords& w, int q) const {
  std::vector<Rational> t(24, 0);
  for (std::size_t j = 0; j < 24; ++j)
    for (std::size_t i = 0; i < 24; ++i)
      if (w[i]) t[j] += Rational(w[i]) * m_inv_(i, j);
  EnumOptions opt;
  opt.collect_vectors = true;
  auto r = em_.coset_vectors(t, 2 * q, opt);
  r.require_complete();
  std::vector<Coords> out;
  for (const auto& v : r.vectors)
    if (v.norm == 2 * q) out.push_back(times(v.coords, p_.m_coords));
  std::sort(out.begin(), out.end());
  return out;
}

std::map<Rational, std::uint64_t> CensusContext::coset_counts(const Coords& v) const {
  std::vector<Rational> t(24);
  for (std::size_t i = 0; i < 24; ++i) t[i] = Rational(v[i] & 1, 2);
  auto r = two_l_.coset_vectors(t, 8);
  r.require_complete();
  return r.count_by_norm;
}

std::map<Rational, std::uint64_t> CensusContext::coset_counts_fast(const Coords& v) const {
  switch (classifier().class_min(class_key(v))) {
    case 0: return {{Rational(0), 1}};
    case 4: return {{Rational(4), 2}};
    case 6: return {{Rational(6), 2}};
    default: return {{Rational(8), kFrameSize}};
  }
}

ClassTable class_table(const CensusContext& ctx) {
  const auto& p = ctx.polarization();
  std::unordered_map<std::uint64_t, std::vector<Coords>> groups;
  for (auto& c : norm8_vectors(Enumerator(p.n), p.n_coords, "N"))
    if (c < negate(c)) groups[class_key(c)].push_back(std::move(c));
  ClassTable t;
  for (auto& [key, vs] : groups) {
    require(vs.size() == kFrameSize / 2, ErrorKind::InvariantFailure,
            "class of N/2L with " + std::to_string(2 * vs.size()) + " norm-8 vectors");
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        require(ctx.inner(vs[i], vs[j]) == 0, ErrorKind::InvariantFailure, "frame vectors are not orthogonal");
    std::sort(vs.begin(), vs.end());
    Frame f{key, vs};
    for (const auto& v : vs) f.vectors.push_back(negate(v));
    t.vectors_grouped += f.vectors.size();
    t.classes.push_back(std::move(f));
  }
  std::sort(t.classes.begin(), t.classes.end(), [](const Frame& a, const Frame& b) { return a.key < b.key; });
  require(t.classes.size() == kFrames, ErrorKind::InvariantFailure,
          "N/2L has " + std::to_string(t.classes.size()) + " norm-8 classes");
  return t;
}

std::vector<Coords> w2_set(const CensusContext& ctx, const Coords& w) { return ctx.shifted_set(w, 2); }

std::vector<Coords> w3_set(const CensusContext& ctx, const Coords& w) { return ctx.shifted_set(w, 3); }

bool is_24a1(const CensusContext& ctx, const Coords& w, const std::vector<Coords>& w2) {
  if (w2.size() != kFrameSize) return false;
  std::vector<Coords> v;
  for (const auto& x : w2) v.push_back(x + w);
  for (std::size_t i = 0; i < v.size(); ++i) {
    int opposite = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      std::int64_t ip = ctx.inner(v[i], v[j]);
      if (i == j) {
        if (ip != 4) return false;
      } else if (ip == -4) {
        ++opposite;
      } else if (ip != 0) {
        return false;
      }
    }
    if (opposite != 1) return false;
  }
  return true;
}

DesignTable design_counts(bool direct, const CensusContext& ctx, const Coords& w) {
  const auto& xs = ctx.min_vectors_m();
  std::int64_t ww = ctx.inner(w, w);
  if (!direct) return design_counts_from_moments(xs.size(), 8, ww, 2048 * kFrameSize);
  DesignTable n{};
  for (const auto& x : xs) {
    std::int64_t ip = std::abs(ctx.inner(x, w));
    require(ip <= 6, ErrorKind::InvariantFailure, "inner product " + std::to_string(ip) + " exceeds 6");
    ++n[ip];
  }
  return n;
}

DesignTable design_counts_from_moments(std::uint64_t set_size, std::int64_t norm_x, std::int64_t norm_w,
                                       std::uint64_t odd_total) {
  // Degree-11 design in dimension 24: sum_x (x,w)^{2k} = |X| (|x|^2 |w|^2)^k (2k-1)!! / (24 * 26 * ... * (22 + 2k)).
  RatMatrix a(7, 7);
  std::vector<Rational> rhs(7);
  Rational moment = Rational(set_size);
  for (int k = 0; k <= 5; ++k) {
    if (k > 0) moment *= Rational((2 * k - 1) * norm_x * norm_w, 22 + 2 * k);
    for (int i = 0; i <= 6; ++i) {
      Integer p = 1;
      for (int e = 0; e < 2 * k; ++e) p *= i;
      a(k, i) = p;
    }
    rhs[k] = moment;
  }
  for (int i = 1; i <= 6; i += 2) a(6, i) = 1;
  rhs[6] = Rational(odd_total);
  auto inv = inverse(a);
  require(inv.has_value(), ErrorKind::SingularSystem, "design moment system is singular");
  DesignTable n{};
  for (int i = 0; i <= 6; ++i) {
    Rational s = 0;
    for (int k = 0; k < 7; ++k) s += (*inv)(i, k) * rhs[k];
    require(s.get_den() == 1 && s >= 0, ErrorKind::SingularSystem,
            "design moments give a non-integral count n_" + std::to_string(i) + " = " + s.get_str());
    n[i] = s.get_num().get_ui();
  }
  return n;
}

CensusReport norm8_assembly(std::uint64_t b6) {
  const std::uint64_t kiss = 196560;
  const std::uint64_t base422 = kFrames * kFrameSize * kFrameSize * kFrameSize * 3;
  require(72 * b6 <= base422, ErrorKind::PreconditionViolated, "b6 too large for the closed form");
  CensusReport r;
  r.b6 = b6;
  r.type_counts["(8,0,0)"] = kiss * 3;
  r.type_counts["(4,4,0)"] = kiss * kFrameSize * 3;
  r.type_counts["(3,3,2)"] = kFrames * kFrameSize * 2048 * 2 * 2 * 3;
  r.type_counts["(4,2,2)"] = base422 - 72 * b6;
  for (const auto& [k, v] : r.type_counts) r.kissing += v;
  r.provenance = "formula";
  r.classes_done = r.classes_total = kFrames;
  r.complete = true;
  return r;
}

std::vector<std::size_t> sample_classes(std::size_t total, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(k, total));
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

struct ClassResult {
  std::uint64_t min4 = 0;  // ordered pairs whose coset has minimum 4
  std::uint64_t min8 = 0;
  std::uint64_t other = 0;
};

constexpr const char* kCheckpointHeader = "lat72-census-checkpoint 1";

std::string checkpoint_path(const std::string& dir, std::size_t index) {
  std::ostringstream os;
  os << dir << "/class_" << index << ".ckpt";
  return os.str();
}

void write_checkpoint(const std::string& dir, const std::string& hash, std::size_t index, const ClassResult& r) {
  detail::write_kv_file(checkpoint_path(dir, index), kCheckpointHeader,
                        {{"input", hash},
                         {"class", std::to_string(index)},
                         {"min4", std::to_string(r.min4)},
                         {"min8", std::to_string(r.min8)},
                         {"other", std::to_string(r.other)}});
}

std::optional<ClassResult> read_checkpoint(const std::string& dir, const std::string& hash, std::size_t index) {
  const std::string path = checkpoint_path(dir, index);
  auto kv = detail::read_kv_file(path, kCheckpointHeader);
  if (!kv) return std::nullopt;
  auto corrupt = [&](const std::string& why) { return Error(ErrorKind::CheckpointCorrupt, path + ": " + why); };
  if ((*kv)["input"] != hash) throw corrupt("written for different inputs");
  if (detail::kv_u64(*kv, "class", path) != index) throw corrupt("class index mismatch");
  ClassResult r{detail::kv_u64(*kv, "min4", path), detail::kv_u64(*kv, "min8", path),
                detail::kv_u64(*kv, "other", path)};
  if (r.min4 + r.min8 + r.other != kFrameSize * kFrameSize) throw corrupt("pair counts do not add up");
  return r;
}

}  // namespace

CensusReport norm6_census(const CensusContext& ctx, const CensusOptions& opt) {
  const auto& table = ctx.classes();
  std::vector<std::size_t> indices;
  if (opt.sample) {
    indices = *opt.sample;
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    for (auto i : indices) require(i < table.classes.size(), ErrorKind::InvalidInput, "class index out of range");
  } else {
    indices.resize(table.classes.size());
    std::iota(indices.begin(), indices.end(), 0);
  }

  auto pair_vector = [&](const Coords& w, const Coords& x, const Coords& y) { return w + x + y; };

  CensusReport rep;
  rep.provenance = "enumeration";
  rep.classes_total = table.classes.size();
  rep.classes = indices;

  if (opt.fast_path && opt.cross_check > 0) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pc(0, indices.size() - 1), px(0, kFrameSize - 1);
    std::map<std::size_t, std::vector<Coords>> cache;
    for (std::size_t s = 0; s < opt.cross_check; ++s) {
      std::size_t c = indices[pc(rng)];
      const Coords& w = table.classes[c].rep();
      auto it = cache.find(c);
      if (it == cache.end()) it = cache.emplace(c, w2_set(ctx, w)).first;
      const auto& w2 = it->second;
      require(w2.size() == kFrameSize, ErrorKind::InvariantFailure, "|W_2(w)| != 48");
      Coords v = pair_vector(w, w2[px(rng)], w2[px(rng)]);
      require(ctx.coset_counts(v) == ctx.coset_counts_fast(v), ErrorKind::SelfCheckFailed,
              "class-table shortcut disagrees with coset enumeration");
      ++rep.fast_path_checked;
    }
  }

  std::vector<std::optional<ClassResult>> results(indices.size());
  if (!opt.checkpoint_dir.empty()) {
    std::filesystem::create_directories(opt.checkpoint_dir);
    if (opt.resume)
      for (std::size_t k = 0; k < indices.size(); ++k)
        results[k] = read_checkpoint(opt.checkpoint_dir, opt.input_hash, indices[k]);
  }

  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (;;) {
        std::size_t k = next.fetch_add(1);
        if (k >= indices.size()) return;
        if (results[k]) continue;
        const Coords& w = table.classes[indices[k]].rep();
        auto w2 = w2_set(ctx, w);
        require(w2.size() == kFrameSize, ErrorKind::InvariantFailure,
                "|W_2(w)| = " + std::to_string(w2.size()) + " for class " + std::to_string(indices[k]));
        ClassResult cr;
        for (const auto& x : w2)
          for (const auto& y : w2) {
            Coords v = pair_vector(w, x, y);
            int m;
            if (opt.fast_path) {
              m = ctx.classifier().class_min(class_key(v));
            } else {
              auto counts = ctx.coset_counts(v);
              m = counts.empty() ? 16 : static_cast<int>(counts.begin()->first.get_num().get_si());
              if (m == 8 && counts.begin()->second != kFrameSize) m = -1;
            }
            if (m == 4)
              ++cr.min4;
            else if (m == 8)
              ++cr.min8;
            else
              ++cr.other;
          }
        std::lock_guard lock(io);
        results[k] = cr;
        if (!opt.checkpoint_dir.empty()) write_checkpoint(opt.checkpoint_dir, opt.input_hash, indices[k], cr);
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

  for (const auto& r : results) {
    if (!r) continue;
    ++rep.classes_done;
    rep.b6 += 2 * r->min4;
    rep.enumerated_422 += 3 * kFrameSize * r->min8;
    rep.anomalies += r->other;
  }
  rep.complete = rep.classes_done == rep.classes_total;
  if (rep.complete) {
    auto closed = norm8_assembly(rep.b6);
    rep.type_counts = closed.type_counts;
    rep.kissing = closed.kissing;
  }
  return rep;
}

void write_census_report(std::ostream& os, const CensusReport& r, const std::map<std::string, std::string>& inputs) {
  os << "report: census\n";
  for (const auto& [k, v] : inputs) os << "input " << k << ": " << v << "\n";
  os << "provenance: " << r.provenance << "\n";
  os << "classes_done: " << r.classes_done << "\n";
  os << "classes_total: " << r.classes_total << "\n";
  os << "complete: " << (r.complete ? "true" : "false") << "\n";
  if (!r.classes.empty() && !r.complete) {
    os << "classes:";
    for (auto c : r.classes) os << " " << c;
    os << "\n";
  }
  os << "b6: " << r.b6 << "\n";
  if (r.provenance == "enumeration") {
    os << "pair_convention: ordered pairs (x, y) in W2(w)^2; norm-8 component in any of 3 positions\n";
    os << "enumerated_422: " << r.enumerated_422 << "\n";
    os << "anomalies: " << r.anomalies << "\n";
    os << "fast_path_checked: " << r.fast_path_checked << "\n";
  }
  for (const auto& [k, v] : r.type_counts) os << "type " << k << ": " << v << "\n";
  if (r.complete) {
    os << "kissing: " << r.kissing << "\n";
    if (r.provenance == "enumeration")
      os << "closed_form_422_agrees: " << (r.enumerated_422 == r.type_counts.at("(4,2,2)") ? "true" : "false")
         << "\n";
  }
}

}  // namespace lat72
