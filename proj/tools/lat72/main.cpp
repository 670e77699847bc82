#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "lat72/catalog.hpp"
#include "lat72/error.hpp"

namespace lat72::cli {

IntegerLattice load_lattice(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return IntegerLattice(read_gram(in), path);
}

void emit_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

void emit_gram(const std::string& path, const RatMatrix& gram) {
  std::ostringstream os;
  write_gram(os, gram);
  emit_text(path, os.str());
}

std::vector<Rational> parse_vector(const std::string& s) {
  std::string t = s;
  for (auto& c : t)
    if (c == ',') c = ' ';
  std::istringstream is(t);
  std::vector<Rational> v;
  for (std::string tok; is >> tok;) v.push_back(parse_rational(tok));
  if (v.empty()) throw UsageError("empty vector");
  return v;
}

std::string structure_path_or_default(const std::string& path) {
  return path.empty() ? leech_structure_path() : path;
}

Polarization census_polarization(const StructurePair& sp) {
  return swap_halves(polarization_from_structure(IntegerLattice::from_integer_gram(sp.F), sp));
}

}  // namespace lat72::cli

namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("LAT72_THREADS"); env && *env) {
    try {
      int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring LAT72_THREADS=" << env << "\n";
  }
  return 1;
}

bool is_input_error(lat72::ErrorKind k) {
  using lat72::ErrorKind;
  return k == ErrorKind::InvalidInput || k == ErrorKind::DimensionMismatch || k == ErrorKind::NotFound ||
         k == ErrorKind::PreconditionViolated;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lat72::cli;
  CLI::App app{"Exact lattice tools: enumeration, Hermitian structures, polarizations, census and decomposition checks"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.threads = default_threads();
  app.add_option("--threads", g.threads, "Worker threads (default: LAT72_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--budget", g.budget, "Node budget for enumerations (0 = unlimited)");
  app.add_option("--checkpoint-dir", g.checkpoint_dir, "Directory for checkpoint files");
  app.add_option("--seed", g.seed, "Seed for sampling and searches");

  add_lattice_commands(app, g);
  add_structure_commands(app, g);
  add_pipeline_commands(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const VerificationFailed& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 1;
  } catch (const lat72::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? 2 : 1;
  }
  return 0;
}
