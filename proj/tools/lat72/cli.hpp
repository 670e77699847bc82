#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lat72/hermitian.hpp"
#include "lat72/lattice.hpp"
#include "lat72/polarization.hpp"

namespace lat72::cli {

struct Globals {
  unsigned threads = 1;
  std::uint64_t budget = 0;
  std::string checkpoint_dir;
  std::uint64_t seed = 1;
};

/// A check that ran and failed: exit status 1.
struct VerificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad arguments found after parsing: exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

IntegerLattice load_lattice(const std::string& path);
/// Writes to `path`, or to stdout when it is empty or "-".
void emit_gram(const std::string& path, const RatMatrix& gram);
void emit_text(const std::string& path, const std::string& text);
/// Whitespace- or comma-separated rationals.
std::vector<Rational> parse_vector(const std::string& s);
/// Structure file given, or the shipped one.
std::string structure_path_or_default(const std::string& path);
/// The census polarization (L B, L A) of the lattice carrying the structure.
Polarization census_polarization(const StructurePair& sp);

void add_lattice_commands(CLI::App& app, const Globals& g);
void add_structure_commands(CLI::App& app, const Globals& g);
void add_pipeline_commands(CLI::App& app, const Globals& g);

}  // namespace lat72::cli
