#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "latrefine/lattice.hpp"
#include "latrefine/model.hpp"

namespace latrefine {

/// Entry point of the `latrefine` tool (subcommands fit, refine, eval,
/// sweep). Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a CA-only model PDB back onto `spec`, snapping every coordinate to
/// the nearest lattice node within `tolerance` Angstrom. Throws LatticeError
/// for a coordinate off the lattice and InvalidModelError for a non-SAW.
LatticeModel load_lattice_model(const std::string& pdb_text, const LatticeSpec& spec, double tolerance = 0.1);

}  // namespace latrefine
