#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latrefine/geometry.hpp"
#include "latrefine/metrics.hpp"
#include "latrefine/model.hpp"

namespace latrefine {

/// Residues further apart than this (consecutive C-alpha, Angstrom) are a chain break.
inline constexpr double kChainBreakDistance = 4.5;

struct ResidueRecord {
    int seq_num = 0;
    char insertion_code = ' ';
    std::string name;
    std::optional<Vec3> ca;
    /// Altloc code of the C-alpha kept (' ' when none).
    char ca_altloc = ' ';
    /// Every altloc code seen on this residue's C-alpha.
    std::string altlocs;
};

struct ChainRecord {
    std::string id;
    std::vector<ResidueRecord> residues;
};

/// One MODEL of a PDB file: chains in order of first appearance, residues
/// ordered by (sequence number, insertion code).
struct StructureRecord {
    std::vector<ChainRecord> chains;

    const ChainRecord* find_chain(std::string_view id) const;
};

/// `model_index` is 1-based and counts MODEL records; a file without MODEL
/// records has exactly one model. Only ATOM records are read.
StructureRecord parse_structure(std::string_view pdb_text, int model_index = 1);

struct TraceOptions {
    /// Chain id to extract; empty selects the first chain in the file.
    std::string chain;
    int model_index = 1;
    /// Truncate at the first chain break instead of failing.
    bool permissive_gaps = false;
};

struct TraceParse {
    CaTrace trace;
    std::vector<std::string> warnings;
};

/// Throws StructureError (no such chain, no C-alpha atoms) or ChainBreakError.
TraceParse parse_ca_trace_detailed(std::string_view pdb_text, const TraceOptions& opts = {});
inline CaTrace parse_ca_trace(std::string_view pdb_text, const TraceOptions& opts = {}) {
    return parse_ca_trace_detailed(pdb_text, opts).trace;
}

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

struct ModelPdbOptions {
    std::string title;
    std::vector<std::string> remarks;
    /// Residue names for the ATOM records; missing entries are written as GLY.
    std::vector<std::string> residue_names;
    char chain_id = 'A';
    /// Applied to the Euclidean coordinates before writing (e.g. a superposition).
    std::optional<RigidTransform> transform;
};

/// CA-only PDB text, one fixed-width ATOM record per model point.
std::string write_model_pdb(const LatticeModel& model, const ModelPdbOptions& opts = {});
std::string format_ca_atom(int serial, std::string_view res_name, char chain, int res_seq, const Vec3& p);

// ---------------------------------------------------------------------------
// sweep reports

struct SweepCell {
    int d_max = 0;
    int k = 0;
    std::optional<double> drmsd;
    double seconds = 0.0;
    bool improved = false;
    bool complete = true;
    std::size_t discrepancies = 0;
    std::string error;
};

struct SweepReport {
    std::string protein_id;
    std::string lattice;
    double initial_drmsd = 0.0;
    std::vector<int> d_max_values;
    std::vector<int> k_values;
    std::vector<SweepCell> cells;

    const SweepCell* find(int d_max, int k) const;
};

struct SweepReportText {
    std::string tsv;
    std::string json;
};

/// TSV: a dRMSD block and a seconds block, one row per d_max and one column
/// per K. JSON: every cell with full precision.
SweepReportText write_sweep_report(const SweepReport& report);

}  // namespace latrefine
