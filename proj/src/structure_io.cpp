#include "latrefine/structure_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "latrefine/errors.hpp"

namespace latrefine {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view column(std::string_view line, std::size_t first, std::size_t count) {
    if (first >= line.size()) return {};
    return line.substr(first, std::min(count, line.size() - first));
}

char column_char(std::string_view line, std::size_t idx) { return idx < line.size() ? line[idx] : ' '; }

double parse_coord(std::string_view field, std::size_t line_no) {
    const auto t = trim(field);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw StructureError("malformed coordinate '" + std::string(field) + "' on line " +
                             std::to_string(line_no));
    }
    return v;
}

int parse_int(std::string_view field, std::size_t line_no) {
    const auto t = trim(field);
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw StructureError("malformed residue number '" + std::string(field) + "' on line " +
                             std::to_string(line_no));
    }
    return v;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace

const ChainRecord* StructureRecord::find_chain(std::string_view id) const {
    for (const auto& c : chains)
        if (c.id == id) return &c;
    return nullptr;
}

StructureRecord parse_structure(std::string_view pdb_text, int model_index) {
    if (model_index < 1) throw ArgumentError("model index is 1-based");

    StructureRecord record;
    // (chain position, seq, icode) -> residue position
    std::map<std::tuple<std::size_t, int, char>, std::size_t> residue_index;

    int models_seen = 0;
    int current_model = 1;
    bool any_atoms_in_model = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= pdb_text.size()) {
        const auto eol = pdb_text.find('\n', pos);
        const auto line = pdb_text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? pdb_text.size() + 1 : eol + 1;
        ++line_no;

        if (starts_with(line, "MODEL ")) {
            ++models_seen;
            current_model = models_seen;
            continue;
        }
        if (starts_with(line, "ENDMDL")) {
            if (current_model == model_index && models_seen > 0) break;
            continue;
        }
        if (current_model != model_index || !starts_with(line, "ATOM  ")) continue;
        if (line.size() < 54) throw StructureError("truncated ATOM record on line " + std::to_string(line_no));

        any_atoms_in_model = true;
        const char altloc = column_char(line, 16);
        const std::string chain_id(trim(column(line, 21, 1)));
        const int seq = parse_int(column(line, 22, 4), line_no);
        const char icode = column_char(line, 26);
        const bool is_ca = trim(column(line, 12, 4)) == "CA";

        auto chain_it = std::find_if(record.chains.begin(), record.chains.end(),
                                     [&](const ChainRecord& c) { return c.id == chain_id; });
        if (chain_it == record.chains.end()) {
            record.chains.push_back(ChainRecord{chain_id, {}});
            chain_it = std::prev(record.chains.end());
        }
        const auto chain_pos = static_cast<std::size_t>(chain_it - record.chains.begin());
        auto& residues = chain_it->residues;

        const auto key = std::make_tuple(chain_pos, seq, icode);
        auto [rit, inserted] = residue_index.emplace(key, residues.size());
        if (inserted) {
            ResidueRecord r;
            r.seq_num = seq;
            r.insertion_code = icode;
            r.name = std::string(trim(column(line, 17, 3)));
            residues.push_back(std::move(r));
        }
        auto& res = residues[rit->second];
        if (!is_ca) continue;

        const Vec3 p{parse_coord(column(line, 30, 8), line_no), parse_coord(column(line, 38, 8), line_no),
                     parse_coord(column(line, 46, 8), line_no)};
        res.altlocs.push_back(altloc);
        if (!res.ca || altloc < res.ca_altloc) {
            res.ca = p;
            res.ca_altloc = altloc;
        }
    }

    if (models_seen > 0 && model_index > models_seen)
        throw StructureError("model " + std::to_string(model_index) + " not present (file has " +
                             std::to_string(models_seen) + ")");
    if (!any_atoms_in_model) throw StructureError("no ATOM records in model " + std::to_string(model_index));

    for (auto& chain : record.chains) {
        std::stable_sort(chain.residues.begin(), chain.residues.end(),
                         [](const ResidueRecord& a, const ResidueRecord& b) {
                             return std::tie(a.seq_num, a.insertion_code) < std::tie(b.seq_num, b.insertion_code);
                         });
    }
    return record;
}

TraceParse parse_ca_trace_detailed(std::string_view pdb_text, const TraceOptions& opts) {
    const auto record = parse_structure(pdb_text, opts.model_index);
    if (record.chains.empty()) throw StructureError("structure has no chains");

    const ChainRecord* chain = opts.chain.empty() ? &record.chains.front() : record.find_chain(opts.chain);
    if (chain == nullptr) throw StructureError("no chain '" + opts.chain + "' in structure");

    TraceParse out;
    out.trace.id = chain->id;
    for (const auto& res : chain->residues) {
        if (!res.ca) continue;
        out.trace.coords.push_back(*res.ca);
        out.trace.residue_names.push_back(res.name);
    }
    if (out.trace.coords.empty()) throw StructureError("chain '" + chain->id + "' has no C-alpha atoms");

    for (std::size_t i = 1; i < out.trace.coords.size(); ++i) {
        const double gap = distance(out.trace.coords[i - 1], out.trace.coords[i]);
        if (gap <= kChainBreakDistance) continue;
        char buf[160];
        std::snprintf(buf, sizeof buf, "chain break between C-alpha %zu and %zu (%.2f A > %.1f A)", i, i + 1, gap,
                      kChainBreakDistance);
        if (!opts.permissive_gaps) throw ChainBreakError(buf, i);
        out.warnings.emplace_back(std::string(buf) + "; trace truncated to " + std::to_string(i) + " residues");
        out.trace.coords.resize(i);
        out.trace.residue_names.resize(i);
        break;
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructureError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StructureError("cannot write '" + path + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw StructureError("write failed for '" + path + "'");
}

std::string format_ca_atom(int serial, std::string_view res_name, char chain, int res_seq, const Vec3& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ATOM  %5d  CA  %3.3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f          %2s  ",
                  serial, std::string(res_name).c_str(), chain, res_seq, p.x, p.y, p.z, 1.0, 0.0, "C");
    return buf;
}

std::string write_model_pdb(const LatticeModel& model, const ModelPdbOptions& opts) {
    std::string out;
    if (!opts.title.empty()) out += "TITLE     " + opts.title + "\n";
    for (const auto& r : opts.remarks) out += "REMARK 250 " + r + "\n";

    std::string last_name = "GLY";
    for (std::size_t i = 0; i < model.size(); ++i) {
        Vec3 p = model.spec.to_euclidean(model.points[i]);
        if (opts.transform) p = opts.transform->apply(p);
        last_name = i < opts.residue_names.size() && !opts.residue_names[i].empty() ? opts.residue_names[i] : "GLY";
        const int seq = static_cast<int>(i + 1);
        out += format_ca_atom(seq, last_name, opts.chain_id, seq, p);
        out += '\n';
    }
    if (model.size() > 0) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "TER   %5d      %3.3s %c%4d", static_cast<int>(model.size() + 1),
                      last_name.c_str(), opts.chain_id, static_cast<int>(model.size()));
        out += buf;
        out += '\n';
    }
    out += "END\n";
    return out;
}

}  // namespace latrefine
