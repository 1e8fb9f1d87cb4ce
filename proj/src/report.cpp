#include <cstdio>
#include <json.hpp>

#include "latrefine/structure_io.hpp"

namespace latrefine {

const SweepCell* SweepReport::find(int d_max, int k) const {
    for (const auto& c : cells)
        if (c.d_max == d_max && c.k == k) return &c;
    return nullptr;
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

void append_block(std::string& out, const SweepReport& r, const char* metric, bool seconds) {
    out += metric;
    out += '\n';
    out += "d_max\\K";
    for (int k : r.k_values) out += '\t' + std::to_string(k);
    out += '\n';
    for (int d : r.d_max_values) {
        out += std::to_string(d);
        for (int k : r.k_values) {
            out += '\t';
            const SweepCell* c = r.find(d, k);
            if (c == nullptr || (!seconds && !c->drmsd)) {
                out += "NA";
            } else {
                out += seconds ? fixed(c->seconds, 3) : fixed(*c->drmsd, 4);
            }
        }
        out += '\n';
    }
}

}  // namespace

SweepReportText write_sweep_report(const SweepReport& report) {
    SweepReportText text;

    text.tsv += "# protein_id\t" + report.protein_id + '\n';
    text.tsv += "# lattice\t" + report.lattice + '\n';
    text.tsv += "# initial_drmsd\t" + fixed(report.initial_drmsd, 4) + '\n';
    append_block(text.tsv, report, "drmsd", false);
    text.tsv += '\n';
    append_block(text.tsv, report, "seconds", true);

    nlohmann::ordered_json j;
    j["protein_id"] = report.protein_id;
    j["lattice"] = report.lattice;
    j["initial_drmsd"] = report.initial_drmsd;
    j["d_max"] = report.d_max_values;
    j["k"] = report.k_values;
    auto cells = nlohmann::ordered_json::array();
    for (const auto& c : report.cells) {
        nlohmann::ordered_json cell;
        cell["protein_id"] = report.protein_id;
        cell["lattice"] = report.lattice;
        cell["d_max"] = c.d_max;
        cell["k"] = c.k;
        if (c.drmsd) {
            cell["drmsd"] = *c.drmsd;
        } else {
            cell["drmsd"] = nullptr;
        }
        cell["seconds"] = c.seconds;
        cell["improved"] = c.improved;
        cell["complete"] = c.complete;
        cell["discrepancies"] = c.discrepancies;
        if (!c.error.empty()) cell["error"] = c.error;
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    text.json = j.dump(2) + '\n';
    return text;
}

}  // namespace latrefine
