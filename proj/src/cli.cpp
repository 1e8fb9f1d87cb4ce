#include "latrefine/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <thread>

#include "latrefine/chain_growth.hpp"
#include "latrefine/errors.hpp"
#include "latrefine/metrics.hpp"
#include "latrefine/refine.hpp"
#include "latrefine/structure_io.hpp"

namespace latrefine {

namespace {

struct CommonOptions {
    std::string pdb;
    std::string chain;
    int model_index = 1;
    std::string lattice = "fcc";
    std::size_t beam = kDefaultBeamWidth;
    bool permissive_gaps = false;
    std::string id;
};

struct RefineOptions {
    std::string init_model;
    std::string strategy = "lds";
    double time_limit = 0.0;
    bool full_ac = false;
    bool no_bound = false;
    bool lds_bound = false;
};

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

LatticeSpec lattice_from(const std::string& name) {
    const auto kind = parse_lattice_kind(name);
    if (!kind) throw ArgumentError("unknown lattice '" + name + "'");
    return LatticeSpec(*kind);
}

struct Loaded {
    CaTrace trace;
    LatticeSpec spec;
};

Loaded load_trace(const CommonOptions& c, std::ostream& err) {
    TraceOptions opts;
    opts.chain = c.chain;
    opts.model_index = c.model_index;
    opts.permissive_gaps = c.permissive_gaps;
    auto parsed = parse_ca_trace_detailed(read_text_file(c.pdb), opts);
    for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
    parsed.trace.id = c.id.empty() ? std::filesystem::path(c.pdb).stem().string() : c.id;
    return {std::move(parsed.trace), lattice_from(c.lattice)};
}

void add_common(CLI::App* cmd, CommonOptions& c, bool with_beam = true) {
    cmd->add_option("--pdb", c.pdb, "Input structure (PDB format)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--chain", c.chain, "Chain id (default: first chain)");
    cmd->add_option("--model-index", c.model_index, "MODEL to read, 1-based")->check(CLI::PositiveNumber);
    cmd->add_option("--lattice", c.lattice, "Lattice: cubic or fcc")->check(CLI::IsMember({"cubic", "fcc"}));
    if (with_beam) cmd->add_option("--beam", c.beam, "Chain-growth beam width")->check(CLI::PositiveNumber);
    cmd->add_flag("--permissive-gaps", c.permissive_gaps, "Truncate at a chain break instead of failing");
    cmd->add_option("--id", c.id, "Protein id for reports (default: file stem)");
}

void add_refine(CLI::App* cmd, RefineOptions& r) {
    cmd->add_option("--init-model", r.init_model, "Initial lattice model (CA-only PDB); default: greedy fit")
        ->check(CLI::ExistingFile);
    cmd->add_option("--strategy", r.strategy, "Search: lds, bnb or brute")->check(CLI::IsMember({"lds", "bnb", "brute"}));
    cmd->add_option("--time-limit", r.time_limit, "Wall-clock limit per search in seconds (0 = none)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--full-ac", r.full_ac, "Contiguity propagation over the whole unassigned suffix");
    cmd->add_flag("--no-bound", r.no_bound, "Disable the branch-and-bound lower bound");
    cmd->add_flag("--lds-bound", r.lds_bound, "Prune LDS with the lower bound");
}

LatticeModel initial_model(const Loaded& in, const CommonOptions& c, const RefineOptions& r, std::ostream& out) {
    if (!r.init_model.empty()) {
        auto model = load_lattice_model(read_text_file(r.init_model), in.spec);
        if (model.size() != in.trace.size())
            throw ArgumentError("initial model has " + std::to_string(model.size()) + " residues, trace has " +
                                std::to_string(in.trace.size()));
        return model;
    }
    out << "initial model: greedy chain growth (beam " << c.beam << ")\n";
    return greedy_fit(in.trace, in.spec, c.beam);
}

RefineConfig make_config(const RefineOptions& r, int d_max, int k) {
    RefineConfig cfg;
    cfg.d_max = d_max;
    cfg.k = k;
    cfg.strategy = *parse_strategy(r.strategy);
    if (r.time_limit > 0.0) cfg.time_limit = r.time_limit;
    cfg.full_arc_consistency = r.full_ac;
    cfg.use_bound = !r.no_bound;
    cfg.lds_bound = r.lds_bound;
    return cfg;
}

ModelPdbOptions pdb_options(const CaTrace& trace, std::string title) {
    ModelPdbOptions o;
    o.title = std::move(title);
    o.residue_names = trace.residue_names;
    return o;
}

int cmd_fit(const CommonOptions& c, const std::string& out_model, bool superposed, std::ostream& out,
            std::ostream& err) {
    const auto in = load_trace(c, err);
    const auto model = greedy_fit(in.trace, in.spec, c.beam);
    const double d = in.trace.size() >= 2 ? drmsd(model, in.trace) : 0.0;
    const auto sup = superpose_crmsd(model, in.trace);

    if (!out_model.empty()) {
        auto opts = pdb_options(in.trace, "lattice model of " + in.trace.id);
        opts.remarks.push_back("LATTICE " + std::string(to_string(in.spec.kind())) + " BEAM " + std::to_string(c.beam));
        if (superposed) opts.transform = sup.transform;
        write_text_file(out_model, write_model_pdb(model, opts));
    }
    out << "protein: " << in.trace.id << "  residues: " << in.trace.size() << "  lattice: " << to_string(in.spec.kind())
        << '\n';
    out << "dRMSD: " << fmt4(d) << '\n';
    out << "cRMSD: " << fmt4(sup.crmsd) << '\n';
    return 0;
}

int cmd_refine(const CommonOptions& c, const RefineOptions& r, int d_max, int k, const std::string& out_model,
               std::ostream& out, std::ostream& err) {
    const auto in = load_trace(c, err);
    const auto model = initial_model(in, c, r, out);
    const auto cfg = make_config(r, d_max, k);
    const auto inst = build_cop(in.trace, model, cfg);
    const auto result = run_search(inst);

    if (!out_model.empty()) {
        auto opts = pdb_options(in.trace, "refined lattice model of " + in.trace.id);
        opts.remarks.push_back("DMAX " + std::to_string(d_max) + " K " + std::to_string(k) + " STRATEGY " + r.strategy);
        write_text_file(out_model, write_model_pdb(result.model, opts));
    }
    const double before = drmsd_from_objective(inst.initial_objective(), model.size());
    out << "protein: " << in.trace.id << "  residues: " << in.trace.size() << "  lattice: " << to_string(in.spec.kind())
        << '\n';
    out << "strategy: " << r.strategy << "  d_max: " << d_max << "  K: " << k << '\n';
    out << "initial dRMSD: " << fmt4(before) << '\n';
    out << "refined dRMSD: " << fmt4(result.drmsd) << '\n';
    out << "discrepancies: " << result.discrepancies << '\n';
    out << "nodes: " << result.stats.nodes << "  seconds: " << result.stats.elapsed_seconds
        << (result.stats.complete ? "" : "  (time limit reached, incomplete)") << '\n';
    return 0;
}

int cmd_eval(const CommonOptions& c, const std::string& model_path, bool no_lattice_check, std::ostream& out,
             std::ostream& err) {
    const auto in = load_trace(c, err);
    std::vector<Vec3> coords;
    if (no_lattice_check) {
        TraceOptions o;
        o.permissive_gaps = true;
        coords = parse_ca_trace(read_text_file(model_path), o).coords;
    } else {
        coords = load_lattice_model(read_text_file(model_path), in.spec).euclidean();
    }
    if (coords.size() != in.trace.size())
        throw ArgumentError("model has " + std::to_string(coords.size()) + " residues, trace has " +
                            std::to_string(in.trace.size()));
    out << "dRMSD: " << fmt4(coords.size() >= 2 ? drmsd(coords, in.trace.coords) : 0.0) << '\n';
    out << "cRMSD: " << fmt4(superpose(coords, in.trace.coords).crmsd) << '\n';
    return 0;
}

int cmd_sweep(const CommonOptions& c, const RefineOptions& r, std::vector<int> dmax_list, std::vector<int> k_list,
              const std::string& out_report, std::size_t workers, std::ostream& out, std::ostream& err) {
    const auto in = load_trace(c, err);
    const auto model = initial_model(in, c, r, out);

    SweepReport report;
    report.protein_id = in.trace.id;
    report.lattice = std::string(to_string(in.spec.kind()));
    report.d_max_values = dmax_list;
    report.k_values = k_list;
    {
        RefineConfig base;
        base.d_max = 0;
        report.initial_drmsd = drmsd_from_objective(build_cop(in.trace, model, base).initial_objective(), model.size());
    }
    for (int d : dmax_list)
        for (int k : k_list) {
            SweepCell cell;
            cell.d_max = d;
            cell.k = k;
            report.cells.push_back(cell);
        }

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < report.cells.size(); i = next++) {
            SweepCell& cell = report.cells[i];
            try {
                const auto cfg = make_config(r, cell.d_max, cell.k);
                const auto inst = build_cop(in.trace, model, cfg);
                const auto t0 = std::chrono::steady_clock::now();
                const auto res = run_search(inst);
                cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                cell.drmsd = res.drmsd;
                cell.improved = res.improved(inst);
                cell.complete = res.stats.complete;
                cell.discrepancies = res.discrepancies;
            } catch (const std::exception& e) {
                cell.error = e.what();
                cell.complete = false;
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, report.cells.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const auto text = write_sweep_report(report);
    if (!out_report.empty()) {
        write_text_file(out_report + ".tsv", text.tsv);
        write_text_file(out_report + ".json", text.json);
    }
    out << text.tsv;
    for (const auto& cell : report.cells)
        if (!cell.error.empty())
            err << "cell d_max=" << cell.d_max << " K=" << cell.k << " failed: " << cell.error << '\n';
    return 0;
}

}  // namespace

LatticeModel load_lattice_model(const std::string& pdb_text, const LatticeSpec& spec, double tolerance) {
    TraceOptions opts;
    opts.permissive_gaps = false;
    const auto trace = parse_ca_trace(pdb_text, opts);
    LatticeModel model{{}, spec};
    model.points.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto p = spec.snap(trace.coords[i], tolerance);
        if (!p) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "residue %zu (%.3f, %.3f, %.3f) is not within %.2f A of a %s lattice node",
                          i + 1, trace.coords[i].x, trace.coords[i].y, trace.coords[i].z, tolerance,
                          std::string(to_string(spec.kind())).c_str());
            throw LatticeError(buf);
        }
        model.points.push_back(*p);
    }
    model.validate();
    return model;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lattice fitting and constraint-based refinement of protein C-alpha traces", "latrefine"};
    app.require_subcommand(1);

    CommonOptions common;
    RefineOptions ref;
    std::string out_model;
    bool superposed = false;
    int d_max = 1;
    int k = 4;
    std::vector<int> dmax_list{0, 1, 2, 3};
    std::vector<int> k_list{1, 2, 3, 4};
    std::string out_report;
    std::size_t workers = 1;
    std::string model_path;
    bool no_lattice_check = false;

    auto* fit = app.add_subcommand("fit", "Greedy chain-growth lattice fit");
    add_common(fit, common);
    fit->add_option("--out-model", out_model, "Write the lattice model as CA-only PDB");
    fit->add_flag("--superpose", superposed, "Write the model superposed onto the trace");

    auto* refine_cmd = app.add_subcommand("refine", "Refine a lattice model");
    add_common(refine_cmd, common);
    add_refine(refine_cmd, ref);
    refine_cmd->add_option("--dmax", d_max, "Relaxation radius in lattice units")->check(CLI::NonNegativeNumber);
    refine_cmd->add_option("--k", k, "Maximum discrepancies (lds)")->check(CLI::NonNegativeNumber);
    refine_cmd->add_option("--out-model", out_model, "Write the refined model as CA-only PDB");

    auto* eval = app.add_subcommand("eval", "dRMSD/cRMSD of a model PDB against a trace");
    add_common(eval, common, false);
    eval->add_option("--model", model_path, "Model PDB")->required()->check(CLI::ExistingFile);
    eval->add_flag("--no-lattice-check", no_lattice_check, "Use model coordinates as-is");

    auto* sweep = app.add_subcommand("sweep", "Refinement over a d_max x K grid");
    add_common(sweep, common);
    add_refine(sweep, ref);
    sweep->add_option("--dmax", dmax_list, "Comma-separated d_max values")->delimiter(',')->check(CLI::NonNegativeNumber);
    sweep->add_option("--k", k_list, "Comma-separated K values")->delimiter(',')->check(CLI::NonNegativeNumber);
    sweep->add_option("--out-report", out_report, "Report path prefix (writes PREFIX.tsv and PREFIX.json)");
    sweep->add_option("--workers", workers, "Concurrent sweep cells")->check(CLI::PositiveNumber);

    std::vector<const char*> argv{"latrefine"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*fit) return cmd_fit(common, out_model, superposed, out, err);
        if (*refine_cmd) return cmd_refine(common, ref, d_max, k, out_model, out, err);
        if (*eval) return cmd_eval(common, model_path, no_lattice_check, out, err);
        if (*sweep) return cmd_sweep(common, ref, dmax_list, k_list, out_report, workers, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace latrefine
