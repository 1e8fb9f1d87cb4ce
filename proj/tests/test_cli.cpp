#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <json.hpp>
#include <regex>
#include <sstream>

#include "latrefine/cli.hpp"
#include "latrefine/metrics.hpp"
#include "latrefine/structure_io.hpp"
#include "support/oracles.hpp"
#include "support/report_reader.hpp"

using namespace latrefine;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(LATREFINE_TEST_DATA) + "/" + name; }

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "latrefine_cli_tests";
    fs::create_directories(dir);
    const auto p = dir / name;
    fs::remove(p);
    return p;
}

std::vector<double> values(const std::string& text, const std::string& label) {
    std::vector<double> v;
    const std::regex re(label + ": ([0-9.]+)");
    for (std::sregex_iterator it(text.begin(), text.end(), re), end; it != end; ++it) v.push_back(std::stod((*it)[1]));
    return v;
}

std::string three_residue_pdb() {
    return "ATOM      1  CA  MET A   1       0.000   0.000   0.000  1.00  0.00           C\n"
           "ATOM      2  CA  ALA A   2       3.800   0.000   0.000  1.00  0.00           C\n"
           "ATOM      3  CA  GLY A   3       5.000   3.600   0.000  1.00  0.00           C\n"
           "END\n";
}

}  // namespace

TEST_CASE("fit a three residue structure", "[cli]") {
    const auto in = scratch("three.pdb");
    write_text_file(in.string(), three_residue_pdb());
    const auto out = scratch("three_model.pdb");
    const auto r = run({"fit", "--pdb", in.string(), "--out-model", out.string()});
    REQUIRE(r.code == 0);
    CHECK(values(r.out, "dRMSD").size() == 1);
    CHECK(values(r.out, "cRMSD").size() == 1);
    const auto model = load_lattice_model(read_text_file(out.string()), LatticeSpec::fcc());
    CHECK(model.size() == 3);
    CHECK(model.is_saw());
}

TEST_CASE("fit then eval agree", "[cli]") {
    const auto out = scratch("s52_model.pdb");
    const auto fit = run({"fit", "--pdb", data("synthetic52.pdb"), "--out-model", out.string()});
    REQUIRE(fit.code == 0);
    const auto eval = run({"eval", "--pdb", data("synthetic52.pdb"), "--model", out.string()});
    REQUIRE(eval.code == 0);
    const auto a = values(fit.out, "dRMSD"), b = values(eval.out, "dRMSD");
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(std::abs(a[0] - b[0]) <= 1e-2);

    const auto model = load_lattice_model(read_text_file(out.string()), LatticeSpec::fcc());
    const auto trace = parse_ca_trace(read_text_file(data("synthetic52.pdb")));
    char buf[32];
    std::snprintf(buf, sizeof buf, "dRMSD: %.4f", oracle::drmsd(oracle::fcc_coords(model.points), trace.coords));
    CHECK(eval.out.find(buf) != std::string::npos);
}

TEST_CASE("eval of a file against itself is zero", "[cli]") {
    const auto r = run({"eval", "--pdb", data("synthetic20.pdb"), "--model", data("synthetic20.pdb"),
                        "--no-lattice-check"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("dRMSD: 0.0000") != std::string::npos);
    CHECK(r.out.find("cRMSD: 0.0000") != std::string::npos);
}

TEST_CASE("eval rejects length mismatches", "[cli]") {
    const auto r = run({"eval", "--pdb", data("synthetic20.pdb"), "--model", data("synthetic52.pdb"),
                        "--no-lattice-check"});
    CHECK(r.code != 0);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("missing input fails without output", "[cli]") {
    const auto out = scratch("never.pdb");
    const auto r = run({"fit", "--pdb", "/nonexistent/input.pdb", "--out-model", out.string()});
    CHECK(r.code != 0);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("refine with K=0 leaves the model unchanged", "[cli]") {
    const auto out = scratch("k0.pdb");
    const auto r = run({"refine", "--pdb", data("synthetic20.pdb"), "--dmax", "2", "--k", "0", "--out-model",
                        out.string()});
    REQUIRE(r.code == 0);
    const auto before = values(r.out, "initial dRMSD"), after = values(r.out, "refined dRMSD");
    REQUIRE(before.size() == 1);
    REQUIRE(after.size() == 1);
    CHECK(before[0] == after[0]);
    CHECK(r.out.find("discrepancies: 0") != std::string::npos);
    CHECK(load_lattice_model(read_text_file(out.string()), LatticeSpec::fcc()).is_saw());
}

TEST_CASE("refine improves or keeps the initial model", "[cli]") {
    const auto init = scratch("init20.pdb");
    REQUIRE(run({"fit", "--pdb", data("synthetic20.pdb"), "--out-model", init.string()}).code == 0);
    const auto out = scratch("refined20.pdb");
    const auto r = run({"refine", "--pdb", data("synthetic20.pdb"), "--init-model", init.string(), "--dmax", "1",
                        "--k", "3", "--out-model", out.string()});
    REQUIRE(r.code == 0);
    const auto before = values(r.out, "initial dRMSD"), after = values(r.out, "refined dRMSD");
    REQUIRE(after.size() == 1);
    CHECK(after[0] <= before[0]);
    const auto refined = load_lattice_model(read_text_file(out.string()), LatticeSpec::fcc());
    CHECK(refined.is_saw());
    CHECK(refined.size() == 20);
}

TEST_CASE("refine rejects an initial model that is not a SAW", "[cli]") {
    LatticeModel bad{{{0, 0, 0}, {1, 1, 0}, {0, 0, 0}}, LatticeSpec::fcc()};
    const auto init = scratch("bad_init.pdb");
    write_text_file(init.string(), write_model_pdb(bad));
    const auto in = scratch("three_for_bad.pdb");
    write_text_file(in.string(), three_residue_pdb());
    const auto out = scratch("bad_out.pdb");
    const auto r = run({"refine", "--pdb", in.string(), "--init-model", init.string(), "--out-model", out.string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("3") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("bad flags are rejected", "[cli]") {
    CHECK(run({"refine", "--pdb", data("synthetic20.pdb"), "--dmax", "-1"}).code != 0);
    CHECK(run({"fit", "--pdb", data("synthetic20.pdb"), "--lattice", "hex"}).code != 0);
    CHECK(run({}).code != 0);
}

TEST_CASE("sweep 1x1 with K=0 reports the input dRMSD", "[cli]") {
    const auto prefix = scratch("sweep1");
    const auto r = run({"sweep", "--pdb", data("synthetic20.pdb"), "--dmax", "1", "--k", "0", "--out-report",
                        prefix.string()});
    REQUIRE(r.code == 0);
    const auto json = nlohmann::json::parse(read_text_file(prefix.string() + ".json"));
    REQUIRE(json["cells"].size() == 1);
    CHECK(json["cells"][0]["drmsd"].get<double>() == json["initial_drmsd"].get<double>());
    const auto blocks = report_reader::read_tsv(read_text_file(prefix.string() + ".tsv"));
    CHECK(blocks.at("drmsd").cells.size() == 1);
}

TEST_CASE("sweep 4x4 has the grid shape and is monotone", "[cli]") {
    const auto prefix = scratch("sweep4");
    const auto r = run({"sweep", "--pdb", data("synthetic20.pdb"), "--dmax", "0,1,2,3", "--k", "1,2,3,4",
                        "--strategy", "lds", "--out-report", prefix.string(), "--workers", "2", "--lds-bound"});
    REQUIRE(r.code == 0);
    const auto tsv = read_text_file(prefix.string() + ".tsv");
    const auto blocks = report_reader::read_tsv(tsv);
    const auto& d = blocks.at("drmsd");
    CHECK(d.rows == 4);
    CHECK(d.cells.size() == 16);
    CHECK(blocks.at("seconds").cells.size() == 16);

    const auto json = nlohmann::json::parse(read_text_file(prefix.string() + ".json"));
    std::map<std::pair<int, int>, double> grid;
    for (const auto& cell : json["cells"]) {
        const auto key = std::make_pair(cell["d_max"].get<int>(), cell["k"].get<int>());
        grid[key] = cell["drmsd"].get<double>();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", grid[key]);
        CHECK(d.cells.at(key) == buf);
    }
    for (int dm = 0; dm <= 3; ++dm)
        for (int k = 1; k <= 4; ++k) {
            if (dm > 0) CHECK(grid[{dm, k}] <= grid[{dm - 1, k}] + 1e-9);
            if (k > 1) CHECK(grid[{dm, k}] <= grid[{dm, k - 1}] + 1e-9);
        }
}
