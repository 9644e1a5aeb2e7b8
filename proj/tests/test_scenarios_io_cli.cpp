#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "multiflow/cli.hpp"
#include "multiflow/diagnostics.hpp"
#include "multiflow/errors.hpp"
#include "multiflow/scenarios.hpp"
#include "multiflow/snapshot.hpp"
#include "multiflow/spectral.hpp"

using namespace multiflow;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
    fs::path p = fs::temp_directory_path() / "multiflow_unit";
    fs::create_directories(p);
    return p;
}

std::string write_file(const std::string& name, const std::string& content) {
    fs::path p = workdir() / name;
    std::ofstream out(p, std::ios::trunc);
    out << content;
    out.close();
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args) {
    std::vector<const char*> argv;
    argv.push_back("multiflow");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

bool states_identical(const FlowState& a, const FlowState& b) {
    if (a.n() != b.n() || a.grid() != b.grid()) return false;
    for (int i = 0; i < a.n(); ++i) {
        for (std::size_t j = 0; j < a.grid().size(); ++j)
            if (a.rho.rho[i][j] != b.rho.rho[i][j]) return false;
        for (int c = 0; c < a.grid().dim(); ++c)
            for (std::size_t j = 0; j < a.grid().size(); ++j)
                if (a.u.u[i][c][j] != b.u.u[i][c][j]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("config files parse, resolve defaults, and reject bad input") {
    SUBCASE("a minimal file resolves scenario defaults") {
        std::string p = write_file("ok.cfg",
                                   "# comment line\n"
                                   "scenario = \"taylor_green\"  # trailing comment\n"
                                   "N = 32\n"
                                   "dt = 0.002\n"
                                   "T = 0.25\n");
        ScenarioConfig cfg = load_config(p);
        CHECK(cfg.scenario == "taylor_green");
        CHECK(cfg.N == 32);
        CHECK(cfg.dt == doctest::Approx(0.002));
        CHECK(cfg.dim == 2);
        CHECK(cfg.phases == 1);
        CHECK(cfg.weights == "unit");
        CHECK(cfg.seed == 12345);
    }

    SUBCASE("continuum defaults to a one-dimensional trapezoid family") {
        ScenarioConfig cfg = default_config("continuum");
        CHECK(cfg.dim == 1);
        CHECK(cfg.phases == 8);
        CHECK(cfg.weights == "trapezoid");
    }

    SUBCASE("negative dt is rejected by field name") {
        std::string p = write_file("bad_dt.cfg", "scenario = \"taylor_green\"\ndt = -1.0\n");
        CHECK_THROWS_WITH_AS(load_config(p), doctest::Contains("dt"), ConfigError);
    }

    SUBCASE("unknown keys are rejected with their line number") {
        std::string p = write_file("bad_key.cfg", "scenario = \"taylor_green\"\nviscosity = 0.1\n");
        CHECK_THROWS_WITH_AS(load_config(p), doctest::Contains("unknown key 'viscosity'"),
                             ConfigError);
        CHECK_THROWS_WITH_AS(load_config(p), doctest::Contains(":2:"), ConfigError);
    }

    SUBCASE("sections, duplicates, and malformed lines are rejected") {
        std::string s = write_file("sect.cfg", "[sim]\nscenario = \"taylor_green\"\n");
        CHECK_THROWS_WITH_AS(load_config(s), doctest::Contains("sections"), ConfigError);
        std::string d = write_file("dup.cfg", "scenario = \"taylor_green\"\nN = 32\nN = 64\n");
        CHECK_THROWS_WITH_AS(load_config(d), doctest::Contains("duplicate key 'N'"), ConfigError);
        std::string m = write_file("noeq.cfg", "scenario\n");
        CHECK_THROWS_WITH_AS(load_config(m), doctest::Contains("key = value"), ConfigError);
        std::string e = write_file("empty.cfg", "N = 32\n");
        CHECK_THROWS_WITH_AS(load_config(e), doctest::Contains("scenario"), ConfigError);
    }

    SUBCASE("grid size must be a power of two of at least 16") {
        std::string p = write_file("bad_n.cfg", "scenario = \"taylor_green\"\nN = 48\n");
        CHECK_THROWS_WITH_AS(load_config(p), doctest::Contains("N:"), ConfigError);
        ScenarioConfig cfg = default_config("taylor_green");
        cfg.N = 8;
        CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
    }

    SUBCASE("scenario names are validated") {
        CHECK_THROWS_WITH_AS(default_config("vortex_sheet"), doctest::Contains("unknown scenario"),
                             ConfigError);
        ScenarioConfig cfg = default_config("taylor_green");
        cfg.phases = 3;
        CHECK_THROWS_WITH_AS(resolve_config(cfg), doctest::Contains("phases"), ConfigError);
        ScenarioConfig cfg2 = default_config("one_d_two_phase");
        cfg2.dim = 2;
        CHECK_THROWS_WITH_AS(resolve_config(cfg2), doctest::Contains("dim"), ConfigError);
    }

    SUBCASE("quoted values keep embedded comment characters") {
        std::string p = write_file(
            "quoted.cfg", "scenario = \"taylor_green\"\nout_dir = \"runs#1\"\n");
        ScenarioConfig cfg = load_config(p);
        CHECK(cfg.out_dir == "runs#1");
    }
}

TEST_CASE("every built-in scenario produces a valid state") {
    for (const char* name : {"taylor_green", "equal_velocity", "two_phase_shear",
                             "one_d_two_phase", "continuum", "potential"}) {
        CAPTURE(name);
        ScenarioConfig cfg = default_config(name);
        cfg.N = 32;
        FlowState s = build_scenario(cfg);
        CHECK(validate(s.rho).pass);
        CHECK(validate(s.u, s.rho).pass);
        CHECK(s.t == 0.0);
    }
}

TEST_CASE("scenario construction is deterministic") {
    ScenarioConfig cfg = default_config("two_phase_shear");
    cfg.N = 32;
    FlowState a = build_scenario(cfg);
    FlowState b = build_scenario(cfg);
    CHECK(states_identical(a, b));
}

TEST_CASE("the vortex array scenario has the hand-computed energy") {
    FlowState s = build_scenario(default_config("taylor_green"));
    double pi = kTwoPi / 2.0;
    CHECK(kinetic_energy(s.u, s.rho) == doctest::Approx(pi * pi).epsilon(1e-12));
}

TEST_CASE("the equal-velocity scenario shares one velocity across phases") {
    ScenarioConfig cfg = default_config("equal_velocity");
    FlowState s = build_scenario(cfg);
    REQUIRE(s.n() == 2);
    for (int c = 0; c < 2; ++c) {
        ScalarField d = s.u.u[0][c];
        d -= s.u.u[1][c];
        CHECK(max_abs(d) <= 1e-13);
    }
    CHECK(constraint_residual_l2(s.rho, s.u.u) <= 1e-10);
}

TEST_CASE("the potential scenario stays curl-free in two dimensions") {
    ScenarioConfig cfg = default_config("potential");
    cfg.dim = 2;
    cfg.phases = 3;
    FlowState s = build_scenario(cfg);
    for (int i = 0; i < s.n(); ++i) CHECK(norm_l2(curl2d(s.u.u[i])) <= 1e-9);
}

TEST_CASE("the continuum scenario refines in the label without moving the fields") {
    // The per-phase profiles depend only on each node's label, so the
    // m = 8 family embeds inside the m = 15 family at shared labels
    // (trapezoid nodes at k/7 appear in both).
    ScenarioConfig c8 = default_config("continuum");
    c8.phases = 8;
    ScenarioConfig c15 = default_config("continuum");
    c15.phases = 15;
    FlowState s8 = build_scenario(c8);
    FlowState s15 = build_scenario(c15);

    // Node k of the coarse family has label k/7, which is node 2k of
    // the fine family.
    for (int k = 0; k < 8; ++k) {
        CAPTURE(k);
        CHECK(s8.rho.quad.labels()[static_cast<std::size_t>(k)] ==
              doctest::Approx(s15.rho.quad.labels()[static_cast<std::size_t>(2 * k)])
                  .epsilon(1e-12));
        ScalarField d = s8.rho.rho[k];
        d -= s15.rho.rho[2 * k];
        // Densities differ only through the weighted-mean correction of
        // the label profile, which shrinks with the node count.
        CHECK(max_abs(d) <= 0.05);
    }
    CHECK(validate(s15.rho).pass);
    CHECK(validate(s15.u, s15.rho).pass);
}

TEST_CASE("snapshots round-trip bit-exactly") {
    ScenarioConfig cfg = default_config("two_phase_shear");
    cfg.N = 32;
    FlowState s = build_scenario(cfg);
    std::string path = (workdir() / "state.bin").string();
    write_snapshot(s, path);
    FlowState r = read_snapshot(path);

    CHECK(states_identical(s, r));
    CHECK(r.t == 0.0);
    CHECK(r.rho.quad.weights() == s.rho.quad.weights());
    CHECK(r.rho.quad.masses() == s.rho.quad.masses());
    CHECK(validate(r.rho).pass);
    CHECK(validate(r.u, r.rho).pass);

    // Labels are not stored; the reader assigns 0..n-1.
    CHECK(r.rho.quad.labels()[0] == 0.0);
    CHECK(r.rho.quad.labels()[1] == 1.0);
}

TEST_CASE("snapshot reader rejects damaged files") {
    ScenarioConfig cfg = default_config("one_d_two_phase");
    cfg.N = 32;
    FlowState s = build_scenario(cfg);
    std::string path = (workdir() / "damage.bin").string();
    write_snapshot(s, path);
    std::string bytes = slurp(path);

    SUBCASE("truncation") {
        std::string cut = bytes.substr(0, bytes.size() / 2);
        std::string p = write_file("trunc.bin", cut);
        CHECK_THROWS_WITH_AS(read_snapshot(p), doctest::Contains("truncated"), SnapshotError);
    }

    SUBCASE("bad magic") {
        std::string forged = bytes;
        forged[0] = 'X';
        std::string p = write_file("magic.bin", forged);
        CHECK_THROWS_WITH_AS(read_snapshot(p), doctest::Contains("magic"), SnapshotError);
    }

    SUBCASE("trailing bytes") {
        std::string padded = bytes + "zz";
        std::string p = write_file("trail.bin", padded);
        CHECK_THROWS_WITH_AS(read_snapshot(p), doctest::Contains("trailing"), SnapshotError);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_snapshot((workdir() / "no_such.bin").string()), SnapshotError);
    }
}

TEST_CASE("diagnostics files use round-trippable decimals") {
    CHECK(format_double(0.1) == "0.1");
    double v = 1.0 / 3.0;
    CHECK(std::stod(format_double(v)) == v);
    double tiny = 1.2345678901234567e-13;
    CHECK(std::stod(format_double(tiny)) == tiny);

    std::string path = (workdir() / "diag.csv").string();
    {
        DiagnosticsWriter w(path, 2);
        DiagnosticsRow row;
        row.t = 0.25;
        row.energy = v;
        row.mass = {1.0, 2.0};
        row.kelvin = {0.0, 0.0};
        row.enstrophy = {3.0, 4.0};
        w.write(row);

        DiagnosticsRow bad;
        bad.mass = {1.0};
        bad.kelvin = {0.0, 0.0};
        bad.enstrophy = {0.0, 0.0};
        CHECK_THROWS_AS(w.write(bad), StructuralError);
    }
    std::string text = slurp(path);
    CHECK(text.rfind("t,H,mass_1,mass_2,constraint_inf,div_l2,kelvin_1,kelvin_2,"
                     "enstrophy_1,enstrophy_2\n", 0) == 0);
    CHECK(text.find(format_double(v)) != std::string::npos);
}

TEST_CASE("cli run produces diagnostics and snapshots") {
    fs::path out = workdir() / "run_out";
    fs::remove_all(out);
    std::string cfg = write_file("run.cfg",
                                 "scenario = \"taylor_green\"\n"
                                 "N = 32\n"
                                 "dt = 0.001\n"
                                 "T = 0.01\n"
                                 "snapshot_stride = 5\n");
    int rc = cli({"run", "--config", cfg, "--out", out.string(), "--quiet"});
    CHECK(rc == 0);

    CHECK(fs::exists(out / "snapshot_000000.bin"));
    CHECK(fs::exists(out / "snapshot_000005.bin"));
    CHECK(fs::exists(out / "snapshot_000010.bin"));

    std::ifstream diag((out / "diagnostics.csv").string());
    std::string line;
    REQUIRE(std::getline(diag, line));
    CHECK(line.rfind("t,H,", 0) == 0);
    double prev_t = -1.0;
    int rows = 0;
    while (std::getline(diag, line)) {
        double t = std::stod(line.substr(0, line.find(',')));
        CHECK(t > prev_t);
        prev_t = t;
        ++rows;
    }
    CHECK(rows == 3);
    CHECK(prev_t == doctest::Approx(0.01));

    FlowState end = read_snapshot((out / "snapshot_000010.bin").string());
    CHECK(validate(end.rho).pass);
    CHECK(validate(end.u, end.rho).pass);
}

TEST_CASE("cli runs are reproducible byte for byte") {
    std::string cfg = write_file("repro.cfg",
                                 "scenario = \"two_phase_shear\"\n"
                                 "N = 32\n"
                                 "dt = 0.001\n"
                                 "T = 0.005\n");
    fs::path out1 = workdir() / "repro1";
    fs::path out2 = workdir() / "repro2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    CHECK(cli({"run", "--config", cfg, "--out", out1.string(), "--quiet"}) == 0);
    CHECK(cli({"run", "--config", cfg, "--out", out2.string(), "--quiet"}) == 0);
    CHECK(slurp((out1 / "diagnostics.csv").string()) == slurp((out2 / "diagnostics.csv").string()));
    CHECK(slurp((out1 / "snapshot_000005.bin").string()) ==
          slurp((out2 / "snapshot_000005.bin").string()));
}

TEST_CASE("cli check validates scenarios and snapshots") {
    CHECK(cli({"check", "--scenario", "equal_velocity", "--quiet"}) == 0);

    ScenarioConfig cfg = default_config("one_d_two_phase");
    cfg.N = 32;
    FlowState s = build_scenario(cfg);
    std::string good = (workdir() / "check_good.bin").string();
    write_snapshot(s, good);
    CHECK(cli({"check", "--snapshot", good, "--quiet"}) == 0);

    // Corrupting one density value breaks the pointwise sum law.
    s.rho.rho[0][5] += 0.25;
    std::string bad = (workdir() / "check_bad.bin").string();
    write_snapshot(s, bad);
    CHECK(cli({"check", "--snapshot", bad, "--quiet"}) == 1);
}

TEST_CASE("cli maps failures to distinct exit codes") {
    // Unparseable command line.
    CHECK(cli({"frobnicate"}) == 1);
    CHECK(cli({"run"}) == 1);  // neither --config nor --scenario

    // Bad configuration file.
    std::string bad = write_file("bad.cfg", "scenario = \"taylor_green\"\ndt = 0\n");
    CHECK(cli({"run", "--config", bad, "--quiet"}) == 1);

    // Numerical failure: a step far beyond the advective CFL bound.
    std::string cfl = write_file("cfl.cfg",
                                 "scenario = \"taylor_green\"\n"
                                 "N = 32\n"
                                 "dt = 1.0\n"
                                 "T = 2.0\n");
    fs::path out = workdir() / "cfl_out";
    fs::remove_all(out);
    CHECK(cli({"run", "--config", cfl, "--out", out.string(), "--quiet"}) == 2);
}

TEST_CASE("cli help succeeds") {
    CHECK(cli({"--help"}) == 0);
    CHECK(cli({"run", "--help"}) == 0);
}

TEST_CASE("cli bracket-test passes its identity suite") {
    CHECK(cli({"bracket-test", "--cases", "2", "--quiet"}) == 0);
}

TEST_CASE("cli metric writes potentials") {
    fs::path out = workdir() / "metric_out";
    fs::remove_all(out);
    CHECK(cli({"metric", "--scenario", "one_d_two_phase", "--out", out.string(), "--quiet"}) == 0);
    std::string text = slurp((out / "metric_potentials.csv").string());
    CHECK(text.rfind("x,f_1,f_2\n", 0) == 0);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 65);  // header + one row per node
}

TEST_CASE("cli convergence emits both study files") {
    // Coarse steps keep the truncation error above the roundoff floor;
    // the step must still clear the CFL guard on the doubled grid of the
    // resolution study.
    std::string cfg = write_file("conv.cfg",
                                 "scenario = \"two_phase_shear\"\n"
                                 "N = 32\n"
                                 "dt = 0.008\n"
                                 "T = 0.1\n");
    fs::path out = workdir() / "conv_out";
    fs::remove_all(out);
    CHECK(cli({"convergence", "--config", cfg, "--out", out.string(), "--quiet"}) == 0);

    std::string dt_csv = slurp((out / "convergence_dt.csv").string());
    CHECK(dt_csv.rfind("dt,error_u,error_rho,order_u,order_rho\n", 0) == 0);
    int rows = -1;
    for (char c : dt_csv)
        if (c == '\n') ++rows;
    CHECK(rows == 3);

    // The finest step-size level must report roughly fourth order.
    std::istringstream in(dt_csv);
    std::string line, last;
    std::getline(in, line);
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    std::vector<double> cols;
    std::istringstream ls(last);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(std::stod(cell));
    REQUIRE(cols.size() == 5);
    CHECK(cols[3] >= 3.0);
    CHECK(cols[3] <= 5.0);

    std::string n_csv = slurp((out / "convergence_N.csv").string());
    CHECK(n_csv.rfind("N,error_u,error_rho\n", 0) == 0);
}
