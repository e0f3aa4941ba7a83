#include "perfhom/cli.hpp"

#include "perfhom/analysis.hpp"
#include "perfhom/errors.hpp"
#include "perfhom/perforated.hpp"
#include "perfhom/report_io.hpp"
#include "perfhom/strange_term.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

namespace perfhom::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    int n = 16;
    double c0 = 0.5;
    std::string eps;
    std::string eps_list;
    double f_const = 1.0;
    std::string f_file;
    double t_boundary = 10.0;
    double stop_tol = 0.0;
    int max_iter = 500;
    double rel_tol = 1e-10;
    bool jacobi = false;
    MgConfig mg{};
    bool baseline_mu0 = false;
    int jobs = 1;
    bool timings = false;
    std::string out_dir = ".";
};

void add_source_options(CLI::App* cmd, RunConfig& cfg) {
    auto* fc = cmd->add_option("--f-const", cfg.f_const, "Constant source density f")->capture_default_str();
    cmd->add_option("--f-file", cfg.f_file, "Source field CSV (full-precision field layout)")->excludes(fc);
    cmd->add_option("--t", cfg.t_boundary, "Boundary temperature T")->capture_default_str();
    cmd->add_option("--out-dir", cfg.out_dir, "Directory for output files")->capture_default_str();
    cmd->add_flag("--timings", cfg.timings, "Record wall-clock timings in JSON output");
}

void add_homogenized_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--c0", cfg.c0, "Hole-radius constant C0; mu = pi / (2 C0)")->capture_default_str();
    cmd->add_option("--stop-tol", cfg.stop_tol, "Fixed-point tolerance on delta (default 1e-10 max(1, |f|))");
    cmd->add_option("--max-iter", cfg.max_iter, "Fixed-point iteration cap")->capture_default_str();
    cmd->add_option("--pre-smooth", cfg.mg.pre_smooth, "Multigrid pre-smoothing sweeps")->capture_default_str();
    cmd->add_option("--post-smooth", cfg.mg.post_smooth, "Multigrid post-smoothing sweeps")->capture_default_str();
    cmd->add_option("--max-cycles", cfg.mg.max_cycles, "Multigrid V-cycle cap")->capture_default_str();
    cmd->add_option("--mg-tol", cfg.mg.target_residual_linf, "Multigrid residual target")->capture_default_str();
    cmd->add_option("--coarsest-n", cfg.mg.coarsest_n, "Coarsest multigrid grid")->capture_default_str();
}

void add_cg_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--rel-tol", cfg.rel_tol, "CG relative residual tolerance")->capture_default_str();
    cmd->add_flag("--jacobi", cfg.jacobi, "Jacobi-preconditioned CG");
}

void require_power_of_two(int n) {
    if (!is_power_of_two(n) || n < 2)
        throw InvalidConfig("--n must be a power of two >= 2, got " + std::to_string(n));
}

void validate_common(const RunConfig& cfg) {
    if (!(cfg.c0 > 0.0)) throw InvalidConfig("--c0 must be > 0");
    if (!std::isfinite(cfg.t_boundary)) throw InvalidConfig("--t must be finite");
    if (!std::isfinite(cfg.f_const)) throw InvalidConfig("--f-const must be finite");
    if (cfg.stop_tol < 0.0) throw InvalidConfig("--stop-tol must be > 0");
    if (!(cfg.rel_tol > 0.0)) throw InvalidConfig("--rel-tol must be > 0");
    if (cfg.max_iter < 1) throw InvalidConfig("--max-iter must be >= 1");
    if (cfg.jobs < 1) throw InvalidConfig("--jobs must be >= 1");
    cfg.mg.validate();
}

ScalarField load_source(const RunConfig& cfg, const Grid2D& grid) {
    if (cfg.f_file.empty()) return ScalarField(grid, cfg.f_const);
    ScalarField f = io::read_field_csv(cfg.f_file);
    if (!(f.grid() == grid))
        throw InvalidConfig("--f-file grid has n=" + std::to_string(f.grid().n()) + ", expected " +
                            std::to_string(grid.n()));
    return f;
}

SolverTolerances tolerances(const RunConfig& cfg) {
    return SolverTolerances{cfg.mg, cfg.stop_tol, cfg.max_iter, cfg.rel_tol, cfg.jacobi};
}

json source_json(const RunConfig& cfg) {
    if (cfg.f_file.empty()) return {{"f_const", cfg.f_const}};
    return {{"f_file", cfg.f_file}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int solve_homogenized(const RunConfig& cfg) {
    validate_common(cfg);
    require_power_of_two(cfg.n);
    const Grid2D grid(cfg.n);
    const ScalarField f = load_source(cfg, grid);
    const HomogenizedProblem problem(cfg.c0, cfg.t_boundary, f);
    const double stop_tol = cfg.stop_tol > 0.0 ? cfg.stop_tol : default_stop_tol(f);

    const auto start = std::chrono::steady_clock::now();
    const FixedPointResult fp = fixed_point_solve(problem, cfg.mg, stop_tol, cfg.max_iter);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const ScalarField u = assemble_temperature(fp.g, cfg.t_boundary);

    const fs::path dir(cfg.out_dir);
    io::write_file_atomic(dir / "table.csv", io::table_csv_rounded(u));
    io::write_file_atomic(dir / "field.csv", io::field_csv_full(u));
    io::write_file_atomic(dir / "trace.csv", io::trace_csv(fp.trace));
    json meta = {{"version", io::kVersion},
                 {"command", "solve-homogenized"},
                 {"config",
                  {{"n", cfg.n},
                   {"c0", cfg.c0},
                   {"t_boundary", cfg.t_boundary},
                   {"source", source_json(cfg)},
                   {"stop_tol", stop_tol},
                   {"max_iter", cfg.max_iter},
                   {"mg",
                    {{"pre_smooth", cfg.mg.pre_smooth},
                     {"post_smooth", cfg.mg.post_smooth},
                     {"max_cycles", cfg.mg.max_cycles},
                     {"target_residual_linf", cfg.mg.target_residual_linf},
                     {"coarsest_n", cfg.mg.coarsest_n}}}}},
                 {"mu", problem.mu()},
                 {"lambda1_h", smallest_laplacian_eigenvalue(grid)},
                 {"trace", io::trace_json(fp.trace)},
                 {"center_temperature", u(cfg.n / 2, cfg.n / 2)}};
    if (cfg.timings) meta["runtime_seconds"] = seconds;
    io::write_file_atomic(dir / "metadata.json", dump(meta));
    std::printf("solve-homogenized: n=%d mu=%.17g iterations=%d U(center)=%.17g\n", cfg.n, problem.mu(),
                fp.trace.iterations, u(cfg.n / 2, cfg.n / 2));
    return kExitOk;
}

int solve_perforated_cmd(const RunConfig& cfg) {
    validate_common(cfg);
    if (cfg.eps.empty()) throw InvalidConfig("--eps is required (for example --eps 1/3)");
    const int m = parse_reciprocal_fraction(cfg.eps);
    const Grid2D grid(cfg.n);
    const ScalarField f = load_source(cfg, grid);
    const PerforationSpec spec = PerforationSpec::lattice(m, cfg.c0);
    const DomainMask mask = build_mask(spec, grid);

    const auto start = std::chrono::steady_clock::now();
    CgReport cg;
    const ScalarField u = solve_on_mask(mask, f, cfg.t_boundary, PerforatedOptions{cfg.rel_tol, cfg.jacobi}, &cg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir(cfg.out_dir);
    io::write_file_atomic(dir / "solution.csv", io::field_csv_full(u));
    json meta = {{"version", io::kVersion},
                 {"command", "solve-perforated"},
                 {"config",
                  {{"n", cfg.n},
                   {"eps", cfg.eps},
                   {"c0", cfg.c0},
                   {"t_boundary", cfg.t_boundary},
                   {"source", source_json(cfg)},
                   {"rel_tol", cfg.rel_tol},
                   {"jacobi", cfg.jacobi}}},
                 {"epsilon", spec.epsilon()},
                 {"radius", spec.radius()},
                 {"hole_count", spec.hole_count()},
                 {"hole_nodes", mask.count(NodeClass::HoleDirichlet)},
                 {"active_nodes", mask.count(NodeClass::Active)},
                 {"cg_iterations", cg.iterations},
                 {"relative_residual", cg.relative_residual},
                 {"max_temperature", norm(u, NormKind::Linf)}};
    if (cfg.timings) meta["runtime_seconds"] = seconds;
    io::write_file_atomic(dir / "metadata.json", dump(meta));
    std::printf("solve-perforated: eps=%s holes=%zu radius=%.6g cg_iterations=%d\n", cfg.eps.c_str(),
                spec.hole_count(), spec.radius(), cg.iterations);
    return kExitOk;
}

std::vector<int> parse_eps_list(const std::string& text) {
    std::vector<int> cells;
    std::stringstream ss(text);
    std::string item;
    if (text.find_first_not_of(" \t") == std::string::npos) throw InvalidConfig("--eps-list is empty");
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw InvalidConfig("--eps-list has an empty entry: '" + text + "'");
        cells.push_back(parse_reciprocal_fraction(item));
    }
    if (cells.empty() || text.back() == ',') throw InvalidConfig("--eps-list has an empty entry: '" + text + "'");
    return cells;
}

int compare_cmd(const RunConfig& cfg) {
    validate_common(cfg);
    require_power_of_two(cfg.n);
    SweepConfig sweep;
    sweep.cells_per_side = parse_eps_list(cfg.eps_list);
    sweep.c0 = cfg.c0;
    sweep.n = cfg.n;
    sweep.t_boundary = cfg.t_boundary;
    sweep.tol = tolerances(cfg);
    sweep.baseline_mu0 = cfg.baseline_mu0;
    sweep.jobs = cfg.jobs;
    const Grid2D grid(cfg.n);
    const ScalarField f = load_source(cfg, grid);

    const SweepResult result = run_sweep(sweep, f);

    const fs::path dir(cfg.out_dir);
    json j = io::sweep_json(result, sweep, cfg.timings);
    j["config"]["source"] = source_json(cfg);
    io::write_file_atomic(dir / "homogenized.csv", io::field_csv_full(result.homogenized));
    if (result.baseline_mu0) io::write_file_atomic(dir / "baseline_mu0.csv", io::field_csv_full(*result.baseline_mu0));
    for (const auto& r : result.records) {
        if (!r.ok) continue;
        io::write_file_atomic(dir / ("perforated_eps_1_" + std::to_string(r.cells_per_side) + ".csv"),
                              io::field_csv_full(*r.extended));
    }
    io::write_file_atomic(dir / "sweep.json", dump(j));
    for (const auto& r : result.records) {
        if (r.ok)
            std::printf("compare: eps=1/%d holes=%zu L2H=%.6e LINF=%.6e\n", r.cells_per_side, r.hole_count,
                        r.discrepancy_l2h, r.discrepancy_linf);
        else
            std::printf("compare: eps=1/%d failed: %s\n", r.cells_per_side, r.error.c_str());
    }
    return kExitOk;
}

int reproduce_table1_cmd(const RunConfig& cfg) {
    validate_common(cfg);
    const TableReproduction rep = reproduce_table1(tolerances(cfg));
    const fs::path dir(cfg.out_dir);
    io::write_file_atomic(dir / "table1.csv", io::table_csv_rounded(rep.temperature));
    io::write_file_atomic(dir / "table1_full.csv", io::field_csv_full(rep.temperature));
    io::write_file_atomic(dir / "trace.csv", io::trace_csv(rep.trace));
    json report = {{"version", io::kVersion},
                   {"preset", {{"n", kTableN}, {"c0", 0.5}, {"mu", mu_from_c0(0.5)}, {"f_const", 1.0}, {"t_boundary", 10.0}}},
                   {"trace", io::trace_json(rep.trace)},
                   {"checks", io::table_checks_json(rep.checks)},
                   {"deviation_from_published_linf", deviation_from_published(rep.temperature)}};
    io::write_file_atomic(dir / "table1_report.json", dump(report));
    std::fputs(io::table_text(rep.rounded).c_str(), stdout);
    std::printf("structure: %s\n", rep.checks.all() ? "ok" : "FAILED");
    for (const auto& msg : rep.checks.messages) std::printf("  %s\n", msg.c_str());
    return kExitOk;
}

int calibrate_cmd(const RunConfig& cfg) {
    validate_common(cfg);
    const CalibrationReport rep = calibrate_convention(tolerances(cfg));
    io::write_file_atomic(fs::path(cfg.out_dir) / "calibration.json", dump(io::calibration_json(rep)));
    for (const auto& c : rep.conventions)
        std::printf("%-14s %-12s U(8,8)=%.6f  linf_dev=%.6f  center_dev=%.6f\n", c.name.c_str(), c.method.c_str(),
                    c.center_value, c.linf_deviation, c.center_deviation);
    std::printf("best: %s (%s)\n", rep.best.c_str(),
                rep.best_beats_default ? "closer than the unit-square default" : "no candidate beats the default");
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"Perforated-plate homogenization suite"};
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
    app.require_subcommand(1);

    auto* homog = app.add_subcommand("solve-homogenized", "Fixed-point multigrid solve of the limit problem");
    homog->add_option("--n", cfg.n, "Cells per side (power of two)")->capture_default_str();
    add_source_options(homog, cfg);
    add_homogenized_options(homog, cfg);

    auto* perf = app.add_subcommand("solve-perforated", "Direct solve on the perforated plate");
    perf->add_option("--n", cfg.n, "Cells per side [256]");
    perf->add_option("--eps", cfg.eps, "Period as a fraction 1/m")->required();
    perf->add_option("--c0", cfg.c0, "Hole-radius constant C0")->capture_default_str();
    add_source_options(perf, cfg);
    add_cg_options(perf, cfg);

    auto* cmp = app.add_subcommand("compare", "Sweep eps and compare perforated vs homogenized solutions");
    cmp->add_option("--n", cfg.n, "Cells per side, power of two [1024]");
    cmp->add_option("--eps-list", cfg.eps_list, "Comma-separated periods, e.g. 1/2,1/3")->required();
    cmp->add_flag("--baseline-mu0", cfg.baseline_mu0, "Also compare against the mu = 0 solution");
    cmp->add_option("--jobs", cfg.jobs, "Concurrent eps entries")->capture_default_str();
    add_source_options(cmp, cfg);
    add_homogenized_options(cmp, cfg);
    add_cg_options(cmp, cfg);

    auto* table = app.add_subcommand("reproduce-table1", "16x16 table preset (mu = pi, f = 1, T = 10)");
    table->add_option("--out-dir", cfg.out_dir, "Directory for output files")->capture_default_str();
    table->add_option("--stop-tol", cfg.stop_tol, "Fixed-point tolerance on delta");

    auto* calib = app.add_subcommand("calibrate", "Compare unit conventions against the published table");
    calib->add_option("--out-dir", cfg.out_dir, "Directory for output files")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalidConfig;
    }
    // Solve-perforated and compare default to finer grids than the table preset.
    if (perf->parsed() && perf->count("--n") == 0) cfg.n = 256;
    if (cmp->parsed() && cmp->count("--n") == 0) cfg.n = 1024;

    try {
        if (homog->parsed()) return solve_homogenized(cfg);
        if (perf->parsed()) return solve_perforated_cmd(cfg);
        if (cmp->parsed()) return compare_cmd(cfg);
        if (table->parsed()) return reproduce_table1_cmd(cfg);
        if (calib->parsed()) return calibrate_cmd(cfg);
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNonConvergence;
    } catch (const GeometryError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitGeometry;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalidConfig;
    }
    return kExitInvalidConfig;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

} // namespace perfhom::cli
