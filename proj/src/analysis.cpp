#include "perfhom/analysis.hpp"

#include "perfhom/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <future>
#include <limits>
#include <numbers>
#include <vector>

namespace perfhom {

double discrepancy(const ScalarField& a, const ScalarField& b, NormKind kind) {
    return norm(field_axpy(-1.0, b, a), kind);
}

double round_half_away(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double resolved_stop_tol(const SolverTolerances& tol, const ScalarField& source) {
    return tol.stop_tol > 0.0 ? tol.stop_tol : default_stop_tol(source);
}

SweepRecord run_one(int m, const SweepConfig& config, const Grid2D& grid, const ScalarField& source,
                    const ScalarField& homogenized, const std::optional<ScalarField>& baseline) {
    SweepRecord rec;
    rec.cells_per_side = m;
    rec.epsilon = 1.0 / m;
    rec.n = config.n;
    const auto start = Clock::now();
    try {
        const PerforationSpec spec = PerforationSpec::lattice(m, config.c0);
        rec.radius = spec.radius();
        rec.hole_count = spec.hole_count();
        const DomainMask mask = build_mask(spec, grid);
        CgReport cg;
        const ScalarField u = solve_on_mask(mask, source, config.t_boundary,
                                            PerforatedOptions{config.tol.cg_rel_tol, config.tol.jacobi}, &cg);
        rec.cg_iterations = cg.iterations;
        ScalarField ext = extend_into_holes(u, mask, config.t_boundary);
        rec.discrepancy_l2h = discrepancy(ext, homogenized, NormKind::L2h);
        rec.discrepancy_linf = discrepancy(ext, homogenized, NormKind::Linf);
        rec.h1_norm_extended = norm(ext, NormKind::H1h);
        if (baseline) {
            rec.baseline_discrepancy_l2h = discrepancy(ext, *baseline, NormKind::L2h);
            rec.baseline_discrepancy_linf = discrepancy(ext, *baseline, NormKind::Linf);
        }
        rec.extended = std::move(ext);
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        rec.failure = std::current_exception();
    }
    rec.runtime_seconds = seconds_since(start);
    return rec;
}

} // namespace

SweepResult run_sweep(const SweepConfig& config, const ScalarField& source) {
    if (config.cells_per_side.empty()) throw InvalidConfig("sweep needs at least one epsilon");
    if (config.jobs < 1) throw InvalidConfig("sweep needs jobs >= 1");
    const Grid2D grid(config.n);
    if (!(source.grid() == grid)) throw ShapeError("sweep source field is not on the sweep grid");

    std::vector<int> cells = config.cells_per_side;
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());  // increasing m = decreasing eps
    for (int m : cells)
        if (m < 2) throw InvalidConfig("epsilon must be 1/m with m >= 2");

    SweepResult result{mu_from_c0(config.c0), {}, ScalarField(grid), {}, std::nullopt, 0.0};

    const auto start = Clock::now();
    const HomogenizedProblem problem(config.c0, config.t_boundary, source);
    FixedPointResult fp =
        fixed_point_solve(problem, config.tol.mg, resolved_stop_tol(config.tol, source), config.tol.max_iter);
    result.homogenized = assemble_temperature(fp.g, config.t_boundary);
    result.homogenized_trace = std::move(fp.trace);
    result.homogenized_runtime_seconds = seconds_since(start);

    if (config.baseline_mu0) {
        // Without the strange term the limit is the plain Poisson problem.
        MgResult plain = mg_solve(scaled(-1.0, source), config.tol.mg);
        result.baseline_mu0 = assemble_temperature(plain.solution, config.t_boundary);
    }

    std::vector<SweepRecord> records(cells.size());
    const std::size_t jobs = static_cast<std::size_t>(config.jobs);
    for (std::size_t first = 0; first < cells.size(); first += jobs) {
        const std::size_t last = std::min(cells.size(), first + jobs);
        std::vector<std::future<SweepRecord>> pending;
        for (std::size_t k = first; k < last; ++k)
            pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_one,
                                         cells[k], std::cref(config), std::cref(grid), std::cref(source),
                                         std::cref(result.homogenized), std::cref(result.baseline_mu0)));
        for (std::size_t k = first; k < last; ++k) records[k] = pending[k - first].get();
    }

    if (std::none_of(records.begin(), records.end(), [](const SweepRecord& r) { return r.ok; }))
        std::rethrow_exception(records.front().failure);
    result.records = std::move(records);
    return result;
}

const std::array<std::array<double, kTableN + 1>, kTableN + 1>& published_table() {
    static const auto table = [] {
        using Row = std::array<double, kTableN + 1>;
        const Row r0{10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10};
        const Row r1{10, 10.004, 10.006, 10.007, 10.008, 10.008, 10.008, 10.008, 10.008,
                     10.008, 10.008, 10.008, 10.008, 10.007, 10.006, 10.004, 10};
        const Row r2{10, 10.006, 10.009, 10.011, 10.013, 10.013, 10.014, 10.014, 10.014,
                     10.014, 10.014, 10.013, 10.013, 10.011, 10.009, 10.006, 10};
        const Row r3{10, 10.007, 10.011, 10.014, 10.016, 10.016, 10.017, 10.017, 10.017,
                     10.017, 10.017, 10.016, 10.016, 10.014, 10.011, 10.007, 10};
        const Row r4{10, 10.008, 10.013, 10.016, 10.017, 10.018, 10.019, 10.019, 10.019,
                     10.019, 10.019, 10.018, 10.017, 10.016, 10.013, 10.008, 10};
        const Row r5{10, 10.008, 10.013, 10.016, 10.018, 10.019, 10.02, 10.02, 10.02,
                     10.02, 10.02, 10.019, 10.018, 10.016, 10.013, 10.008, 10};
        const Row r6{10, 10.008, 10.014, 10.017, 10.019, 10.02, 10.021, 10.021, 10.021,
                     10.021, 10.021, 10.02, 10.019, 10.017, 10.014, 10.008, 10};
        return std::array<Row, kTableN + 1>{r0, r1, r2, r3, r4, r5, r6, r6, r6,
                                            r6, r6, r5, r4, r3, r2, r1, r0};
    }();
    return table;
}

double deviation_from_published(const ScalarField& temperature) {
    if (temperature.grid().n() != kTableN) throw ShapeError("published table comparison needs n = 16");
    const auto& table = published_table();
    double dev = 0.0;
    for (int j = 0; j <= kTableN; ++j)
        for (int i = 0; i <= kTableN; ++i)
            dev = std::max(dev, std::abs(temperature(i, j) - table[j][i]));
    return dev;
}

TableChecks check_table_structure(const ScalarField& temperature, const ScalarField& rounded,
                                  double t_boundary) {
    TableChecks c;
    const Grid2D& g = rounded.grid();
    const int n = g.n();

    c.boundary_all_ten = true;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (g.on_boundary(i, j) && rounded(i, j) != round_half_away(t_boundary, 3)) {
                c.boundary_all_ten = false;
                c.messages.push_back("boundary node (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") is not " + std::to_string(t_boundary));
            }

    c.eightfold_symmetric = true;
    for (SquareSymmetry s : kAllSymmetries)
        if (!(transformed(rounded, s) == rounded)) {
            c.eightfold_symmetric = false;
            c.messages.push_back("rounded table is not invariant under symmetry " +
                                 std::to_string(static_cast<int>(s)));
        }

    // Full-precision maximum must sit alone at the centre node.
    const int mid = n / 2;
    const double center = temperature(mid, mid);
    int at_max = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const double v = temperature(i, j);
            if (v > best) {
                best = v;
                at_max = 1;
            } else if (v == best) {
                ++at_max;
            }
        }
    c.center_is_unique_max = (n % 2 == 0) && best == center && at_max == 1;
    if (!c.center_is_unique_max) c.messages.push_back("full-precision maximum is not unique at the centre");

    // Rounded maximum: the nodes attaining it form one 4-connected cluster
    // that contains the centre node and is invariant under all 8 symmetries.
    const double rmax = *std::max_element(rounded.values().begin(), rounded.values().end());
    std::vector<char> in_block(g.node_count(), 0);
    std::size_t block_size = 0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (rounded(i, j) == rmax) {
                in_block[g.index(i, j)] = 1;
                ++block_size;
            }
    bool block_ok = n % 2 == 0 && in_block[g.index(mid, mid)];
    for (int j = 0; j <= n && block_ok; ++j)
        for (int i = 0; i <= n && block_ok; ++i) {
            if (!in_block[g.index(i, j)]) continue;
            for (SquareSymmetry s : kAllSymmetries) {
                int io = 0, jo = 0;
                apply_symmetry(s, n, i, j, io, jo);
                if (!in_block[g.index(io, jo)]) block_ok = false;
            }
        }
    if (block_ok) {
        std::vector<char> seen(g.node_count(), 0);
        std::vector<std::pair<int, int>> stack{{mid, mid}};
        seen[g.index(mid, mid)] = 1;
        std::size_t reached = 0;
        while (!stack.empty()) {
            const auto [i, j] = stack.back();
            stack.pop_back();
            ++reached;
            const int di[] = {1, -1, 0, 0};
            const int dj[] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int a = i + di[d], b = j + dj[d];
                if (a < 0 || b < 0 || a > n || b > n) continue;
                const std::size_t k = g.index(a, b);
                if (in_block[k] && !seen[k]) {
                    seen[k] = 1;
                    stack.emplace_back(a, b);
                }
            }
        }
        block_ok = reached == block_size;
    }
    c.rounded_max_block_centered = block_ok;
    if (!c.rounded_max_block_centered)
        c.messages.push_back("rounded maximum does not form a centred block");

    c.interior_in_range = true;
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const double v = temperature(i, j);
            if (!(v > t_boundary && v < t_boundary + 0.1)) {
                c.interior_in_range = false;
                c.messages.push_back("interior node (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") out of (T, T + 0.1)");
            }
        }
    return c;
}

namespace {

ScalarField rounded_copy(const ScalarField& f) {
    ScalarField out(f);
    for (double& v : out.values()) v = round_half_away(v, 3);
    return out;
}

} // namespace

TableReproduction reproduce_table1(const SolverTolerances& tol) {
    const Grid2D grid(kTableN);
    const double t = 10.0;
    const ScalarField source(grid, 1.0);
    const HomogenizedProblem problem(0.5, t, source);
    FixedPointResult fp = fixed_point_solve(problem, tol.mg, resolved_stop_tol(tol, source), tol.max_iter);
    TableReproduction out{assemble_temperature(fp.g, t), ScalarField(grid), std::move(fp.trace), {}};
    out.rounded = rounded_copy(out.temperature);
    out.checks = check_table_structure(out.temperature, out.rounded, t);
    return out;
}

namespace {

ConventionResult evaluate_convention(std::string name, std::string description, double mu,
                                     double source_scale, const SolverTolerances& tol) {
    const Grid2D grid(kTableN);
    const double t = 10.0;
    const ScalarField source(grid, source_scale);
    const HomogenizedProblem problem = HomogenizedProblem::with_mu(mu, t, source);
    ConventionResult r{std::move(name), std::move(description), mu, source_scale, "", 0, 0, 0};
    ScalarField g(grid);
    if (mu < smallest_laplacian_eigenvalue(grid)) {
        g = fixed_point_solve(problem, tol.mg, resolved_stop_tol(tol, source), tol.max_iter).g;
        r.method = "fixed-point";
    } else {
        g = helmholtz_cg_solve(problem, 1e-13);
        r.method = "cg";
    }
    const ScalarField u = assemble_temperature(g, t);
    r.center_value = u(kTableN / 2, kTableN / 2);
    r.linf_deviation = deviation_from_published(u);
    r.center_deviation = std::abs(r.center_value - published_table()[kTableN / 2][kTableN / 2]);
    return r;
}

} // namespace

CalibrationReport calibrate_convention(const SolverTolerances& tol) {
    CalibrationReport rep;
    const double pi = std::numbers::pi;
    const double h = 1.0 / kTableN;
    rep.conventions.push_back(
        evaluate_convention("unit-square", "unit square, h = 1/16, mu = pi", pi, 1.0, tol));
    // Spacing 1 instead of 1/16: -Delta_1 = -Delta_h * h^2, so the system
    // becomes (-Delta_h + mu / h^2) G = f / h^2 on the unit square.
    rep.conventions.push_back(evaluate_convention("unit-spacing", "node spacing 1 (plate side 16), mu = pi",
                                                  pi / (h * h), 1.0 / (h * h), tol));
    for (double factor : {0.5, 2.0, 4.0, 8.0, 16.0}) {
        char name[32];
        std::snprintf(name, sizeof name, "mu-x%g", factor);
        char desc[64];
        std::snprintf(desc, sizeof desc, "unit square, mu = %g * pi", factor);
        rep.conventions.push_back(evaluate_convention(name, desc, factor * pi, 1.0, tol));
    }

    const auto best = std::min_element(rep.conventions.begin(), rep.conventions.end(),
                                       [](const auto& a, const auto& b) { return a.linf_deviation < b.linf_deviation; });
    rep.best = best->name;
    rep.best_beats_default = best->linf_deviation < rep.conventions.front().linf_deviation;

    ScalarField published{Grid2D(kTableN)};
    for (int j = 0; j <= kTableN; ++j)
        for (int i = 0; i <= kTableN; ++i) published(i, j) = published_table()[j][i];
    rep.self_deviation = deviation_from_published(published);

    const Grid2D grid(kTableN);
    const ScalarField source(grid, 1.0);
    const HomogenizedProblem problem(0.5, 10.0, source);
    const ScalarField loose = rounded_copy(assemble_temperature(
        fixed_point_solve(problem, tol.mg, rep.stop_tol_loose, tol.max_iter).g, 10.0));
    const ScalarField tight = rounded_copy(assemble_temperature(
        fixed_point_solve(problem, tol.mg, rep.stop_tol_tight, tol.max_iter).g, 10.0));
    for (std::size_t k = 0; k < loose.values().size(); ++k) {
        const double d = std::abs(loose.values()[k] - tight.values()[k]);
        if (d > 0.0) ++rep.rounded_cells_changed;
        rep.max_abs_change = std::max(rep.max_abs_change, d);
    }
    return rep;
}

std::vector<std::pair<int, double>> emit_trace(const IterationTrace& trace) {
    std::vector<std::pair<int, double>> rows;
    rows.reserve(trace.deltas.size());
    for (std::size_t k = 0; k < trace.deltas.size(); ++k)
        rows.emplace_back(static_cast<int>(k + 1), trace.deltas[k]);
    return rows;
}

} // namespace perfhom
