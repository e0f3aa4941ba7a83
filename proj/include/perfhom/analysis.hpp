/// @file analysis.hpp
/// @brief Experiments comparing the perforated plate against the
///        homogenized problem: discrepancy metrics, the eps sweep, the
///        16 x 16 reference table and the unit-convention calibration.
#pragma once

#include "perfhom/field_core.hpp"
#include "perfhom/perforated.hpp"
#include "perfhom/poisson_mg.hpp"
#include "perfhom/strange_term.hpp"

#include <array>
#include <exception>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace perfhom {

/// norm(a - b, kind). Throws ShapeError on grid mismatch.
double discrepancy(const ScalarField& a, const ScalarField& b, NormKind kind);

/// Rounds half away from zero to @p decimals places.
double round_half_away(double value, int decimals);

struct SolverTolerances {
    MgConfig mg{};
    /// Outer fixed-point tolerance; <= 0 selects default_stop_tol(f).
    double stop_tol = 0.0;
    int max_iter = 500;
    double cg_rel_tol = 1e-10;
    bool jacobi = false;
};

struct SweepConfig {
    /// 1/eps for each run; sorted into decreasing eps by run_sweep.
    std::vector<int> cells_per_side;
    double c0 = 0.5;
    int n = 1024;
    double t_boundary = 10.0;
    SolverTolerances tol{};
    bool baseline_mu0 = true;
    /// Number of eps entries solved concurrently. Results do not depend on it.
    int jobs = 1;
};

struct SweepRecord {
    int cells_per_side = 0;
    double epsilon = 0.0;
    double radius = 0.0;
    std::size_t hole_count = 0;
    int n = 0;
    double discrepancy_l2h = 0.0;
    double discrepancy_linf = 0.0;
    double h1_norm_extended = 0.0;
    /// Perforated vs mu = 0 solution; only set when the baseline ran.
    std::optional<double> baseline_discrepancy_l2h;
    std::optional<double> baseline_discrepancy_linf;
    double runtime_seconds = 0.0;
    int cg_iterations = 0;
    bool ok = false;
    std::string error;
    std::exception_ptr failure;
    /// Extended perforated temperature; empty on failure.
    std::optional<ScalarField> extended;
};

struct SweepResult {
    double mu = 0.0;
    std::vector<SweepRecord> records;  // decreasing eps
    ScalarField homogenized;           // U = G + T with the strange term
    IterationTrace homogenized_trace;
    std::optional<ScalarField> baseline_mu0;
    double homogenized_runtime_seconds = 0.0;
};

/// Runs the perforated and homogenized solves on the same grid for every
/// eps and records their discrepancies. A failing eps is kept as a record
/// with ok = false; if every eps fails the first error is rethrown.
SweepResult run_sweep(const SweepConfig& config, const ScalarField& source);

/// Table 1 layout: 17 x 17 nodes, n = 16, mu = pi, f = 1, T = 10.
inline constexpr int kTableN = 16;

/// The published 16 x 16 temperature table, indexed [row j][column i].
const std::array<std::array<double, kTableN + 1>, kTableN + 1>& published_table();

struct TableChecks {
    bool boundary_all_ten = false;
    bool eightfold_symmetric = false;
    bool center_is_unique_max = false;
    bool rounded_max_block_centered = false;
    bool interior_in_range = false;
    std::vector<std::string> messages;

    bool all() const noexcept {
        return boundary_all_ten && eightfold_symmetric && center_is_unique_max &&
               rounded_max_block_centered && interior_in_range;
    }
};

struct TableReproduction {
    ScalarField temperature;  // full precision
    ScalarField rounded;      // 3 decimals, half away from zero
    IterationTrace trace;
    TableChecks checks;
};

/// Structural checks on a rounded table (boundary, symmetry, maximum, range).
TableChecks check_table_structure(const ScalarField& temperature, const ScalarField& rounded,
                                  double t_boundary);

TableReproduction reproduce_table1(const SolverTolerances& tol = {});

struct ConventionResult {
    std::string name;
    std::string description;
    double mu_effective = 0.0;
    double source_scale = 1.0;
    std::string method;  // "fixed-point" or "cg" (fixed point diverges when mu >= lambda_1)
    double center_value = 0.0;
    double linf_deviation = 0.0;
    double center_deviation = 0.0;
};

struct CalibrationReport {
    std::vector<ConventionResult> conventions;
    std::string best;
    bool best_beats_default = false;
    double self_deviation = 0.0;
    /// Rounded-table sensitivity to the outer stop tolerance (1e-6 vs 1e-10).
    double stop_tol_loose = 1e-6;
    double stop_tol_tight = 1e-10;
    int rounded_cells_changed = 0;
    double max_abs_change = 0.0;
};

/// Max-norm distance between a 17 x 17 temperature field and the table.
double deviation_from_published(const ScalarField& temperature);

CalibrationReport calibrate_convention(const SolverTolerances& tol = {});

/// (k, delta_k) rows, k starting at 1.
std::vector<std::pair<int, double>> emit_trace(const IterationTrace& trace);

} // namespace perfhom
