/// @file poisson_mg.hpp
/// @brief Geometric multigrid for the 5-point Poisson problem
///        Delta_h G = F on the unit square with G = 0 on the boundary.
#pragma once

#include "perfhom/field_core.hpp"

#include <optional>
#include <vector>

namespace perfhom {

struct MgConfig {
    int pre_smooth = 2;
    int post_smooth = 2;
    int max_cycles = 50;
    /// Stop when ||Delta_h G - F||_inf <= target * max(1, ||F||_inf).
    double target_residual_linf = 1e-12;
    int coarsest_n = 2;

    /// Throws InvalidConfig when the invariants do not hold.
    void validate() const;
};

struct MgResult {
    ScalarField solution;
    /// Max-norm residual after each V-cycle.
    std::vector<double> residual_history;
};

/// (u_E + u_W + u_N + u_S - 4u) / h^2 at interior nodes, 0 on the boundary.
ScalarField laplacian_apply(const ScalarField& u);

/// Solves Delta_h G = F, G|boundary = 0, with V(pre, post)-cycles.
///
/// The grid must have a power-of-two n. Values of F on boundary nodes are
/// ignored. When @p initial_guess is given its interior values seed the
/// iteration (boundary values are forced to zero).
///
/// The requested tolerance is raised to the double-precision floor of the
/// residual evaluation, 64 eps (4 ||G||_inf / h^2 + ||F||_inf), which
/// dominates on fine grids.
///
/// Throws InvalidConfig for a bad grid or config and NonConvergence (with
/// the residual history) when max_cycles runs out.
MgResult mg_solve(const ScalarField& rhs, const MgConfig& cfg,
                  const std::optional<ScalarField>& initial_guess = std::nullopt);

namespace mg_detail {

/// Residual r = F - Delta_h u on interior nodes, zero on the boundary.
void residual(const ScalarField& u, const ScalarField& rhs, ScalarField& r);

/// One red-black Gauss-Seidel sweep (red = (i + j) even first).
void smooth(ScalarField& u, const ScalarField& rhs);

/// Full weighting from grid n to grid n/2 at interior nodes, injection on
/// the boundary.
ScalarField restrict_full_weighting(const ScalarField& fine);

/// Bilinear interpolation from grid n to grid 2n.
ScalarField prolong_bilinear(const ScalarField& coarse);

/// Relaxes to a max-norm residual of 1e-14 * max(1, ||F||_inf) (or the
/// rounding floor of the residual, whichever is larger).
void coarse_solve(ScalarField& u, const ScalarField& rhs);

double residual_linf(const ScalarField& u, const ScalarField& rhs);

} // namespace mg_detail

} // namespace perfhom
