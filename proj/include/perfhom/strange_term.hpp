/// @file strange_term.hpp
/// @brief The homogenized plate problem  -Delta U + mu U = f + mu T,
///        U = T on the boundary, with mu = pi / (2 c0).
///
/// Writing U = G + T turns it into -Delta G + mu G = f with G = 0 on the
/// boundary. G is computed by the fixed-point scheme
///
///     G_{k+1} = multigrid(mu G_k - f),   G_0 = 0,
///
/// whose error contracts by mu / lambda_1 per step, where lambda_1 is the
/// smallest eigenvalue of -Delta_h. A conjugate-gradient solve of the same
/// discrete system is provided as an independent check.
#pragma once

#include "perfhom/field_core.hpp"
#include "perfhom/masked_cg.hpp"
#include "perfhom/poisson_mg.hpp"

#include <vector>

namespace perfhom {

/// pi / (2 c0). Throws InvalidConfig unless c0 > 0.
double mu_from_c0(double c0);

/// Smallest eigenvalue of -Delta_h on the unit square: (8 / h^2) sin^2(pi h / 2).
double smallest_laplacian_eigenvalue(const Grid2D& grid) noexcept;

class HomogenizedProblem {
public:
    /// Throws InvalidConfig for c0 <= 0 or a non-finite source.
    HomogenizedProblem(double c0, double t_boundary, ScalarField source);

    /// Same problem with an explicit absorption coefficient; used for the
    /// mu = 0 baseline and for unit-convention experiments. mu >= 0.
    static HomogenizedProblem with_mu(double mu, double t_boundary, ScalarField source);

    double c0() const noexcept { return c0_; }
    /// Recomputed from c0 unless the problem was built with_mu.
    double mu() const noexcept;
    double t_boundary() const noexcept { return t_boundary_; }
    const ScalarField& source() const noexcept { return source_; }
    const Grid2D& grid() const noexcept { return source_.grid(); }

private:
    HomogenizedProblem(double c0, double mu_override, bool has_override, double t_boundary,
                       ScalarField source);

    double c0_;
    double mu_override_;
    bool has_override_;
    double t_boundary_;
    ScalarField source_;
};

struct IterationTrace {
    /// deltas[k - 1] = ||G_k - G_{k-1}||, plain Euclidean over all nodes.
    std::vector<double> deltas;
    int iterations = 0;
    bool converged = false;
    /// deltas.back() / deltas[size - 2]; NaN until three iterations exist.
    double final_ratio = 0.0;
};

struct FixedPointResult {
    ScalarField g;
    IterationTrace trace;
};

/// Default outer stopping tolerance: 1e-10 * max(1, ||f||_inf).
double default_stop_tol(const ScalarField& source);

/// Runs the fixed-point scheme until delta_k <= stop_tol.
///
/// Each inner solve is warm-started from the previous iterate. Throws
/// NonConvergence carrying the delta trace when max_iter is exhausted;
/// multigrid failures propagate.
FixedPointResult fixed_point_solve(const HomogenizedProblem& problem, const MgConfig& mg,
                                   double stop_tol, int max_iter);

/// Conjugate-gradient solve of (-Delta_h + mu) G = f, G = 0 on the boundary.
ScalarField helmholtz_cg_solve(const HomogenizedProblem& problem, double rel_tol,
                               CgReport* report = nullptr);

/// U = G + T at every node.
ScalarField assemble_temperature(const ScalarField& g, double t_boundary);

} // namespace perfhom
