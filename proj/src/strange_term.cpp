#include "perfhom/strange_term.hpp"

#include "perfhom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace perfhom {

double mu_from_c0(double c0) {
    if (!(c0 > 0.0) || !std::isfinite(c0))
        throw InvalidConfig("c0 must be a positive finite number, got " + std::to_string(c0));
    return std::numbers::pi / (2.0 * c0);
}

double smallest_laplacian_eigenvalue(const Grid2D& grid) noexcept {
    const double h = grid.h();
    const double s = std::sin(std::numbers::pi * h / 2.0);
    return 8.0 / (h * h) * s * s;
}

HomogenizedProblem::HomogenizedProblem(double c0, double mu_override, bool has_override,
                                       double t_boundary, ScalarField source)
    : c0_(c0), mu_override_(mu_override), has_override_(has_override), t_boundary_(t_boundary),
      source_(std::move(source)) {
    if (!std::isfinite(t_boundary)) throw InvalidConfig("boundary temperature must be finite");
    if (!source_.all_finite()) throw InvalidConfig("source field must be finite");
}

HomogenizedProblem::HomogenizedProblem(double c0, double t_boundary, ScalarField source)
    : HomogenizedProblem(c0, 0.0, false, t_boundary, std::move(source)) {
    mu_from_c0(c0);
}

HomogenizedProblem HomogenizedProblem::with_mu(double mu, double t_boundary, ScalarField source) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw InvalidConfig("absorption coefficient mu must be finite and >= 0");
    const double c0 = mu > 0.0 ? std::numbers::pi / (2.0 * mu) : std::numeric_limits<double>::infinity();
    return HomogenizedProblem(c0, mu, true, t_boundary, std::move(source));
}

double HomogenizedProblem::mu() const noexcept {
    return has_override_ ? mu_override_ : std::numbers::pi / (2.0 * c0_);
}

double default_stop_tol(const ScalarField& source) {
    return 1e-10 * std::max(1.0, norm(source, NormKind::Linf));
}

FixedPointResult fixed_point_solve(const HomogenizedProblem& problem, const MgConfig& mg,
                                   double stop_tol, int max_iter) {
    if (!(stop_tol > 0.0)) throw InvalidConfig("fixed-point stop tolerance must be > 0");
    if (max_iter < 1) throw InvalidConfig("fixed-point max_iter must be >= 1");
    const Grid2D& g = problem.grid();
    if (!is_power_of_two(g.n()))
        throw InvalidConfig("fixed-point solve needs n to be a power of two, got " + std::to_string(g.n()));

    const double mu = problem.mu();
    const ScalarField& f = problem.source();
    ScalarField current(g);
    IterationTrace trace;
    trace.final_ratio = std::numeric_limits<double>::quiet_NaN();

    for (int k = 1; k <= max_iter; ++k) {
        // Delta_h G_{k} = mu G_{k-1} - f
        const ScalarField rhs = field_axpy(-1.0, f, scaled(mu, current));
        MgResult inner = mg_solve(rhs, mg, current);
        const double delta = euclidean_norm(field_axpy(-1.0, current, inner.solution));
        current = std::move(inner.solution);

        trace.deltas.push_back(delta);
        trace.iterations = k;
        const std::size_t m = trace.deltas.size();
        if (m >= 3) trace.final_ratio = trace.deltas[m - 1] / trace.deltas[m - 2];
        if (!std::isfinite(delta)) break;
        if (delta <= stop_tol) {
            trace.converged = true;
            return FixedPointResult{std::move(current), std::move(trace)};
        }
    }
    throw NonConvergence("fixed-point iteration did not reach delta <= " + std::to_string(stop_tol) +
                             " in " + std::to_string(max_iter) + " iterations (mu=" + std::to_string(mu) +
                             ", lambda_1=" + std::to_string(smallest_laplacian_eigenvalue(g)) + ")",
                         std::move(trace.deltas));
}

ScalarField helmholtz_cg_solve(const HomogenizedProblem& problem, double rel_tol, CgReport* report) {
    const DomainMask mask(problem.grid());
    return masked_cg_solve(mask, problem.mu(), problem.source(), CgOptions{rel_tol, false}, report);
}

ScalarField assemble_temperature(const ScalarField& g, double t_boundary) {
    ScalarField u(g);
    for (double& v : u.values()) v += t_boundary;
    return u;
}

} // namespace perfhom
