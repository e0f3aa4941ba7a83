/// @file property_checks.hpp
/// @brief Randomized invariant checks shared by the property suite and the
///        acceptance binary. Each check returns an empty string on success
///        or a description of the first violation.
#pragma once

#include "perfhom/field_core.hpp"
#include "perfhom/perforated.hpp"
#include "perfhom/poisson_mg.hpp"
#include "perfhom/strange_term.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace props {

using namespace perfhom;

inline ScalarField random_field(const Grid2D& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(g);
    for (double& v : f.values()) v = dist(rng);
    return f;
}

/// Random combination of the lowest sine modes: smooth and zero on the boundary.
inline ScalarField random_smooth_field(const Grid2D& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double c[3][3];
    for (auto& row : c)
        for (double& v : row) v = coef(rng);
    return ScalarField::from_function(g, [&](double x, double y) {
        double s = 0.5;  // plus a constant so the source is not mean-free
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                s += c[p][q] * std::sin((p + 1) * std::numbers::pi * x) * std::sin((q + 1) * std::numbers::pi * y);
        return s;
    });
}

/// Copies each orbit representative to all its images under the 8
/// symmetries of the square, so the result is exactly symmetric.
inline ScalarField symmetrized(const ScalarField& f) {
    const int n = f.grid().n();
    ScalarField out(f.grid());
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            int a = std::min(i, n - i);
            int b = std::min(j, n - j);
            if (a > b) std::swap(a, b);
            out(i, j) = f(a, b);
        }
    return out;
}

inline double max_symmetry_defect(const ScalarField& f) {
    double worst = 0.0;
    for (SquareSymmetry s : kAllSymmetries)
        worst = std::max(worst, norm(field_axpy(-1.0, transformed(f, s), f), NormKind::Linf));
    return worst;
}

/// Fixed-point solution of the homogenized problem is linear in f.
inline std::string check_linearity(std::mt19937_64& rng, int n, double mu) {
    const Grid2D g(n);
    const ScalarField f1 = random_field(g, rng);
    const ScalarField f2 = random_field(g, rng);
    const MgConfig mg{};
    auto solve = [&](const ScalarField& f) {
        const auto p = HomogenizedProblem::with_mu(mu, 0.0, f);
        return fixed_point_solve(p, mg, 1e-12 * std::max(1.0, norm(f, NormKind::Linf)), 500).g;
    };
    const ScalarField sum = field_axpy(1.0, solve(f1), solve(f2));
    const ScalarField direct = solve(field_axpy(1.0, f1, f2));
    const double err = norm(field_axpy(-1.0, sum, direct), NormKind::Linf);
    if (err > 1e-9) return "linearity defect " + std::to_string(err) + " at n=" + std::to_string(n);
    return {};
}

/// Symmetric data gives symmetric multigrid and fixed-point solutions.
inline std::string check_symmetry(std::mt19937_64& rng, int n, double mu) {
    const Grid2D g(n);
    const ScalarField f = symmetrized(random_field(g, rng));
    const double mg_defect = max_symmetry_defect(mg_solve(f, MgConfig{}).solution);
    if (mg_defect > 1e-12) return "multigrid symmetry defect " + std::to_string(mg_defect);
    const auto p = HomogenizedProblem::with_mu(mu, 10.0, f);
    const ScalarField u = assemble_temperature(fixed_point_solve(p, MgConfig{}, 1e-11, 500).g, 10.0);
    const double fp_defect = max_symmetry_defect(u);
    if (fp_defect > 1e-12) return "fixed-point symmetry defect " + std::to_string(fp_defect);
    return {};
}

/// For f >= 0 the perforated solution attains its minimum T on Dirichlet
/// nodes, holes hold exactly T, and every active value is >= T.
inline std::string check_maximum_principle(std::mt19937_64& rng, int n) {
    const Grid2D g(n);
    std::uniform_int_distribution<int> pick_m(2, 3);
    const int m = pick_m(rng);
    std::bernoulli_distribution keep(0.6);
    std::vector<LatticeCell> cells;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            if (keep(rng)) cells.push_back({i, j});
    // c0 chosen so that radius is a fixed fraction of the cell: resolvable on small grids.
    std::uniform_real_distribution<double> frac(0.15, 0.4);
    const double eps = 1.0 / m;
    const double c0 = -eps * eps * std::log(frac(rng) * eps);
    const PerforationSpec spec = PerforationSpec::subset(m, c0, cells);
    std::uniform_real_distribution<double> tdist(-5.0, 20.0);
    const double t = tdist(rng);
    const ScalarField f = random_field(g, rng, 0.0, 2.0);
    const DomainMask mask = build_mask(spec, g);
    const ScalarField u = solve_on_mask(mask, f, t, PerforatedOptions{1e-12, false});
    const double mn = *std::min_element(u.values().begin(), u.values().end());
    if (std::abs(mn - t) > 1e-12 * std::max(1.0, std::abs(t)))
        return "minimum " + std::to_string(mn) + " differs from T=" + std::to_string(t);
    auto cls = mask.classes();
    for (std::size_t k = 0; k < cls.size(); ++k) {
        if (cls[k] != NodeClass::Active && u.values()[k] != t) return "Dirichlet node not exactly T";
        if (u.values()[k] < t - 1e-12 * std::max(1.0, std::abs(t))) return "active node below T";
    }
    return {};
}

struct SuiteOutcome {
    int cases = 0;
    std::vector<std::string> failures;
};

/// Randomized linearity, symmetry and maximum-principle cases, `per_kind` of each.
inline SuiteOutcome run_suite(std::uint64_t seed, int per_kind) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> small_n(3, 5);
    std::uniform_real_distribution<double> mu(0.05, 15.0);
    SuiteOutcome out;
    auto record = [&](const std::string& kind, int k, const std::string& msg) {
        ++out.cases;
        if (!msg.empty()) out.failures.push_back(kind + " case " + std::to_string(k) + ": " + msg);
    };
    for (int k = 0; k < per_kind; ++k) record("linearity", k, check_linearity(rng, 1 << small_n(rng), mu(rng)));
    for (int k = 0; k < per_kind; ++k) record("symmetry", k, check_symmetry(rng, 1 << small_n(rng), mu(rng)));
    for (int k = 0; k < per_kind; ++k) record("maximum principle", k, check_maximum_principle(rng, k % 2 ? 64 : 96));
    return out;
}

} // namespace props
