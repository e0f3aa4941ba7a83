/// @file masked_cg.hpp
/// @brief Conjugate gradient for (-Delta_h + shift) v = b restricted to the
///        Active nodes of a DomainMask, with v = 0 on every Dirichlet node.
#pragma once

#include "perfhom/field_core.hpp"

namespace perfhom {

struct CgOptions {
    /// Stop when ||b - A v||_2 <= rel_tol * ||b||_2 (true residual).
    double rel_tol = 1e-10;
    /// Jacobi preconditioning. The diagonal is constant on uniform grids,
    /// so this only rescales; kept for experimentation on the flag.
    bool jacobi = false;
};

struct CgReport {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// A v at Active nodes: (4 v - sum of Active neighbours) / h^2 + shift v.
/// Zero on Dirichlet nodes.
ScalarField masked_operator_apply(const DomainMask& mask, double shift, const ScalarField& v);

/// Solves A v = b over Active nodes. Values of b on Dirichlet nodes are
/// ignored. The iteration cap is 10 x (active node count); hitting it, or
/// stalling above rel_tol at the rounding floor, throws NonConvergence with
/// the relative residual history.
ScalarField masked_cg_solve(const DomainMask& mask, double shift, const ScalarField& rhs,
                            const CgOptions& options, CgReport* report = nullptr);

} // namespace perfhom
