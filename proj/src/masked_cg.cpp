#include "perfhom/masked_cg.hpp"

#include "perfhom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace perfhom {

namespace {

// Active-node flags padded into the full node array for branch-light loops.
std::vector<double> active_weights(const DomainMask& mask) {
    std::vector<double> w(mask.grid().node_count(), 0.0);
    auto cls = mask.classes();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = cls[k] == NodeClass::Active ? 1.0 : 0.0;
    return w;
}

void apply(const Grid2D& g, const std::vector<double>& active, double shift,
           const std::vector<double>& v, std::vector<double>& out) {
    const int n = g.n();
    const std::size_t stride = static_cast<std::size_t>(n + 1);
    const double inv_h2 = 1.0 / (g.h() * g.h());
    const double diag = 4.0 * inv_h2 + shift;
    std::fill(out.begin(), out.end(), 0.0);
    // v is zero at every non-active node, so neighbours need no masking.
    for (int j = 1; j < n; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * stride;
        for (int i = 1; i < n; ++i) {
            const std::size_t k = row + static_cast<std::size_t>(i);
            out[k] = active[k] * (diag * v[k] - inv_h2 * (v[k + 1] + v[k - 1] + v[k + stride] + v[k - stride]));
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

} // namespace

ScalarField masked_operator_apply(const DomainMask& mask, double shift, const ScalarField& v) {
    if (!(mask.grid() == v.grid())) throw ShapeError("masked_operator_apply: mask and field grids differ");
    const auto active = active_weights(mask);
    std::vector<double> vin(v.values().begin(), v.values().end());
    for (std::size_t k = 0; k < vin.size(); ++k) vin[k] *= active[k];
    std::vector<double> out(vin.size());
    apply(mask.grid(), active, shift, vin, out);
    return ScalarField(mask.grid(), std::move(out));
}

ScalarField masked_cg_solve(const DomainMask& mask, double shift, const ScalarField& rhs,
                            const CgOptions& options, CgReport* report) {
    const Grid2D& g = mask.grid();
    if (!(g == rhs.grid())) throw ShapeError("masked_cg_solve: mask and right-hand side grids differ");
    if (!(options.rel_tol > 0.0)) throw InvalidConfig("CG relative tolerance must be > 0");
    if (shift < 0.0) throw InvalidConfig("CG needs a non-negative shift (SPD system)");
    if (!rhs.all_finite()) throw InvalidConfig("CG right-hand side is not finite");
    mask.validate();

    const auto active = active_weights(mask);
    const std::size_t size = g.node_count();
    std::vector<double> b(rhs.values().begin(), rhs.values().end());
    for (std::size_t k = 0; k < size; ++k) b[k] *= active[k];

    std::vector<double> x(size, 0.0), r = b, z(size), p(size), ap(size);
    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) {
        if (report) *report = CgReport{0, 0.0};
        return ScalarField(g);
    }

    const double inv_diag = 1.0 / (4.0 / (g.h() * g.h()) + shift);
    auto precondition = [&] {
        if (options.jacobi)
            for (std::size_t k = 0; k < size; ++k) z[k] = inv_diag * r[k];
        else
            z = r;
    };

    const std::size_t active_count = mask.count(NodeClass::Active);
    const long long cap = 10LL * static_cast<long long>(active_count);
    std::vector<double> history;

    precondition();
    p = z;
    double rz = dot(r, z);
    long long it = 0;
    double last_restart_rel = std::numeric_limits<double>::infinity();
    for (; it < cap; ++it) {
        apply(g, active, shift, p, ap);
        const double alpha = rz / dot(p, ap);
        for (std::size_t k = 0; k < size; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        const double rel = std::sqrt(dot(r, r)) / b_norm;
        history.push_back(rel);
        if (rel <= options.rel_tol) {
            // Confirm against the true residual; restart from it if the
            // recurrence has drifted.
            apply(g, active, shift, x, ap);
            for (std::size_t k = 0; k < size; ++k) r[k] = b[k] - ap[k];
            const double true_rel = std::sqrt(dot(r, r)) / b_norm;
            if (true_rel <= options.rel_tol) {
                if (report) *report = CgReport{static_cast<int>(it + 1), true_rel};
                return ScalarField(g, std::move(x));
            }
            // The recurrence keeps shrinking below rounding while the true
            // residual stalls; give up once restarts stop paying off.
            if (true_rel >= 0.5 * last_restart_rel) {
                history.push_back(true_rel);
                throw NonConvergence("conjugate gradient stagnated at relative residual " +
                                         std::to_string(true_rel) + " above the tolerance " +
                                         std::to_string(options.rel_tol),
                                     std::move(history));
            }
            last_restart_rel = true_rel;
            precondition();
            p = z;
            rz = dot(r, z);
            continue;
        }
        precondition();
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < size; ++k) p[k] = z[k] + beta * p[k];
    }
    throw NonConvergence("conjugate gradient did not reach relative residual " +
                             std::to_string(options.rel_tol) + " in " + std::to_string(cap) + " iterations",
                         std::move(history));
}

} // namespace perfhom
