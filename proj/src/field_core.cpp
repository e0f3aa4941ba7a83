#include "perfhom/field_core.hpp"

#include "perfhom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace perfhom {

Grid2D::Grid2D(int n) : n_(n), h_(0.0) {
    if (n < 2) throw InvalidConfig("grid needs n >= 2 cells per side, got " + std::to_string(n));
    h_ = 1.0 / static_cast<double>(n);
}

Grid2D make_grid(int n) { return Grid2D(n); }

bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

ScalarField::ScalarField(Grid2D grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

ScalarField::ScalarField(Grid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw ShapeError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                         std::to_string(grid_.node_count()));
}

bool ScalarField::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

DomainMask::DomainMask(Grid2D grid) : grid_(grid), classes_(grid.node_count(), NodeClass::Active) {
    const int n = grid_.n();
    for (int k = 0; k <= n; ++k) {
        classes_[grid_.index(k, 0)] = NodeClass::OuterDirichlet;
        classes_[grid_.index(k, n)] = NodeClass::OuterDirichlet;
        classes_[grid_.index(0, k)] = NodeClass::OuterDirichlet;
        classes_[grid_.index(n, k)] = NodeClass::OuterDirichlet;
    }
}

void DomainMask::mark_hole(int i, int j) noexcept {
    if (grid_.on_boundary(i, j)) return;
    classes_[grid_.index(i, j)] = NodeClass::HoleDirichlet;
}

std::size_t DomainMask::count(NodeClass c) const noexcept {
    return static_cast<std::size_t>(std::count(classes_.begin(), classes_.end(), c));
}

void DomainMask::validate() const {
    if (count(NodeClass::Active) == 0) throw GeometryError("domain mask has no active node");
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
    if (!(a.grid() == b.grid()))
        throw ShapeError(std::string(what) + ": fields live on different grids (n=" +
                         std::to_string(a.grid().n()) + " vs n=" + std::to_string(b.grid().n()) + ")");
}

double euclidean_norm(const ScalarField& field) noexcept {
    double sum = 0.0;
    for (double v : field.values()) sum += v * v;
    return std::sqrt(sum);
}

double norm(const ScalarField& field, NormKind kind) {
    if (!field.all_finite()) throw InvalidConfig("norm of a non-finite field");
    const Grid2D& g = field.grid();
    const double h = g.h();
    switch (kind) {
    case NormKind::Linf: {
        double m = 0.0;
        for (double v : field.values()) m = std::max(m, std::abs(v));
        return m;
    }
    case NormKind::L2h:
        return h * euclidean_norm(field);
    case NormKind::H1h: {
        double l2sq = 0.0;
        for (double v : field.values()) l2sq += v * v;
        l2sq *= h * h;
        // Difference quotients over every edge of the node grid, both directions.
        double grad = 0.0;
        const int n = g.n();
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i < n; ++i) {
                const double dx = (field(i + 1, j) - field(i, j)) / h;
                const double dy = (field(j, i + 1) - field(j, i)) / h;
                grad += dx * dx + dy * dy;
            }
        return std::sqrt(l2sq + h * h * grad);
    }
    }
    return 0.0;
}

ScalarField field_axpy(double a, const ScalarField& x, const ScalarField& y) {
    require_same_grid(x, y, "field_axpy");
    ScalarField out(y);
    auto xs = x.values();
    auto os = out.values();
    for (std::size_t k = 0; k < os.size(); ++k) os[k] += a * xs[k];
    return out;
}

ScalarField scaled(double a, const ScalarField& x) {
    ScalarField out(x);
    for (double& v : out.values()) v *= a;
    return out;
}

void apply_symmetry(SquareSymmetry s, int n, int i, int j, int& io, int& jo) noexcept {
    switch (s) {
    case SquareSymmetry::Identity: io = i; jo = j; break;
    case SquareSymmetry::Rot90: io = n - j; jo = i; break;
    case SquareSymmetry::Rot180: io = n - i; jo = n - j; break;
    case SquareSymmetry::Rot270: io = j; jo = n - i; break;
    case SquareSymmetry::FlipX: io = n - i; jo = j; break;
    case SquareSymmetry::FlipY: io = i; jo = n - j; break;
    case SquareSymmetry::Transpose: io = j; jo = i; break;
    case SquareSymmetry::AntiTranspose: io = n - j; jo = n - i; break;
    }
}

ScalarField transformed(const ScalarField& field, SquareSymmetry s) {
    const int n = field.grid().n();
    ScalarField out(field.grid());
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            int io = 0, jo = 0;
            apply_symmetry(s, n, i, j, io, jo);
            out(io, jo) = field(i, j);
        }
    return out;
}

} // namespace perfhom
