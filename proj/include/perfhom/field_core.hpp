/// @file field_core.hpp
/// @brief Node grids on the unit square, scalar fields, domain masks and
///        the discrete norms used throughout the library.
///
/// Nodes are indexed (i, j) with 0 <= i, j <= n; i runs along x (columns),
/// j along y (rows). Storage is row-major: index = j * (n + 1) + i.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace perfhom {

/// Uniform node grid on [0,1]^2 with n cells per side.
class Grid2D {
public:
    /// Throws InvalidConfig when n < 2.
    explicit Grid2D(int n);

    int n() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    int nodes_per_side() const noexcept { return n_ + 1; }
    std::size_t node_count() const noexcept {
        return static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(n_ + 1);
    }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_ + 1) +
               static_cast<std::size_t>(i);
    }
    bool on_boundary(int i, int j) const noexcept {
        return i == 0 || j == 0 || i == n_ || j == n_;
    }
    double x(int i) const noexcept { return i * h_; }
    double y(int j) const noexcept { return j * h_; }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;

private:
    int n_;
    double h_;
};

Grid2D make_grid(int n);

bool is_power_of_two(int n) noexcept;

/// Real value per grid node.
class ScalarField {
public:
    explicit ScalarField(Grid2D grid, double fill = 0.0);
    ScalarField(Grid2D grid, std::vector<double> values);

    /// Samples fn(x, y) at every node.
    template <class Fn>
    static ScalarField from_function(Grid2D grid, Fn&& fn) {
        ScalarField out(grid);
        for (int j = 0; j <= grid.n(); ++j)
            for (int i = 0; i <= grid.n(); ++i)
                out(i, j) = fn(grid.x(i), grid.y(j));
        return out;
    }

    const Grid2D& grid() const noexcept { return grid_; }

    double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
    double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept;

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    Grid2D grid_;
    std::vector<double> values_;
};

enum class NodeClass : std::uint8_t { Active, OuterDirichlet, HoleDirichlet };

/// Per-node classification of the (possibly perforated) domain.
class DomainMask {
public:
    /// All boundary nodes OuterDirichlet, every interior node Active.
    explicit DomainMask(Grid2D grid);

    const Grid2D& grid() const noexcept { return grid_; }
    NodeClass operator()(int i, int j) const noexcept { return classes_[grid_.index(i, j)]; }
    std::span<const NodeClass> classes() const noexcept { return classes_; }

    /// Marks an interior node as part of a hole. Boundary nodes are left alone.
    void mark_hole(int i, int j) noexcept;

    std::size_t count(NodeClass c) const noexcept;

    /// Throws GeometryError when no Active node is left.
    void validate() const;

private:
    Grid2D grid_;
    std::vector<NodeClass> classes_;
};

enum class NormKind { Linf, L2h, H1h };

/// LINF = max|v|; L2H = sqrt(h^2 sum v^2);
/// H1H = sqrt(L2H^2 + h^2 sum over grid edges of (difference quotient)^2).
double norm(const ScalarField& field, NormKind kind);

/// Plain Euclidean norm over every node, no h weighting.
double euclidean_norm(const ScalarField& field) noexcept;

/// Returns a * x + y. Throws ShapeError on grid mismatch.
ScalarField field_axpy(double a, const ScalarField& x, const ScalarField& y);

ScalarField scaled(double a, const ScalarField& x);

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what);

/// The 8 symmetries of the square acting on node indices.
enum class SquareSymmetry {
    Identity, Rot90, Rot180, Rot270, FlipX, FlipY, Transpose, AntiTranspose
};

inline constexpr SquareSymmetry kAllSymmetries[] = {
    SquareSymmetry::Identity, SquareSymmetry::Rot90,  SquareSymmetry::Rot180,
    SquareSymmetry::Rot270,   SquareSymmetry::FlipX,  SquareSymmetry::FlipY,
    SquareSymmetry::Transpose, SquareSymmetry::AntiTranspose};

/// (i, j) -> image under the symmetry on a grid with n cells.
void apply_symmetry(SquareSymmetry s, int n, int i, int j, int& io, int& jo) noexcept;

ScalarField transformed(const ScalarField& field, SquareSymmetry s);

} // namespace perfhom
