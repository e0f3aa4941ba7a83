/// @file perforated.hpp
/// @brief The plate with periodic tiny holes: hole lattice, node masks, the
///        direct Dirichlet solve and the extension of its solution into the
///        holes.
///
/// The unit square is split into m x m cells of side eps = 1/m. A disk of
/// radius exp(-c0 / eps^2) sits at the centre of every occupied cell. The
/// lattice is kept in integer cell coordinates so that masks are exactly
/// symmetric whenever the set of occupied cells is.
#pragma once

#include "perfhom/field_core.hpp"
#include "perfhom/masked_cg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace perfhom {

struct LatticeCell {
    int i = 0;
    int j = 0;
    friend bool operator==(const LatticeCell&, const LatticeCell&) = default;
};

class PerforationSpec {
public:
    /// Full m x m lattice with eps = 1/m. Throws InvalidConfig for m < 2 or
    /// c0 <= 0 and GeometryError when the radius reaches eps/2.
    static PerforationSpec lattice(int cells_per_side, double c0);

    /// Only the listed cells carry a hole. Same checks as lattice().
    static PerforationSpec subset(int cells_per_side, double c0, std::vector<LatticeCell> cells);

    /// No holes at all: the perforated solve becomes the plain Poisson solve.
    static PerforationSpec empty();

    int cells_per_side() const noexcept { return m_; }
    double epsilon() const noexcept;
    double c0() const noexcept { return c0_; }
    /// exp(-c0 / eps^2); zero for the empty spec.
    double radius() const noexcept;
    std::size_t hole_count() const noexcept { return cells_.size(); }
    const std::vector<LatticeCell>& cells() const noexcept { return cells_; }
    /// ((i + 1/2) / m, (j + 1/2) / m)
    std::pair<double, double> center(const LatticeCell& cell) const noexcept;

private:
    PerforationSpec(int m, double c0, std::vector<LatticeCell> cells);

    int m_;
    double c0_;
    std::vector<LatticeCell> cells_;
};

/// Accepts eps with 1/eps an integer >= 2 (to 1e-9 relative).
PerforationSpec make_perforation(double epsilon, double c0);

/// Parses "p/q" with q/p an integer >= 2 and returns that integer.
/// Decimal strings are rejected. Throws InvalidConfig.
int parse_reciprocal_fraction(const std::string& text);

/// Nodes within distance radius of a centre become HoleDirichlet.
/// Throws UnderResolvedGeometry when radius < 3h for a non-empty spec.
DomainMask build_mask(const PerforationSpec& spec, const Grid2D& grid);

struct PerforatedOptions {
    double rel_tol = 1e-10;
    bool jacobi = false;
};

/// Solves -Delta_h U = f at Active nodes with U = T on every Dirichlet node.
ScalarField solve_perforated(const PerforationSpec& spec, const Grid2D& grid, const ScalarField& source,
                             double t_boundary, const PerforatedOptions& options = {},
                             CgReport* report = nullptr);

/// Same as solve_perforated but on an already built mask.
ScalarField solve_on_mask(const DomainMask& mask, const ScalarField& source, double t_boundary,
                          const PerforatedOptions& options = {}, CgReport* report = nullptr);

/// u at Active and OuterDirichlet nodes, @p fill at HoleDirichlet nodes.
ScalarField extend_into_holes(const ScalarField& u, const DomainMask& mask, double fill);

} // namespace perfhom
