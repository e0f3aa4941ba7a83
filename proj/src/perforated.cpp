#include "perfhom/perforated.hpp"

#include "perfhom/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>

namespace perfhom {

PerforationSpec::PerforationSpec(int m, double c0, std::vector<LatticeCell> cells)
    : m_(m), c0_(c0), cells_(std::move(cells)) {}

PerforationSpec PerforationSpec::subset(int cells_per_side, double c0, std::vector<LatticeCell> cells) {
    if (cells_per_side < 2)
        throw InvalidConfig("perforation needs at least 2 cells per side (eps <= 1/2)");
    if (!(c0 > 0.0) || !std::isfinite(c0)) throw InvalidConfig("c0 must be a positive finite number");
    for (const auto& c : cells)
        if (c.i < 0 || c.j < 0 || c.i >= cells_per_side || c.j >= cells_per_side)
            throw InvalidConfig("lattice cell outside the m x m lattice");
    PerforationSpec spec(cells_per_side, c0, std::move(cells));
    if (!(spec.radius() < spec.epsilon() / 2.0))
        throw GeometryError("hole radius " + std::to_string(spec.radius()) + " reaches half the cell size " +
                            std::to_string(spec.epsilon() / 2.0) + "; holes would leave their cells");
    return spec;
}

PerforationSpec PerforationSpec::lattice(int cells_per_side, double c0) {
    std::vector<LatticeCell> cells;
    if (cells_per_side > 0) cells.reserve(static_cast<std::size_t>(cells_per_side) * cells_per_side);
    for (int j = 0; j < cells_per_side; ++j)
        for (int i = 0; i < cells_per_side; ++i) cells.push_back({i, j});
    return subset(cells_per_side, c0, std::move(cells));
}

PerforationSpec PerforationSpec::empty() { return PerforationSpec(1, 1.0, {}); }

double PerforationSpec::epsilon() const noexcept { return 1.0 / static_cast<double>(m_); }

double PerforationSpec::radius() const noexcept {
    if (cells_.empty()) return 0.0;
    const double eps = epsilon();
    return std::exp(-c0_ / (eps * eps));
}

std::pair<double, double> PerforationSpec::center(const LatticeCell& cell) const noexcept {
    return {(cell.i + 0.5) / m_, (cell.j + 0.5) / m_};
}

PerforationSpec make_perforation(double epsilon, double c0) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidConfig("epsilon must lie in (0, 1)");
    const double inv = 1.0 / epsilon;
    const double m = std::round(inv);
    if (std::abs(inv - m) > 1e-9 * inv)
        throw InvalidConfig("1/epsilon must be an integer, got 1/eps = " + std::to_string(inv));
    return PerforationSpec::lattice(static_cast<int>(m), c0);
}

int parse_reciprocal_fraction(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos)
        throw InvalidConfig("epsilon must be written as a fraction like 1/3, got '" + text + "'");
    auto parse_int = [&](std::string_view part) {
        long long v = 0;
        const auto* begin = part.data();
        const auto* end = part.data() + part.size();
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr != end || part.empty() || v <= 0 || v > (1LL << 30))
            throw InvalidConfig("bad fraction '" + text + "'");
        return v;
    };
    const std::string_view sv(text);
    const long long p = parse_int(sv.substr(0, slash));
    const long long q = parse_int(sv.substr(slash + 1));
    if (q % p != 0) throw InvalidConfig("1/epsilon is not an integer for epsilon = " + text);
    const long long m = q / p;
    if (m < 2) throw InvalidConfig("epsilon must be at most 1/2, got " + text);
    return static_cast<int>(m);
}

DomainMask build_mask(const PerforationSpec& spec, const Grid2D& grid) {
    DomainMask mask(grid);
    if (spec.hole_count() == 0) {
        mask.validate();
        return mask;
    }
    const double r = spec.radius();
    if (r < 3.0 * grid.h())
        throw UnderResolvedGeometry("hole radius " + std::to_string(r) + " is below 3h = " +
                                    std::to_string(3.0 * grid.h()) + " on the n=" +
                                    std::to_string(grid.n()) + " grid");

    // Node (a, b) at (a/n, b/n), centre at ((2i+1)/(2m), (2j+1)/(2m)):
    // scaled by 2mn both offsets are integers, so the comparison below is
    // exact up to the single rounding of the squared radius.
    const std::int64_t n = grid.n();
    const std::int64_t m = spec.cells_per_side();
    const double scale = 2.0 * static_cast<double>(m) * static_cast<double>(n);
    const double r_scaled_sq = (r * scale) * (r * scale);
    const int reach = static_cast<int>(std::ceil(r * static_cast<double>(n))) + 1;

    for (const auto& cell : spec.cells()) {
        const std::int64_t cx = (2 * cell.i + 1) * n;  // centre times 2mn
        const std::int64_t cy = (2 * cell.j + 1) * n;
        const int ic = static_cast<int>(cx / (2 * m));
        const int jc = static_cast<int>(cy / (2 * m));
        for (int b = std::max(1, jc - reach); b <= std::min<int>(grid.n() - 1, jc + reach + 1); ++b)
            for (int a = std::max(1, ic - reach); a <= std::min<int>(grid.n() - 1, ic + reach + 1); ++a) {
                const std::int64_t dx = 2 * m * a - cx;
                const std::int64_t dy = 2 * m * b - cy;
                if (static_cast<double>(dx * dx + dy * dy) <= r_scaled_sq) mask.mark_hole(a, b);
            }
    }
    mask.validate();
    return mask;
}

ScalarField solve_on_mask(const DomainMask& mask, const ScalarField& source, double t_boundary,
                          const PerforatedOptions& options, CgReport* report) {
    if (!(options.rel_tol > 0.0)) throw InvalidConfig("perforated solve needs rel_tol > 0");
    if (!std::isfinite(t_boundary)) throw InvalidConfig("boundary temperature must be finite");
    require_same_grid(source, ScalarField(mask.grid()), "solve_perforated");
    // V = U - T vanishes on every Dirichlet node.
    ScalarField v = masked_cg_solve(mask, 0.0, source, CgOptions{options.rel_tol, options.jacobi}, report);
    auto cls = mask.classes();
    auto vs = v.values();
    for (std::size_t k = 0; k < vs.size(); ++k)
        vs[k] = cls[k] == NodeClass::Active ? vs[k] + t_boundary : t_boundary;
    return v;
}

ScalarField solve_perforated(const PerforationSpec& spec, const Grid2D& grid, const ScalarField& source,
                             double t_boundary, const PerforatedOptions& options, CgReport* report) {
    return solve_on_mask(build_mask(spec, grid), source, t_boundary, options, report);
}

ScalarField extend_into_holes(const ScalarField& u, const DomainMask& mask, double fill) {
    if (!(u.grid() == mask.grid())) throw ShapeError("extend_into_holes: field and mask grids differ");
    ScalarField out(u);
    auto cls = mask.classes();
    auto vs = out.values();
    for (std::size_t k = 0; k < vs.size(); ++k)
        if (cls[k] == NodeClass::HoleDirichlet) vs[k] = fill;
    return out;
}

} // namespace perfhom
