/// @file oracles.hpp
/// @brief Test-only reference computations. Nothing here calls into the
///        solvers under test: systems are assembled from the stencil
///        definition and solved by direct elimination.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Dense Gaussian elimination with partial pivoting; a is row-major N x N.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) throw std::runtime_error("singular matrix");
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return x;
}

/// Interior unknowns of an n-cell grid, row-major over 1..n-1.
struct InteriorIndex {
    int n;
    std::size_t operator()(int i, int j) const {
        return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(n - 1) + static_cast<std::size_t>(i - 1);
    }
    std::size_t size() const { return static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(n - 1); }
};

/// Dense solve of (-Delta_h + shift) v = f on the full square, v = 0 on
/// the boundary. Returns interior values in InteriorIndex order.
inline std::vector<double> dense_helmholtz(int n, double shift, const std::function<double(int, int)>& f) {
    const InteriorIndex idx{n};
    const std::size_t N = idx.size();
    const double h = 1.0 / n;
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> a(N * N, 0.0), b(N, 0.0);
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const std::size_t r = idx(i, j);
            a[r * N + r] = 4.0 * inv_h2 + shift;
            b[r] = f(i, j);
            const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
            for (const auto& q : nb)
                if (q[0] >= 1 && q[0] <= n - 1 && q[1] >= 1 && q[1] <= n - 1)
                    a[r * N + idx(q[0], q[1])] = -inv_h2;
        }
    return dense_solve(std::move(a), std::move(b));
}

/// Banded Cholesky solve of (-Delta_h + shift) v = f over the interior nodes where
/// unknown(i, j) holds; every other node is a homogeneous Dirichlet node.
/// Returns interior values (zero at Dirichlet nodes) in InteriorIndex order.
inline std::vector<double> banded_masked_poisson(int n, const std::function<bool(int, int)>& unknown,
                                                 const std::function<double(int, int)>& f, double shift = 0.0) {
    const InteriorIndex idx{n};
    const std::size_t N = idx.size();
    const std::size_t bw = static_cast<std::size_t>(n - 1);
    const double h = 1.0 / n;
    const double inv_h2 = 1.0 / (h * h);
    // band[r][d] = A(r, r - d) for d in [0, bw].
    std::vector<double> band(N * (bw + 1), 0.0), b(N, 0.0);
    auto at = [&](std::size_t r, std::size_t d) -> double& { return band[r * (bw + 1) + d]; };
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const std::size_t r = idx(i, j);
            if (!unknown(i, j)) {
                at(r, 0) = 1.0;
                continue;
            }
            at(r, 0) = 4.0 * inv_h2 + shift;
            b[r] = f(i, j);
            if (i > 1 && unknown(i - 1, j)) at(r, 1) = -inv_h2;
            if (j > 1 && unknown(i, j - 1)) at(r, bw) = -inv_h2;
        }
    // In-place Cholesky of the band.
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t d = std::min(bw, r); d >= 1; --d) {
            const std::size_t c = r - d;
            double s = at(r, d);
            for (std::size_t k = 1; k + d <= bw && k <= c; ++k)
                if (c >= k) s -= at(r, d + k) * at(c, k);
            at(r, d) = s / at(c, 0);
        }
        double s = at(r, 0);
        for (std::size_t k = 1; k <= std::min(bw, r); ++k) s -= at(r, k) * at(r, k);
        if (s <= 0.0) throw std::runtime_error("matrix not SPD");
        at(r, 0) = std::sqrt(s);
    }
    std::vector<double> y(N);
    for (std::size_t r = 0; r < N; ++r) {
        double s = b[r];
        for (std::size_t k = 1; k <= std::min(bw, r); ++k) s -= at(r, k) * y[r - k];
        y[r] = s / at(r, 0);
    }
    std::vector<double> x(N);
    for (std::size_t r = N; r-- > 0;) {
        double s = y[r];
        for (std::size_t k = 1; k <= bw && r + k < N; ++k) s -= at(r + k, k) * x[r + k];
        x[r] = s / at(r, 0);
    }
    return x;
}

/// sin(pi i h) sin(pi j h)
inline double sine_mode(int n, int i, int j) {
    const double h = 1.0 / n;
    return std::sin(std::numbers::pi * i * h) * std::sin(std::numbers::pi * j * h);
}

/// (8 / h^2) sin^2(pi h / 2), evaluated here independently of the library.
inline double lambda1(int n) {
    const double h = 1.0 / n;
    const double s = std::sin(std::numbers::pi * h / 2.0);
    return 8.0 / (h * h) * s * s;
}

} // namespace oracle
