#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "qrmrecon/grid.hpp"

namespace qrmrecon {

/// Point source placed left of the scatterer.
struct SourceConfig {
    double x0 = -1.0;

    explicit SourceConfig(double position = -1.0) : x0(position) {
        if (!(x0 < 0.0)) throw InputError("SourceConfig: source must satisfy x0 < 0");
    }
};

/// Outgoing free-space field u0(x, x0, k) = exp(-ik|x - x0|) / (2ik).
inline Complex free_space_field(double x, double x0, double k) {
    if (!(k > 0.0)) throw InputError("free_space_field: k must be positive");
    const Complex two_ik(0.0, 2.0 * k);
    return std::exp(Complex(0.0, -k * std::abs(x - x0))) / two_ik;
}

/// Total field on [0,1] at one frequency, plus an evaluator valid on all of
/// the real line.
struct FieldSolution {
    GridFunction u;
    double k;
    std::function<Complex(double)> exterior_eval;

    Complex at_origin() const { return u[0]; }
};

/// Single-source backscattering data on a frequency grid.
/// g1 is always derived from g0 through g1 = 2ik(g0 - 1), so the pair can
/// never drift apart. log_g0 stays empty until the inversion side unwraps it.
struct BoundaryData {
    FrequencyGrid freq;
    double x0;
    std::vector<Complex> g0;
    std::vector<Complex> g1;
    std::vector<Complex> log_g0;

    BoundaryData(FrequencyGrid f, double source_x0, std::vector<Complex> g0_samples)
        : freq(f), x0(source_x0), g0(std::move(g0_samples)) {
        if (g0.size() != freq.n_nodes()) throw InputError("BoundaryData: node count mismatch");
        g1.resize(g0.size());
        for (std::size_t j = 0; j < g0.size(); ++j) {
            if (!std::isfinite(g0[j].real()) || !std::isfinite(g0[j].imag())) {
                throw InputError("BoundaryData: nonfinite g0 sample");
            }
            if (std::abs(g0[j]) == 0.0) {
                throw InputError("BoundaryData: g0 vanishes at a frequency node");
            }
            const double k = freq.node(j);
            g1[j] = Complex(0.0, 2.0 * k) * (g0[j] - Complex(1.0, 0.0));
        }
    }
};

namespace detail {

/// Shared kernel sample: exp(-ik|x - xi|) / (2i) scaled by k, i.e. the factor
/// multiplying beta(xi) P(xi) in the Lippmann-Schwinger integrand.
inline Complex ls_kernel(double x, double xi, double k) {
    return (k / Complex(0.0, 2.0)) * std::exp(Complex(0.0, -k * std::abs(x - xi)));
}

} // namespace detail

/// Solve the forward problem through the one-dimensional Lippmann-Schwinger
/// integral equation: trapezoid collocation on the profile grid, dense direct
/// solve of (I - K)P = u0, exterior evaluation through the integral identity.
inline FieldSolution solve_lippmann_schwinger(const MediumProfile& profile, double k,
                                              const SourceConfig& src = SourceConfig()) {
    if (!(k > 0.0)) throw InputError("solve_lippmann_schwinger: k must be positive");
    const SpatialGrid& grid = profile.grid;
    const auto n = static_cast<Eigen::Index>(grid.n_points());
    const auto wts = trapezoid_weights(grid);

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = grid.x(static_cast<std::size_t>(i));
        rhs(i) = free_space_field(xi, src.x0, k);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double beta = profile.c[ju] - 1.0;
            if (beta == 0.0) continue;
            A(i, j) -= wts[ju] * beta * detail::ls_kernel(xi, grid.x(ju), k);
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    Eigen::VectorXcd p = lu.solve(rhs);
    const double residual = (A * p - rhs).norm() / rhs.norm();
    if (!std::isfinite(residual) || residual > 1e-8) {
        std::ostringstream msg;
        msg << "solve_lippmann_schwinger: ill-conditioned system, relative residual "
            << residual;
        throw SolverError(msg.str());
    }

    std::vector<Complex> values(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = p(i);
    GridFunction u(grid, values);

    auto beta_p = std::make_shared<std::vector<Complex>>(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < beta_p->size(); ++j) {
        (*beta_p)[j] = (profile.c[j] - 1.0) * values[j] * wts[j];
    }
    const double x0 = src.x0;
    auto eval = [grid, beta_p, k, x0](double x) {
        Complex acc = free_space_field(x, x0, k);
        for (std::size_t j = 0; j < beta_p->size(); ++j) {
            acc += detail::ls_kernel(x, grid.x(j), k) * (*beta_p)[j];
        }
        return acc;
    };

    return FieldSolution{std::move(u), k, eval};
}

/// Independent oracle: second-order finite differences for the Helmholtz
/// problem on the extended interval [x0 - 1, 2], with discrete radiation
/// conditions eliminated through ghost nodes and the point source realized
/// as 1/spacing at the nearest node. Returns the restriction to [0,1] on the
/// profile grid.
inline FieldSolution solve_helmholtz_fd(const MediumProfile& profile, double k,
                                        const SourceConfig& src = SourceConfig(),
                                        std::size_t n_extended = 1601) {
    if (!(k > 0.0)) throw InputError("solve_helmholtz_fd: k must be positive");
    if (n_extended < 9) throw InputError("solve_helmholtz_fd: extended grid too coarse");
    const double xl = src.x0 - 1.0;
    const double xr = 2.0;
    const std::size_t ne = n_extended;
    const double hs = (xr - xl) / static_cast<double>(ne - 1);

    std::vector<double> cx(ne);
    for (std::size_t i = 0; i < ne; ++i) {
        cx[i] = profile.interpolate(xl + static_cast<double>(i) * hs);
    }
    const auto i0 = static_cast<std::size_t>(std::llround((src.x0 - xl) / hs));

    // Tridiagonal rows of u'' + k^2 c u = -delta; ghost elimination keeps the
    // radiation closures second-order accurate.
    std::vector<Complex> lower(ne, 0.0), diag(ne, 0.0), upper(ne, 0.0), rhs(ne, 0.0);
    const double inv_h2 = 1.0 / (hs * hs);
    for (std::size_t i = 1; i + 1 < ne; ++i) {
        lower[i] = inv_h2;
        diag[i] = -2.0 * inv_h2 + k * k * cx[i];
        upper[i] = inv_h2;
    }
    rhs[i0] = Complex(-1.0 / hs, 0.0);
    // Left end: u' - iku = 0  ->  ghost = u1 - 2ikh*u0.
    diag[0] = Complex(-2.0, -2.0 * k * hs) * inv_h2 + k * k * cx[0];
    upper[0] = 2.0 * inv_h2;
    // Right end: u' + iku = 0  ->  ghost = u_{n-2} - 2ikh*u_{n-1}.
    diag[ne - 1] = Complex(-2.0, -2.0 * k * hs) * inv_h2 + k * k * cx[ne - 1];
    lower[ne - 1] = 2.0 * inv_h2;

    // Thomas algorithm.
    std::vector<Complex> cp(ne), dp(ne);
    Complex den = diag[0];
    if (std::abs(den) == 0.0) throw SolverError("solve_helmholtz_fd: singular system");
    cp[0] = upper[0] / den;
    dp[0] = rhs[0] / den;
    for (std::size_t i = 1; i < ne; ++i) {
        den = diag[i] - lower[i] * cp[i - 1];
        if (std::abs(den) == 0.0) throw SolverError("solve_helmholtz_fd: singular system");
        cp[i] = upper[i] / den;
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / den;
    }
    auto uext = std::make_shared<std::vector<Complex>>(ne);
    (*uext)[ne - 1] = dp[ne - 1];
    for (std::size_t i = ne - 1; i-- > 0;) {
        (*uext)[i] = dp[i] - cp[i] * (*uext)[i + 1];
    }

    auto eval = [uext, xl, hs, ne](double x) {
        double t = (x - xl) / hs;
        t = std::min(std::max(t, 0.0), static_cast<double>(ne - 1));
        const auto i = std::min(static_cast<std::size_t>(t), ne - 2);
        const double w = t - static_cast<double>(i);
        return (1.0 - w) * (*uext)[i] + w * (*uext)[i + 1];
    };

    const SpatialGrid& grid = profile.grid;
    std::vector<Complex> values(grid.n_points());
    for (std::size_t i = 0; i < grid.n_points(); ++i) values[i] = eval(grid.x(i));
    return FieldSolution{GridFunction(grid, std::move(values)), k, eval};
}

/// Run the forward solver on every frequency node and form the inverse-problem
/// data g0(k) = u(0)/u0(0), g1(k) = 2ik(g0 - 1).
inline BoundaryData extract_boundary_data(const MediumProfile& profile, const FrequencyGrid& freq,
                                          const SourceConfig& src = SourceConfig()) {
    std::vector<Complex> g0(freq.n_nodes());
    for (std::size_t j = 0; j < freq.n_nodes(); ++j) {
        const double k = freq.node(j);
        const FieldSolution sol = solve_lippmann_schwinger(profile, k, src);
        const Complex u00 = free_space_field(0.0, src.x0, k);
        g0[j] = sol.at_origin() / u00;
        if (std::abs(g0[j]) == 0.0) {
            std::ostringstream msg;
            msg << "extract_boundary_data: g0 vanished at k = " << k;
            throw SolverError(msg.str());
        }
    }
    return BoundaryData(freq, src.x0, std::move(g0));
}

namespace detail {

/// Uniform double in [0,1) built directly from engine output so the stream is
/// independent of the standard library's distribution internals.
inline double canonical(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline Complex unit_disc_sample(std::mt19937_64& eng) {
    while (true) {
        const double re = 2.0 * canonical(eng) - 1.0;
        const double im = 2.0 * canonical(eng) - 1.0;
        if (re * re + im * im <= 1.0) return {re, im};
    }
}

} // namespace detail

/// Multiplicative complex noise: g0 -> g0 * (1 + level * zeta) with zeta
/// uniform in the unit disc; g1 is rebuilt from the noisy g0.
inline BoundaryData add_noise(const BoundaryData& data, double level, std::uint64_t rng_seed) {
    if (level < 0.0) throw InputError("add_noise: level must be nonnegative");
    if (level == 0.0) return data;
    std::mt19937_64 eng(rng_seed);
    std::vector<Complex> g0(data.g0.size());
    for (std::size_t j = 0; j < g0.size(); ++j) {
        g0[j] = data.g0[j] * (Complex(1.0, 0.0) + level * detail::unit_disc_sample(eng));
    }
    return BoundaryData(data.freq, data.x0, std::move(g0));
}

} // namespace qrmrecon
