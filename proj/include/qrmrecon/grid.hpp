#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Sparse>

#include "qrmrecon/errors.hpp"

namespace qrmrecon {

using Complex = std::complex<double>;

/// Uniform grid of n_points nodes on the unit interval, x_i = i * spacing.
class SpatialGrid {
public:
    explicit SpatialGrid(std::size_t n_points) : n_(n_points) {
        if (n_points < 5) {
            throw InputError("SpatialGrid: need at least 5 points");
        }
    }

    std::size_t n_points() const { return n_; }
    double x_min() const { return 0.0; }
    double x_max() const { return 1.0; }
    double spacing() const { return 1.0 / static_cast<double>(n_ - 1); }
    double x(std::size_t i) const { return static_cast<double>(i) * spacing(); }

    std::vector<double> nodes() const {
        std::vector<double> xs(n_);
        for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
        return xs;
    }

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
        return a.n_ == b.n_;
    }

private:
    std::size_t n_;
};

/// Descending frequency nodes k_0 = k_max > k_1 > ... > k_N = k_min with
/// uniform step h. N must divide the band width exactly.
class FrequencyGrid {
public:
    FrequencyGrid(double k_min, double k_max, double step)
        : k_min_(k_min), k_max_(k_max), h_(step) {
        if (!(k_min > 0.0)) throw InputError("FrequencyGrid: k_min must be positive");
        if (!(k_max > k_min)) throw InputError("FrequencyGrid: k_max must exceed k_min");
        if (!(step > 0.0)) throw InputError("FrequencyGrid: step must be positive");
        const double ratio = (k_max - k_min) / step;
        const double rounded = std::round(ratio);
        if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) {
            throw InputError("FrequencyGrid: (k_max - k_min) must be an integer multiple of step");
        }
        intervals_ = static_cast<std::size_t>(rounded);
    }

    double k_min() const { return k_min_; }
    double k_max() const { return k_max_; }
    double step() const { return h_; }
    /// Number of subintervals N; there are N + 1 nodes.
    std::size_t intervals() const { return intervals_; }
    std::size_t n_nodes() const { return intervals_ + 1; }
    /// Node j in descending order: node(0) = k_max, node(N) = k_min.
    double node(std::size_t j) const { return k_max_ - static_cast<double>(j) * h_; }

    std::vector<double> nodes() const {
        std::vector<double> ks(n_nodes());
        for (std::size_t j = 0; j < ks.size(); ++j) ks[j] = node(j);
        return ks;
    }

    friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
        return a.k_min_ == b.k_min_ && a.k_max_ == b.k_max_ && a.h_ == b.h_;
    }

private:
    double k_min_, k_max_, h_;
    std::size_t intervals_;
};

/// Complex-valued samples on a SpatialGrid. Immutable by convention: all
/// operations return fresh instances.
struct GridFunction {
    SpatialGrid grid;
    std::vector<Complex> values;

    GridFunction(SpatialGrid g, std::vector<Complex> v)
        : grid(g), values(std::move(v)) {
        if (values.size() != grid.n_points()) {
            throw InputError("GridFunction: value count does not match grid");
        }
        for (const auto& z : values) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw InputError("GridFunction: nonfinite entry");
            }
        }
    }

    static GridFunction zero(const SpatialGrid& g) {
        return GridFunction(g, std::vector<Complex>(g.n_points(), Complex(0.0, 0.0)));
    }

    std::size_t size() const { return values.size(); }
    const Complex& operator[](std::size_t i) const { return values[i]; }
};

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid == b.grid)) throw InputError("GridFunction: grid mismatch");
    std::vector<Complex> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] + b.values[i];
    return GridFunction(a.grid, std::move(v));
}

inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid == b.grid)) throw InputError("GridFunction: grid mismatch");
    std::vector<Complex> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] - b.values[i];
    return GridFunction(a.grid, std::move(v));
}

inline GridFunction operator*(Complex s, const GridFunction& f) {
    std::vector<Complex> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * f.values[i];
    return GridFunction(f.grid, std::move(v));
}

/// Real dielectric profile c(x) with admissible bounds [c_lo, c_hi].
/// c equals 1 at both endpoints, consistent with the scatterer being
/// confined to the open unit interval.
struct MediumProfile {
    SpatialGrid grid;
    std::vector<double> c;
    double c_lo;
    double c_hi;

    MediumProfile(SpatialGrid g, std::vector<double> samples, double lo, double hi)
        : grid(g), c(std::move(samples)), c_lo(lo), c_hi(hi) {
        if (c.size() != grid.n_points()) throw InputError("MediumProfile: sample count mismatch");
        if (!(c_lo > 0.0)) throw InputError("MediumProfile: c_lo must be positive");
        if (!(c_hi >= c_lo)) throw InputError("MediumProfile: c_hi must be >= c_lo");
        for (double v : c) {
            if (!std::isfinite(v)) throw InputError("MediumProfile: nonfinite sample");
            if (v < c_lo - 1e-12 || v > c_hi + 1e-12) {
                throw InputError("MediumProfile: sample outside [c_lo, c_hi]");
            }
        }
        if (std::abs(c.front() - 1.0) > 1e-12 || std::abs(c.back() - 1.0) > 1e-12) {
            throw InputError("MediumProfile: c must equal 1 at both endpoints");
        }
    }

    static MediumProfile from_samples(SpatialGrid g, std::vector<double> samples) {
        double lo = 1.0, hi = 1.0;
        for (double v : samples) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return MediumProfile(g, std::move(samples), std::min(lo, 1.0), std::max(hi, 1.0));
    }

    static MediumProfile homogeneous(SpatialGrid g) {
        return MediumProfile(g, std::vector<double>(g.n_points(), 1.0), 1.0, 1.0);
    }

    /// Step inclusion: c = value on the open interval (a, b), 1 elsewhere.
    static MediumProfile step(SpatialGrid g, double value, double a, double b) {
        std::vector<double> samples(g.n_points(), 1.0);
        for (std::size_t i = 0; i < g.n_points(); ++i) {
            const double x = g.x(i);
            if (x > a && x < b) samples[i] = value;
        }
        return from_samples(g, std::move(samples));
    }

    /// c(x) with linear interpolation inside [0,1] and c = 1 outside.
    double interpolate(double x) const {
        if (x <= 0.0 || x >= 1.0) return 1.0;
        const double s = grid.spacing();
        const double t = x / s;
        const std::size_t i = std::min(static_cast<std::size_t>(t), grid.n_points() - 2);
        const double w = t - static_cast<double>(i);
        return (1.0 - w) * c[i] + w * c[i + 1];
    }

    GridFunction beta() const {
        std::vector<Complex> v(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) v[i] = Complex(c[i] - 1.0, 0.0);
        return GridFunction(grid, std::move(v));
    }
};

// ---------------------------------------------------------------------------
// Finite-difference calculus. Central second-order stencils inside, one-sided
// second-order at the endpoints; both operators are exact for quadratics.
// ---------------------------------------------------------------------------

/// First derivative.
inline GridFunction diff1(const GridFunction& f) {
    const std::size_t n = f.size();
    if (n < 3) throw InputError("diff1: need at least 3 points");
    const double s = f.grid.spacing();
    std::vector<Complex> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * s);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * s);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * s);
    return GridFunction(f.grid, std::move(d));
}

/// Second derivative.
inline GridFunction diff2(const GridFunction& f) {
    const std::size_t n = f.size();
    if (n < 4) throw InputError("diff2: need at least 4 points");
    const double s2 = f.grid.spacing() * f.grid.spacing();
    std::vector<Complex> d(n);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / s2;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / s2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / s2;
    return GridFunction(f.grid, std::move(d));
}

/// Composite trapezoid rule over [0,1]; exact for linear integrands.
inline Complex trapezoid(const GridFunction& f) {
    const std::size_t n = f.size();
    const double s = f.grid.spacing();
    Complex sum = 0.5 * (f[0] + f[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) sum += f[i];
    return s * sum;
}

/// Trapezoid quadrature weights: s/2 at the ends, s inside.
inline std::vector<double> trapezoid_weights(const SpatialGrid& g) {
    std::vector<double> w(g.n_points(), g.spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

/// L2(0,1) norm via trapezoid weights.
inline double l2_norm(const GridFunction& f) {
    const auto w = trapezoid_weights(f.grid);
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * std::norm(f[i]);
    return std::sqrt(sum);
}

inline double rel_l2_error(const GridFunction& approx, const GridFunction& reference) {
    return l2_norm(approx - reference) / l2_norm(reference);
}

// ---------------------------------------------------------------------------
// Sparse operator matrices. The stencils are the same ones diff1/diff2 apply;
// the QRM assembly reuses these so its boundary rows match the grid calculus
// exactly.
// ---------------------------------------------------------------------------

using SparseC = Eigen::SparseMatrix<Complex>;
using SparseR = Eigen::SparseMatrix<double>;

inline SparseR diff1_matrix(const SpatialGrid& g) {
    const auto n = static_cast<Eigen::Index>(g.n_points());
    const double s = g.spacing();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(3 * n));
    t.emplace_back(0, 0, -3.0 / (2.0 * s));
    t.emplace_back(0, 1, 4.0 / (2.0 * s));
    t.emplace_back(0, 2, -1.0 / (2.0 * s));
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        t.emplace_back(i, i - 1, -1.0 / (2.0 * s));
        t.emplace_back(i, i + 1, 1.0 / (2.0 * s));
    }
    t.emplace_back(n - 1, n - 1, 3.0 / (2.0 * s));
    t.emplace_back(n - 1, n - 2, -4.0 / (2.0 * s));
    t.emplace_back(n - 1, n - 3, 1.0 / (2.0 * s));
    SparseR m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

inline SparseR diff2_matrix(const SpatialGrid& g) {
    const auto n = static_cast<Eigen::Index>(g.n_points());
    const double s2 = g.spacing() * g.spacing();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(4 * n));
    t.emplace_back(0, 0, 2.0 / s2);
    t.emplace_back(0, 1, -5.0 / s2);
    t.emplace_back(0, 2, 4.0 / s2);
    t.emplace_back(0, 3, -1.0 / s2);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        t.emplace_back(i, i - 1, 1.0 / s2);
        t.emplace_back(i, i, -2.0 / s2);
        t.emplace_back(i, i + 1, 1.0 / s2);
    }
    t.emplace_back(n - 1, n - 1, 2.0 / s2);
    t.emplace_back(n - 1, n - 2, -5.0 / s2);
    t.emplace_back(n - 1, n - 3, 4.0 / s2);
    t.emplace_back(n - 1, n - 4, -1.0 / s2);
    SparseR m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

/// Forward difference quotient with a backward closure in the last row.
inline SparseR forward_diff_matrix(const SpatialGrid& g) {
    const auto n = static_cast<Eigen::Index>(g.n_points());
    const double s = g.spacing();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(2 * n));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        t.emplace_back(i, i, -1.0 / s);
        t.emplace_back(i, i + 1, 1.0 / s);
    }
    t.emplace_back(n - 1, n - 2, -1.0 / s);
    t.emplace_back(n - 1, n - 1, 1.0 / s);
    SparseR m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

} // namespace qrmrecon
