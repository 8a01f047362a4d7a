#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "qrmrecon/grid.hpp"

namespace qrmrecon {

/// Overdetermined boundary-value problem
///   Lw = w'' + a(x) w' + b(x) w = d(x)  on (0,1),
///   w(0) = p0,  w'(0) = p1,  w'(1) = 0,
/// regularized by minimizing
///   J_alpha(w) = 1/2 ( ||Lw - d||_{L2}^2 + alpha ||w - shift||_{H3}^2 ).
///
/// With the default empty shift the penalty is the plain H3 norm of w. The
/// inversion pipeline passes the affine boundary lift as shift so that
/// problems whose exact solution is that lift (e.g. a constant field in a
/// scatterer-free medium) are solved exactly, not merely to O(alpha).
struct QrmProblem {
    GridFunction a;
    GridFunction b;
    GridFunction d;
    Complex p0;
    Complex p1;
    double alpha;
    std::optional<GridFunction> penalty_shift;

    QrmProblem(GridFunction a_, GridFunction b_, GridFunction d_, Complex p0_, Complex p1_,
               double alpha_, std::optional<GridFunction> shift = std::nullopt)
        : a(std::move(a_)), b(std::move(b_)), d(std::move(d_)), p0(p0_), p1(p1_),
          alpha(alpha_), penalty_shift(std::move(shift)) {
        if (!(a.grid == b.grid) || !(a.grid == d.grid)) {
            throw InputError("QrmProblem: coefficient grids disagree");
        }
        if (!(alpha > 0.0) || alpha > 1.0) {
            throw InputError("QrmProblem: alpha must lie in (0, 1]");
        }
        if (penalty_shift && !(penalty_shift->grid == a.grid)) {
            throw InputError("QrmProblem: penalty shift grid mismatch");
        }
    }
};

/// Regularized solution plus diagnostics.
struct QrmSolution {
    GridFunction w;
    double residual_l2;
    double penalty_h3;
    double functional_value;
};

/// C2 quintic blend: 1 on [0, 1/2], 0 on [3/4, 1].
inline double cutoff_chi(double x) {
    if (x <= 0.5) return 1.0;
    if (x >= 0.75) return 0.0;
    const double t = (x - 0.5) / 0.25;
    // Unique quintic with value 1,0 and zero first/second derivatives at the ends.
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

/// Member of the affine boundary space: chi(x) (p0 + p1 x). Satisfies
/// w(0) = p0, w'(0) = p1, w'(1) = 0.
inline GridFunction lift_boundary(Complex p0, Complex p1, const SpatialGrid& grid) {
    std::vector<Complex> v(grid.n_points());
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        const double x = grid.x(i);
        v[i] = cutoff_chi(x) * (p0 + p1 * x);
    }
    return GridFunction(grid, std::move(v));
}

/// Lift used as the default penalty reference in the inversion pipeline:
/// p0 + p1 * x * chi(x). Unlike lift_boundary it reduces to the constant p0
/// when p1 = 0, which is what makes scatterer-free problems solve exactly.
inline GridFunction lift_affine(Complex p0, Complex p1, const SpatialGrid& grid) {
    std::vector<Complex> v(grid.n_points());
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        const double x = grid.x(i);
        v[i] = p0 + p1 * x * cutoff_chi(x);
    }
    return GridFunction(grid, std::move(v));
}

namespace detail {

/// Gram matrix of the discrete H3 inner product: sum over the function and
/// its first three forward difference quotients, each measured in the
/// trapezoid-weighted L2 norm.
inline SparseR h3_gram(const SpatialGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.n_points());
    const SparseR f = forward_diff_matrix(grid);
    const auto wts = trapezoid_weights(grid);
    SparseR m(n, n);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        t.emplace_back(i, i, wts[static_cast<std::size_t>(i)]);
    }
    m.setFromTriplets(t.begin(), t.end());

    SparseR gram = m;
    SparseR power(n, n);
    power.setIdentity();
    for (int order = 1; order <= 3; ++order) {
        power = (f * power).pruned();
        gram += SparseR(power.transpose() * m * power);
    }
    return gram;
}

inline Eigen::VectorXcd to_eigen(const GridFunction& f) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i];
    return v;
}

} // namespace detail

/// Discrete H3(0,1) norm: function plus first three difference quotients.
inline double h3_norm(const GridFunction& f) {
    if (f.size() < 5) throw InputError("h3_norm: need at least 5 points");
    const SparseR gram = detail::h3_gram(f.grid);
    const Eigen::VectorXcd v = detail::to_eigen(f);
    const double q = (v.adjoint() * (gram * v)).real()(0);
    return std::sqrt(std::max(q, 0.0));
}

/// Discrete H2(0,1) norm (function plus first two difference quotients);
/// used by convergence-rate diagnostics and tests.
inline double h2_norm(const GridFunction& f) {
    if (f.size() < 4) throw InputError("h2_norm: need at least 4 points");
    const SparseR fwd = forward_diff_matrix(f.grid);
    const auto wts = trapezoid_weights(f.grid);
    Eigen::VectorXcd v = detail::to_eigen(f);
    double sum = 0.0;
    for (int order = 0; order <= 2; ++order) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            sum += wts[static_cast<std::size_t>(i)] * std::norm(v(i));
        }
        v = fwd * v;
    }
    return std::sqrt(sum);
}

/// Minimize J_alpha over the affine space W.
///
/// The three boundary conditions are eliminated exactly: w(0) is pinned and
/// the second-order one-sided derivative rows at x = 0 and x = 1 determine
/// w_1 and w_{n-1} from their neighbors, leaving the free interior nodes as
/// unknowns. The complex normal equations are expanded into the equivalent
/// real symmetric positive-definite system (real and imaginary parts split,
/// dimension twice the free-node count) and solved by sparse Cholesky.
inline QrmSolution qrm_solve(const QrmProblem& prob) {
    const SpatialGrid& grid = prob.a.grid;
    const auto n = static_cast<Eigen::Index>(grid.n_points());
    const double s = grid.spacing();
    const auto m = n - 3; // free unknowns: nodes 2 .. n-2

    // Operator matrix A = D2 + diag(a) D1 + diag(b).
    SparseC op = diff2_matrix(grid).cast<Complex>();
    {
        const SparseR d1 = diff1_matrix(grid);
        std::vector<Eigen::Triplet<Complex>> t;
        t.reserve(static_cast<std::size_t>(d1.nonZeros()) + static_cast<std::size_t>(n));
        for (Eigen::Index col = 0; col < n; ++col) {
            for (SparseR::InnerIterator it(d1, col); it; ++it) {
                t.emplace_back(it.row(), it.col(),
                               prob.a[static_cast<std::size_t>(it.row())] * it.value());
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            t.emplace_back(i, i, prob.b[static_cast<std::size_t>(i)]);
        }
        SparseC extra(n, n);
        extra.setFromTriplets(t.begin(), t.end());
        op += extra;
    }

    // Affine parameterization w = w_part + B z enforcing
    //   w_0 = p0,
    //   (-3 w_0 + 4 w_1 - w_2) / 2s = p1   ->  w_1 = (2s p1 + 3 p0 + w_2) / 4,
    //   (3 w_{n-1} - 4 w_{n-2} + w_{n-3}) / 2s = 0
    //                                      ->  w_{n-1} = (4 w_{n-2} - w_{n-3}) / 3.
    SparseR basis(n, m);
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(m) + 3);
        for (Eigen::Index j = 0; j < m; ++j) t.emplace_back(j + 2, j, 1.0);
        t.emplace_back(1, 0, 0.25);
        t.emplace_back(n - 1, m - 1, 4.0 / 3.0);
        t.emplace_back(n - 1, m - 2, -1.0 / 3.0);
        basis.setFromTriplets(t.begin(), t.end());
    }
    Eigen::VectorXcd w_part = Eigen::VectorXcd::Zero(n);
    w_part(0) = prob.p0;
    w_part(1) = 0.25 * (2.0 * s * prob.p1 + 3.0 * prob.p0);

    // Weighted residual and penalty quadratic forms.
    const auto wts = trapezoid_weights(grid);
    SparseR mass(n, n);
    {
        std::vector<Eigen::Triplet<double>> t;
        for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, wts[static_cast<std::size_t>(i)]);
        mass.setFromTriplets(t.begin(), t.end());
    }
    const SparseR gram = detail::h3_gram(grid);

    const Eigen::VectorXcd dvec = detail::to_eigen(prob.d);
    Eigen::VectorXcd shift = Eigen::VectorXcd::Zero(n);
    if (prob.penalty_shift) shift = detail::to_eigen(*prob.penalty_shift);

    const SparseC mass_c = mass.cast<Complex>();
    const SparseR gram_scaled = prob.alpha * gram;
    const SparseC gram_c = gram_scaled.cast<Complex>();
    const SparseC basis_c = basis.cast<Complex>();
    const SparseC a_basis = op * basis_c;
    const SparseC hess_c = SparseC(a_basis.adjoint() * SparseC(mass_c * a_basis)) +
                           SparseC(basis_c.adjoint() * SparseC(gram_c * basis_c));
    const Eigen::VectorXcd rhs_c =
        a_basis.adjoint() * (mass_c * (dvec - op * w_part)) +
        basis_c.adjoint() * (gram_c * (shift - w_part));

    // Real split: for Hermitian H, [Re H, -Im H; Im H, Re H] is symmetric PD.
    SparseR hess(2 * m, 2 * m);
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(4 * static_cast<std::size_t>(hess_c.nonZeros()));
        for (Eigen::Index col = 0; col < m; ++col) {
            for (SparseC::InnerIterator it(hess_c, col); it; ++it) {
                const double re = it.value().real();
                const double im = it.value().imag();
                t.emplace_back(it.row(), it.col(), re);
                t.emplace_back(it.row() + m, it.col() + m, re);
                if (im != 0.0) {
                    t.emplace_back(it.row(), it.col() + m, -im);
                    t.emplace_back(it.row() + m, it.col(), im);
                }
            }
        }
        hess.setFromTriplets(t.begin(), t.end());
    }
    Eigen::VectorXd rhs(2 * m);
    rhs.head(m) = rhs_c.real();
    rhs.tail(m) = rhs_c.imag();

    Eigen::SimplicialLDLT<SparseR> solver(hess);
    if (solver.info() != Eigen::Success) {
        throw SolverError("qrm_solve: normal equations are not SPD (assembly bug)");
    }
    const Eigen::VectorXd z_split = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
        throw SolverError("qrm_solve: sparse Cholesky solve failed");
    }

    Eigen::VectorXcd z(m);
    z.real() = z_split.head(m);
    z.imag() = z_split.tail(m);
    const Eigen::VectorXcd w_full = w_part + basis.cast<Complex>() * z;

    std::vector<Complex> values(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = w_full(i);
    GridFunction w(grid, std::move(values));

    const Eigen::VectorXcd res = op * w_full - dvec;
    const Eigen::VectorXcd dev = w_full - shift;
    const SparseC gram_plain = gram.cast<Complex>();
    const double res_l2 = std::sqrt(std::max(0.0, (res.adjoint() * (mass_c * res)).real()(0)));
    const double pen_h3 = std::sqrt(std::max(0.0, (dev.adjoint() * (gram_plain * dev)).real()(0)));
    const double value = 0.5 * (res_l2 * res_l2 + prob.alpha * pen_h3 * pen_h3);
    return QrmSolution{std::move(w), res_l2, pen_h3, value};
}

} // namespace qrmrecon
