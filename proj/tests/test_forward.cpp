#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qrmrecon/forward.hpp"

using namespace qrmrecon;
using Catch::Approx;

namespace {

GridFunction free_field_on(const SpatialGrid& g, double x0, double k) {
    std::vector<Complex> v(g.n_points());
    for (std::size_t i = 0; i < g.n_points(); ++i) v[i] = free_space_field(g.x(i), x0, k);
    return GridFunction(g, std::move(v));
}

} // namespace

TEST_CASE("free-space field closed form") {
    // |x - x0| = 0 gives 1/(2ik).
    CHECK(free_space_field(-1.0, -1.0, 1.0) == Complex(0.0, -0.5));
    const Complex expected = std::exp(Complex(0.0, -1.0)) / Complex(0.0, 2.0);
    CHECK(std::abs(free_space_field(0.0, -1.0, 1.0) - expected) < 1e-15);
    for (double x : {-2.0, -0.3, 0.7, 1.9}) {
        CHECK(std::abs(free_space_field(x, -1.0, 0.8)) == Approx(1.0 / 1.6));
    }
    CHECK_THROWS_AS(free_space_field(0.0, -1.0, 0.0), InputError);
}

TEST_CASE("Lippmann-Schwinger reduces to the free field for beta = 0") {
    SpatialGrid g(201);
    auto profile = MediumProfile::homogeneous(g);
    for (double k : {0.5, 1.0, 1.5}) {
        auto sol = solve_lippmann_schwinger(profile, k);
        auto u0 = free_field_on(g, -1.0, k);
        for (std::size_t i = 0; i < g.n_points(); ++i) {
            CHECK(std::abs(sol.u[i] - u0[i]) < 1e-12);
        }
    }
}

TEST_CASE("finite-difference oracle matches the analytic free field") {
    SpatialGrid g(201);
    auto profile = MediumProfile::homogeneous(g);
    for (double k : {0.5, 1.5}) {
        auto sol = solve_helmholtz_fd(profile, k, SourceConfig(), 1601);
        auto u0 = free_field_on(g, -1.0, k);
        CHECK(rel_l2_error(sol.u, u0) < 1e-4);
    }
}

TEST_CASE("finite-difference oracle refines at second order") {
    SpatialGrid g(201);
    auto profile = MediumProfile::homogeneous(g);
    const double k = 1.0;
    auto u0 = free_field_on(g, -1.0, k);
    const double e1 = rel_l2_error(solve_helmholtz_fd(profile, k, SourceConfig(), 801).u, u0);
    const double e2 = rel_l2_error(solve_helmholtz_fd(profile, k, SourceConfig(), 1601).u, u0);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("the two forward solvers cross-validate on step inclusions") {
    SpatialGrid g(201);
    struct Case {
        double target;
        double k;
    };
    for (auto [target, k] : {Case{4.0, 1.0}, Case{7.0, 1.5}, Case{10.0, 0.5}}) {
        auto profile = MediumProfile::step(g, target, 0.25, 1.0 / 3.0);
        auto ls = solve_lippmann_schwinger(profile, k);
        auto fd = solve_helmholtz_fd(profile, k);
        CHECK(rel_l2_error(ls.u, fd.u) < 1e-3);
    }
}

TEST_CASE("scattered field is outgoing left of the source-free region") {
    SpatialGrid g(201);
    auto profile = MediumProfile::step(g, 4.0, 0.25, 1.0 / 3.0);
    const double k = 1.1;
    auto sol = solve_lippmann_schwinger(profile, k);

    auto scattered = [&](double x) {
        return sol.exterior_eval(x) - free_space_field(x, -1.0, k);
    };
    const double xa = -0.5, xb = -0.25;
    const Complex b_fit = scattered(xa) * std::exp(Complex(0.0, -k * xa));
    const Complex resid = scattered(xb) - b_fit * std::exp(Complex(0.0, k * xb));
    CHECK(std::abs(resid) < 1e-8);

    // |B| independent of the probe pair.
    const Complex b_fit2 = scattered(-0.8) * std::exp(Complex(0.0, -k * (-0.8)));
    CHECK(std::abs(std::abs(b_fit) - std::abs(b_fit2)) < 1e-8);
}

TEST_CASE("exterior evaluation agrees with the grid solution") {
    SpatialGrid g(201);
    auto profile = MediumProfile::step(g, 4.0, 0.25, 1.0 / 3.0);
    auto sol = solve_lippmann_schwinger(profile, 1.0);
    for (std::size_t i : {0ul, 77ul, 200ul}) {
        CHECK(std::abs(sol.exterior_eval(g.x(i)) - sol.u[i]) < 1e-10);
    }
}

TEST_CASE("boundary data for the homogeneous medium") {
    SpatialGrid g(201);
    FrequencyGrid freq(0.5, 1.5, 0.02);
    auto data = extract_boundary_data(MediumProfile::homogeneous(g), freq);
    REQUIRE(data.g0.size() == 51);
    for (std::size_t j = 0; j < data.g0.size(); ++j) {
        CHECK(std::abs(data.g0[j] - Complex(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(data.g1[j]) < 1e-11);
    }
}

TEST_CASE("g1 arithmetic follows 2ik(g0 - 1)") {
    FrequencyGrid freq(1.0, 2.0, 1.0);
    std::vector<Complex> g0 = {Complex(1.0, 1.0), Complex(0.5, 0.0)};
    BoundaryData data(freq, -1.0, g0);
    // node(0) has k = 2: g0 - 1 = i -> g1 = 4i * i = -4.
    CHECK(std::abs(data.g1[0] - Complex(-4.0, 0.0)) < 1e-14);
    // k = 1: g0 - 1 = -0.5 -> g1 = 2i * (-0.5) = -i.
    CHECK(std::abs(data.g1[1] - Complex(0.0, -1.0)) < 1e-14);
}

TEST_CASE("g1 at k = 1 for g0 = 1 + i equals -2") {
    FrequencyGrid freq(0.5, 1.0, 0.5);
    std::vector<Complex> g0 = {Complex(1.0, 1.0), Complex(1.0, 1.0)};
    BoundaryData data(freq, -1.0, g0);
    CHECK(std::abs(data.g1[0] - Complex(-2.0, 0.0)) < 1e-14);
}

TEST_CASE("g0 never vanishes for admissible step profiles") {
    SpatialGrid g(201);
    FrequencyGrid freq(0.5, 1.5, 0.02);
    for (double target : {4.0, 7.0, 10.0}) {
        auto data = extract_boundary_data(MediumProfile::step(g, target, 0.25, 1.0 / 3.0), freq);
        for (const auto& v : data.g0) CHECK(std::abs(v) > 1e-6);
    }
}

TEST_CASE("g1 consistent with the spatial derivative of w = u / u0") {
    SpatialGrid g(201);
    auto profile = MediumProfile::step(g, 4.0, 0.25, 1.0 / 3.0);
    const double k = 1.0;
    auto sol = solve_lippmann_schwinger(profile, k);
    std::vector<Complex> wv(g.n_points());
    for (std::size_t i = 0; i < g.n_points(); ++i) {
        wv[i] = sol.u[i] / free_space_field(g.x(i), -1.0, k);
    }
    GridFunction w(g, std::move(wv));
    const Complex g0 = w[0];
    const Complex g1 = Complex(0.0, 2.0 * k) * (g0 - 1.0);
    CHECK(std::abs(diff1(w)[0] - g1) < 1e-3);
}

TEST_CASE("noise model is bounded, seeded, and level-0 is the identity") {
    SpatialGrid g(201);
    FrequencyGrid freq(0.5, 1.5, 0.02);
    auto data = extract_boundary_data(MediumProfile::step(g, 4.0, 0.25, 1.0 / 3.0), freq);

    auto same = add_noise(data, 0.0, 42);
    for (std::size_t j = 0; j < data.g0.size(); ++j) CHECK(same.g0[j] == data.g0[j]);

    auto noisy1 = add_noise(data, 0.05, 42);
    auto noisy2 = add_noise(data, 0.05, 42);
    double max_rel = 0.0;
    for (std::size_t j = 0; j < data.g0.size(); ++j) {
        CHECK(noisy1.g0[j] == noisy2.g0[j]);
        max_rel = std::max(max_rel, std::abs(noisy1.g0[j] - data.g0[j]) / std::abs(data.g0[j]));
        const double k = freq.node(j);
        CHECK(std::abs(noisy1.g1[j] - Complex(0.0, 2.0 * k) * (noisy1.g0[j] - 1.0)) < 1e-14);
    }
    CHECK(max_rel <= 0.05 + 1e-12);
    CHECK(max_rel > 0.0);

    auto other_seed = add_noise(data, 0.05, 43);
    bool differs = false;
    for (std::size_t j = 0; j < data.g0.size(); ++j) {
        if (other_seed.g0[j] != noisy1.g0[j]) differs = true;
    }
    CHECK(differs);
}
