#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fpsg/diagnostics.hpp"

using namespace fpsg;

TEST_CASE("mass and first moment of the mean field") {
    VelocityGrid g = make_grid(-1.0, 1.0, 21);
    CoefficientField c(2, g.N);
    for (int j = 0; j < g.N; ++j) {
        double v = g.v[j];
        c.at(0, j) = 1.0 + v * v; // int = 2 + 2/3 + h^2/3
        c.at(1, j) = 100.0;       // higher modes must not enter
    }
    double h2 = g.dv * g.dv;
    CHECK(field_mass(g, c) == doctest::Approx(8.0 / 3.0 + h2 / 3.0).epsilon(1e-13));

    for (int j = 0; j < g.N; ++j) c.at(0, j) = g.v[j] + 1.0;
    CHECK(field_first_moment(g, c) == doctest::Approx(2.0 / 3.0 + h2 / 3.0).epsilon(1e-13));
}

TEST_CASE("variance profile sums the squared higher modes") {
    CoefficientField c(3, 4);
    for (int j = 0; j < 4; ++j) {
        c.at(0, j) = 7.0; // excluded
        c.at(1, j) = 1.0 + j;
        c.at(2, j) = 2.0;
        c.at(3, j) = -j;
    }
    std::vector<double> var(4);
    variance_profile(c, var.data());
    for (int j = 0; j < 4; ++j) {
        double expected = (1.0 + j) * (1.0 + j) + 4.0 + double(j) * j;
        CHECK(var[j] == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("relative variance distance on nested grids") {
    VelocityGrid coarse = make_grid(-1.0, 1.0, 11);
    VelocityGrid fine = make_grid(-1.0, 1.0, 21);

    // a pointwise proportional variance perturbation makes the distance exact
    const double delta = 0.037;
    CoefficientField approx(2, coarse.N), ref(2, fine.N);
    for (int j = 0; j < fine.N; ++j) {
        double v = fine.v[j];
        ref.at(0, j) = 1.0;
        ref.at(1, j) = 1.0 + v * v;
    }
    for (int j = 0; j < coarse.N; ++j) {
        double v = coarse.v[j];
        approx.at(0, j) = 2.0; // means never enter the variance metric
        approx.at(1, j) = (1.0 + v * v) * std::sqrt(1.0 + delta);
    }
    CHECK(eps_var(coarse, approx, ref) == doctest::Approx(delta).epsilon(1e-12));

    SUBCASE("throws when the reference variance vanishes") {
        CoefficientField flat(2, fine.N);
        for (int j = 0; j < fine.N; ++j) flat.at(0, j) = 1.0;
        CHECK_THROWS_AS(eps_var(coarse, approx, flat), std::runtime_error);
    }
    SUBCASE("throws when the grids do not nest") {
        CoefficientField odd(2, 16);
        for (int j = 0; j < 16; ++j) odd.at(1, j) = 1.0;
        CHECK_THROWS_AS(eps_var(coarse, approx, odd), std::invalid_argument);
        // a reference coarser than the approximation cannot nest either
        CoefficientField tiny(2, 6);
        for (int j = 0; j < 6; ++j) tiny.at(1, j) = 1.0;
        CHECK_THROWS_AS(eps_var(coarse, approx, tiny), std::invalid_argument);
    }
}

TEST_CASE("expansion error metric compares only the shared modes") {
    VelocityGrid coarse = make_grid(-1.0, 1.0, 11);
    VelocityGrid fine = make_grid(-1.0, 1.0, 21);

    CoefficientField ref(2, fine.N);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& x : ref.a) x = dist(rng);

    // approx = restriction of ref, except mode 1 is offset by a constant:
    // by Parseval the error is c * sqrt(domain length)
    const double c1 = 0.25;
    CoefficientField approx(4, coarse.N);
    for (int j = 0; j < coarse.N; ++j) {
        for (int k = 0; k <= 2; ++k) approx.at(k, j) = ref.at(k, 2 * j);
        approx.at(1, j) += c1;
        approx.at(3, j) = 1e6; // beyond the reference span, must be ignored
        approx.at(4, j) = -1e6;
    }
    CHECK(l2_error(coarse, approx, ref) == doctest::Approx(c1 * std::sqrt(2.0)).epsilon(1e-12));

    // identical restriction gives exactly zero
    for (int j = 0; j < coarse.N; ++j) approx.at(1, j) -= c1;
    CHECK(l2_error(coarse, approx, ref) == 0.0);
}

TEST_CASE("nodal view reconstructs the expansion at the quadrature nodes") {
    GpcBasis basis = make_basis(2);
    CoefficientField c(2, 5);
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& x : c.a) x = dist(rng);
    NodalField F = nodal_view(basis, c);
    REQUIRE(F.Nq == basis.Nq);
    for (int q = 0; q < basis.Nq; ++q) {
        for (int j = 0; j < 5; ++j) {
            double s = 0.0;
            for (int k = 0; k <= 2; ++k) s += c.at(k, j) * evaluate_phi(k, basis.z[q]);
            CHECK(F.row(q)[j] == doctest::Approx(s).epsilon(1e-13));
        }
    }
}

TEST_CASE("variance of the nodal L1 norms") {
    GpcBasis basis = make_basis(3);
    VelocityGrid g = make_grid(-1.0, 1.0, 31);

    // f(z,v) = (1 + c1 Phi_1(z)) g0(v) with g0 > 0: the L1 norm is linear in
    // Phi_1, so its variance is c1^2 (int g0)^2
    const double c1 = 0.2;
    CoefficientField c(3, g.N);
    for (int j = 0; j < g.N; ++j) {
        double g0 = std::exp(-4.0 * g.v[j] * g.v[j]);
        c.at(0, j) = g0;
        c.at(1, j) = c1 * g0;
    }
    std::vector<double> g0row(g.N);
    for (int j = 0; j < g.N; ++j) g0row[j] = c.at(0, j);
    double I = trapezoid(g, g0row.data());
    CHECK(variance_of_l1_norm(basis, g, c) == doctest::Approx(c1 * c1 * I * I).epsilon(1e-12));
}

TEST_CASE("relative entropy between nodal fields") {
    VelocityGrid g = make_grid(-1.0, 1.0, 21);
    NodalField f(3, g.N), ref(3, g.N);
    for (int q = 0; q < 3; ++q) {
        for (int j = 0; j < g.N; ++j) {
            double base = std::exp(-2.0 * g.v[j] * g.v[j]) * (1.0 + 0.1 * q);
            ref.row(q)[j] = base;
            f.row(q)[j] = base;
        }
    }

    SUBCASE("identical fields have zero entropy") {
        EntropyStats s = relative_entropy_nodal(g, f, ref);
        CHECK(s.clipped == 0);
        CHECK(s.max_value == 0.0);
        for (double h : s.per_node) CHECK(h == 0.0);
    }
    SUBCASE("a uniform scaling gives 2 log 2 times the mass") {
        for (int q = 0; q < 3; ++q)
            for (int j = 0; j < g.N; ++j) f.row(q)[j] *= 2.0;
        EntropyStats s = relative_entropy_nodal(g, f, ref);
        CHECK(s.clipped == 0);
        for (int q = 0; q < 3; ++q) {
            double mass = trapezoid(g, ref.row(q));
            CHECK(s.per_node[q] == doctest::Approx(2.0 * std::log(2.0) * mass).epsilon(1e-12));
        }
        CHECK(s.max_value == doctest::Approx(s.per_node[2]).epsilon(1e-15));
    }
    SUBCASE("nonpositive values are clipped and counted, not fatal") {
        ref.row(1)[4] = 0.0;
        f.row(2)[7] = -1e-3;
        EntropyStats s = relative_entropy_nodal(g, f, ref);
        CHECK(s.clipped == 2);
        for (double h : s.per_node) CHECK(std::isfinite(h));
    }
    SUBCASE("shape mismatch is rejected") {
        NodalField small(2, g.N);
        CHECK_THROWS_AS(relative_entropy_nodal(g, f, small), std::invalid_argument);
    }
}
