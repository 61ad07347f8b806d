#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fpsg/config.hpp"
#include "fpsg/gpc.hpp"
#include "fpsg/sg.hpp"

using namespace fpsg;

namespace {

ZProfile constant(double a) {
    return [a](double) { return a; };
}

SGWorkspace workspace_for(const Model& m, int M, int N) {
    GpcBasis basis = make_basis(M, resolve_quadrature_size(m, M));
    auto dom = default_domain(m);
    VelocityGrid grid = make_grid(dom.first, dom.second, N);
    return make_workspace(m, basis, grid);
}

// Galerkin projection of the model's initial datum, the state every run
// starts from.
CoefficientField projected_initial(SGWorkspace& ws) {
    NodalField F(ws.basis.Nq, ws.grid.N);
    for (int q = 0; q < ws.basis.Nq; ++q)
        initial_field(ws.model, ws.basis.z[q], ws.grid, F.row(q));
    CoefficientField c(ws.basis.M, ws.grid.N);
    to_coeff(ws, F, c);
    return c;
}

double max_abs(const CoefficientField& c) {
    double m = 0.0;
    for (double x : c.a) m = std::max(m, std::abs(x));
    return m;
}

std::vector<Model> model_zoo() {
    return {
        make_classical([](double z) { return 1.0 + 0.5 * z; },
                       [](double z) { return 1.0 + 0.25 * (z + 1.0); }),
        make_opinion([](double z) { return 0.25 * (3.0 + z); }, 0.1),
        make_bounded_confidence([](double z) { return 1.25 + 0.25 * z; }, 0.1),
        make_swarming([](double z) { return 2.0 + z; },
                      [](double z) { return 0.2 + 0.1 * z; }),
    };
}

} // namespace

TEST_CASE("nodal reconstruction and projection are inverse on the retained span") {
    Model m = make_classical(constant(1.0), constant(1.0));
    SGWorkspace ws = workspace_for(m, 5, 21);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CoefficientField c(5, 21), back(5, 21);
    for (double& x : c.a) x = dist(rng);
    NodalField F(ws.basis.Nq, 21);
    to_nodal(ws, c, F);
    to_coeff(ws, F, back);
    for (size_t i = 0; i < c.a.size(); ++i) CHECK(std::abs(c.a[i] - back.a[i]) < 1e-13);
}

TEST_CASE("grid-major layout shuttles are inverse to each other") {
    CoefficientField c(3, 7);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& x : c.a) x = dist(rng);
    std::vector<double> x(c.a.size());
    field_to_blockvec(c, x.data());
    CoefficientField back(3, 7);
    blockvec_to_field(x.data(), back);
    CHECK(c.a == back.a);
    // grid-major: block j holds the modes of node j
    CHECK(x[2 * 4 + 1] == c.at(1, 2));
}

TEST_CASE("materialized operator reproduces the projected evaluation") {
    for (int which : {0, 1}) {
        Model m = model_zoo()[which];
        SGWorkspace ws = workspace_for(m, 4, 31);
        CoefficientField c = projected_initial(ws);
        CoefficientField out(4, 31);
        rhs_cdsg(ws, c, out);

        BlockTridiag L = materialize_operator(ws);
        std::vector<double> x(c.a.size()), y(c.a.size());
        field_to_blockvec(c, x.data());
        block_matvec(L, x.data(), y.data());
        CoefficientField via(4, 31);
        blockvec_to_field(y.data(), via);

        double scale = max_abs(out);
        for (size_t i = 0; i < out.a.size(); ++i)
            CHECK(std::abs(out.a[i] - via.a[i]) < 1e-12 * scale);
    }
}

TEST_CASE("materialization is refused for state-dependent drifts") {
    Model bc = model_zoo()[2];
    SGWorkspace ws = workspace_for(bc, 3, 21);
    CHECK_THROWS_AS(materialize_operator(ws), std::invalid_argument);
}

TEST_CASE("both right-hand sides conserve the mode-0 mass exactly") {
    for (const Model& m : model_zoo()) {
        SGWorkspace ws = workspace_for(m, 4, 41);
        CoefficientField c = projected_initial(ws);
        CoefficientField out(4, 41);
        for (int variant = 0; variant < 2; ++variant) {
            if (variant == 0)
                rhs_cdsg(ws, c, out);
            else
                rhs_mmsg(ws, c, out);
            double dm = 0.0;
            for (int j = 0; j < ws.grid.N; ++j) dm += ws.grid.cw[j] * out.at(0, j);
            CHECK(std::abs(dm) < 1e-13 * std::max(1.0, max_abs(out)));
        }
    }
}

TEST_CASE("micro-macro rhs vanishes at the self-consistent quasi-equilibrium") {
    // the plain rhs keeps an O(dv^2) discretization residual at the same
    // state, which is exactly the imbalance the micro-macro scheme removes
    for (const Model& m : model_zoo()) {
        SGWorkspace ws = workspace_for(m, 3, 31);
        CoefficientField start = projected_initial(ws);
        CoefficientField qhat = fixed_point_quasi_equilibrium(ws, start);

        CoefficientField out(3, 31);
        rhs_mmsg(ws, qhat, out);
        CHECK(max_abs(out) < 1e-13);
        rhs_cdsg(ws, qhat, out);
        CHECK(max_abs(out) > 1e-6);
    }
}

TEST_CASE("the projected quasi-equilibrium map fixes its reported fixed point") {
    Model m = model_zoo()[3];
    SGWorkspace ws = workspace_for(m, 4, 41);
    CoefficientField qhat = fixed_point_quasi_equilibrium(ws, projected_initial(ws));
    CoefficientField image(4, 41);
    projected_quasi_equilibrium(ws, qhat, image);
    // the iteration stalls at its roundoff plateau, so one more application
    // of the map moves the field by no more than a few ulps
    double worst = 0.0;
    for (size_t i = 0; i < qhat.a.size(); ++i)
        worst = std::max(worst, std::abs(qhat.a[i] - image.a[i]));
    CHECK(worst < 5e-14);
}

TEST_CASE("linear kinds have exactly linear right-hand sides") {
    Model m = model_zoo()[1];
    SGWorkspace ws = workspace_for(m, 4, 31);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CoefficientField x(4, 31), y(4, 31), combo(4, 31);
    for (double& v : x.a) v = dist(rng);
    for (double& v : y.a) v = dist(rng);
    const double a = 0.37, b = -1.21;
    for (size_t i = 0; i < x.a.size(); ++i) combo.a[i] = a * x.a[i] + b * y.a[i];

    CoefficientField rx(4, 31), ry(4, 31), rc(4, 31);
    rhs_cdsg(ws, x, rx);
    rhs_cdsg(ws, y, ry);
    rhs_cdsg(ws, combo, rc);
    double scale = std::max(max_abs(rx), max_abs(ry));
    for (size_t i = 0; i < rc.a.size(); ++i)
        CHECK(std::abs(rc.a[i] - a * rx.a[i] - b * ry.a[i]) < 1e-12 * scale);
}

TEST_CASE("cached kernel contraction agrees with the direct drift") {
    for (BcKernel kernel : {BcKernel::Indicator, BcKernel::Sigmoid}) {
        Model m = make_bounded_confidence([](double z) { return 1.25 + 0.25 * z; }, 0.1,
                                          kernel, 10.0);
        SGWorkspace ws = workspace_for(m, 4, 41);
        CoefficientField c = projected_initial(ws);
        NodalField F(ws.basis.Nq, ws.grid.N);
        to_nodal(ws, c, F);
        std::vector<double> b1(ws.grid.N), b2(ws.grid.N);
        for (int q = 0; q < ws.basis.Nq; ++q) {
            drift_at_node(ws, q, F.row(q), b1.data());
            drift_field(m, ws.basis.z[q], ws.grid, F.row(q), b2.data());
            for (int j = 0; j < ws.grid.N; ++j) CHECK(std::abs(b1[j] - b2[j]) < 1e-12);
        }
    }
}

TEST_CASE("assembled swarming rhs matches a straight per-node reimplementation") {
    Model m = model_zoo()[3];
    SGWorkspace ws = workspace_for(m, 3, 41);
    CoefficientField c = projected_initial(ws);
    CoefficientField out(3, 41);
    rhs_cdsg(ws, c, out);

    const int N = ws.grid.N, Nq = ws.basis.Nq;
    NodalField F(Nq, N), W(Nq, N);
    to_nodal(ws, c, F);
    std::vector<double> b(N), d(N);
    for (int q = 0; q < Nq; ++q) {
        double z = ws.basis.z[q];
        drift_field(m, z, ws.grid, F.row(q), b.data());
        diffusion_field(m, z, ws.grid, d.data());
        apply_fp_operator(ws.grid, b.data(), d.data(), F.row(q), W.row(q));
    }
    std::vector<double> vals(Nq), coeffs(ws.basis.M + 1);
    double scale = max_abs(out);
    for (int j = 0; j < N; ++j) {
        for (int q = 0; q < Nq; ++q) vals[q] = W.row(q)[j];
        project_samples(ws.basis, vals.data(), coeffs.data());
        for (int k = 0; k <= ws.basis.M; ++k)
            CHECK(std::abs(out.at(k, j) - coeffs[k]) < 1e-13 * scale);
    }
}
