#include "fpsg/integrators.hpp"

#include <cmath>

namespace fpsg {

Dirk2 make_dirk2(SGWorkspace& ws, Scheme scheme, double h, const CoefficientField& f0) {
    Dirk2 d;
    d.h = h;
    d.gamma = 1.0 - 1.0 / std::sqrt(2.0);
    d.L = materialize_operator(ws);
    const int nb = d.L.nb, bs = d.L.bs;
    const size_t n = static_cast<size_t>(nb) * bs;

    BlockTridiag A(nb, bs);
    double eta = d.gamma * h;
    for (size_t i = 0; i < d.L.lo.size(); ++i) {
        A.lo[i] = -eta * d.L.lo[i];
        A.di[i] = -eta * d.L.di[i];
        A.up[i] = -eta * d.L.up[i];
    }
    for (int j = 0; j < nb; ++j) {
        double* D = A.block(A.di, j);
        for (int k = 0; k < bs; ++k) D[k * bs + k] += 1.0;
    }
    d.fac = factor_block_tridiag(A);

    d.S.assign(n, 0.0);
    if (scheme == Scheme::MMsG) {
        projected_quasi_equilibrium(ws, f0, ws.qhat);
        std::vector<double> q(n);
        field_to_blockvec(ws.qhat, q.data());
        block_matvec(d.L, q.data(), d.S.data());
    }
    d.x.assign(n, 0.0);
    d.k1.assign(n, 0.0);
    d.k2.assign(n, 0.0);
    d.y.assign(n, 0.0);
    d.r.assign(n, 0.0);
    return d;
}

void dirk2_step(Dirk2& d, CoefficientField& f) {
    const size_t n = d.x.size();
    const double h = d.h, g = d.gamma;
    field_to_blockvec(f, d.x.data());

    block_matvec(d.L, d.x.data(), d.r.data());
    for (size_t i = 0; i < n; ++i) d.k1[i] = d.r[i] - d.S[i];
    solve_block_tridiag(d.fac, d.k1.data());

    for (size_t i = 0; i < n; ++i) d.y[i] = d.x[i] + h * (1.0 - g) * d.k1[i];
    block_matvec(d.L, d.y.data(), d.r.data());
    for (size_t i = 0; i < n; ++i) d.k2[i] = d.r[i] - d.S[i];
    solve_block_tridiag(d.fac, d.k2.data());

    for (size_t i = 0; i < n; ++i)
        d.x[i] += h * ((1.0 - g) * d.k1[i] + g * d.k2[i]);
    blockvec_to_field(d.x.data(), f);
}

Imex2Scratch make_imex2_scratch(const SGWorkspace& ws) {
    Imex2Scratch sc;
    const int Nq = ws.basis.Nq, N = ws.grid.N, M = ws.basis.M;
    sc.F = NodalField(Nq, N);
    sc.Fs = NodalField(Nq, N);
    sc.Qn = NodalField(Nq, N);
    sc.cstar = CoefficientField(M, N);
    sc.b.assign(N, 0.0);
    sc.bq.assign(N, 0.0);
    sc.lo.assign(N, 0.0);
    sc.di.assign(N, 0.0);
    sc.up.assign(N, 0.0);
    sc.rhs.assign(N, 0.0);
    sc.src.assign(N, 0.0);
    return sc;
}

// Fills sc.Qn with the reconstruction of the projected quasi-equilibrium of c.
static void equilibrium_nodal(SGWorkspace& ws, const CoefficientField& c,
                              Imex2Scratch& sc) {
    projected_quasi_equilibrium(ws, c, ws.qhat);
    to_nodal(ws, ws.qhat, sc.Qn);
}

// Solves (I - (h/2) T) x = rhs for one node, T assembled from (b, d).
static void solve_stage(const SGWorkspace& ws, Imex2Scratch& sc, int q, double h,
                        double* x) {
    const int N = ws.grid.N;
    const double* dq = ws.diff.data() + static_cast<size_t>(q) * N;
    assemble_fp_tridiag(ws.grid, sc.b.data(), dq, sc.lo.data(), sc.di.data(), sc.up.data());
    for (int j = 0; j < N; ++j) {
        sc.lo[j] *= -0.5 * h;
        sc.up[j] *= -0.5 * h;
        sc.di[j] = 1.0 - 0.5 * h * sc.di[j];
    }
    tridiag_factor(sc.lu, N, sc.lo.data(), sc.di.data(), sc.up.data());
    tridiag_solve(sc.lu, x);
}

void imex2_step(SGWorkspace& ws, Scheme scheme, double h, CoefficientField& f,
                Imex2Scratch& sc) {
    const int Nq = ws.basis.Nq, N = ws.grid.N;
    const bool mm = scheme == Scheme::MMsG;

    if (mm) equilibrium_nodal(ws, f, sc);
    to_nodal(ws, f, sc.F);

    // predictor: implicit midpoint with start-of-step coefficients
    for (int q = 0; q < Nq; ++q) {
        const double* dq = ws.diff.data() + static_cast<size_t>(q) * N;
        double* xs = sc.Fs.row(q);
        const double* xn = sc.F.row(q);
        if (mm) {
            drift_at_node(ws, q, sc.Qn.row(q), sc.bq.data());
            apply_fp_operator(ws.grid, sc.bq.data(), dq, sc.Qn.row(q), sc.src.data());
            for (int j = 0; j < N; ++j) xs[j] = xn[j] - 0.5 * h * sc.src[j];
        } else {
            for (int j = 0; j < N; ++j) xs[j] = xn[j];
        }
        drift_at_node(ws, q, xn, sc.b.data());
        solve_stage(ws, sc, q, h, xs);
    }
    to_coeff(ws, sc.Fs, sc.cstar);

    // corrector: implicit trapezoid with midpoint-frozen coefficients
    if (mm) equilibrium_nodal(ws, sc.cstar, sc);
    to_nodal(ws, sc.cstar, sc.Fs);
    for (int q = 0; q < Nq; ++q) {
        const double* dq = ws.diff.data() + static_cast<size_t>(q) * N;
        const double* xn = sc.F.row(q);
        double* xs = sc.Fs.row(q);
        drift_at_node(ws, q, xs, sc.b.data());
        apply_fp_operator(ws.grid, sc.b.data(), dq, xn, sc.rhs.data());
        for (int j = 0; j < N; ++j) sc.rhs[j] = xn[j] + 0.5 * h * sc.rhs[j];
        if (mm) {
            drift_at_node(ws, q, sc.Qn.row(q), sc.bq.data());
            apply_fp_operator(ws.grid, sc.bq.data(), dq, sc.Qn.row(q), sc.src.data());
            for (int j = 0; j < N; ++j) sc.rhs[j] -= h * sc.src[j];
        }
        solve_stage(ws, sc, q, h, sc.rhs.data());
        for (int j = 0; j < N; ++j) xs[j] = sc.rhs[j];
    }
    to_coeff(ws, sc.Fs, f);
}

} // namespace fpsg
