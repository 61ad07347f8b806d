#include "fpsg/sg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "fpsg/quasi_eq.hpp"

namespace fpsg {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConst = Eigen::Map<const RowMat>;

BlockTridiag::BlockTridiag(int nb_, int bs_) : nb(nb_), bs(bs_) {
    size_t n = static_cast<size_t>(nb_) * bs_ * bs_;
    lo.assign(n, 0.0);
    di.assign(n, 0.0);
    up.assign(n, 0.0);
}

void block_matvec(const BlockTridiag& A, const double* x, double* y) {
    const int nb = A.nb, bs = A.bs;
    for (int j = 0; j < nb; ++j) {
        const double* xj = x + static_cast<size_t>(j) * bs;
        double* yj = y + static_cast<size_t>(j) * bs;
        const double* D = A.block(A.di, j);
        for (int h = 0; h < bs; ++h) {
            double acc = 0.0;
            for (int k = 0; k < bs; ++k) acc += D[h * bs + k] * xj[k];
            yj[h] = acc;
        }
        if (j > 0) {
            const double* L = A.block(A.lo, j);
            const double* xm = xj - bs;
            for (int h = 0; h < bs; ++h) {
                double acc = 0.0;
                for (int k = 0; k < bs; ++k) acc += L[h * bs + k] * xm[k];
                yj[h] += acc;
            }
        }
        if (j < nb - 1) {
            const double* U = A.block(A.up, j);
            const double* xp = xj + bs;
            for (int h = 0; h < bs; ++h) {
                double acc = 0.0;
                for (int k = 0; k < bs; ++k) acc += U[h * bs + k] * xp[k];
                yj[h] += acc;
            }
        }
    }
}

SGWorkspace make_workspace(Model model, GpcBasis basis, VelocityGrid grid) {
    SGWorkspace ws;
    ws.model = std::move(model);
    ws.basis = std::move(basis);
    ws.grid = std::move(grid);
    const int M = ws.basis.M, Nq = ws.basis.Nq, N = ws.grid.N;

    validate_model(ws.model, ws.basis.z);

    ws.phiw.assign(static_cast<size_t>(M + 1) * Nq, 0.0);
    for (int k = 0; k <= M; ++k)
        for (int q = 0; q < Nq; ++q)
            ws.phiw[static_cast<size_t>(k) * Nq + q] = ws.basis.w[q] * ws.basis.phi_at(k, q);

    ws.diff.resize(static_cast<size_t>(Nq) * N);
    ws.ddiff.resize(static_cast<size_t>(Nq) * N);
    for (int q = 0; q < Nq; ++q) {
        diffusion_field(ws.model, ws.basis.z[q], ws.grid, ws.diff.data() + static_cast<size_t>(q) * N);
        diffusion_derivative_field(ws.model, ws.basis.z[q], ws.grid,
                                   ws.ddiff.data() + static_cast<size_t>(q) * N);
    }

    if (is_linear(ws.model)) {
        ws.lin_drift.resize(static_cast<size_t>(Nq) * N);
        for (int q = 0; q < Nq; ++q)
            drift_field(ws.model, ws.basis.z[q], ws.grid, nullptr,
                        ws.lin_drift.data() + static_cast<size_t>(q) * N);
    }

    if (ws.model.kind == ModelKind::BoundedConfidence) {
        ws.bc_kernel.resize(static_cast<size_t>(Nq) * (2 * N - 1));
        for (int q = 0; q < Nq; ++q) {
            const double z = ws.basis.z[q];
            const double Dz = ws.model.Delta(z);
            double* row = ws.bc_kernel.data() + static_cast<size_t>(q) * (2 * N - 1);
            for (int m = -(N - 1); m <= N - 1; ++m) {
                const double x = m * ws.grid.dv; // v_j - v_l at lag m
                double ker;
                if (ws.model.kernel == BcKernel::Indicator) {
                    ker = std::abs(x) <= Dz ? 1.0 : 0.0;
                } else {
                    const double bta = ws.model.beta;
                    ker = 1.0 / (1.0 + std::exp(-bta * (x + Dz)))
                        / (1.0 + std::exp(-bta * (-x + Dz)));
                }
                row[m + N - 1] = ker;
            }
        }
        ws.conv_g.assign(N, 0.0);
        ws.conv_h.assign(N, 0.0);
    }

    ws.F = NodalField(Nq, N);
    ws.Q = NodalField(Nq, N);
    ws.W = NodalField(Nq, N);
    ws.qhat = CoefficientField(M, N);
    ws.rhs_scratch = CoefficientField(M, N);
    ws.brow.assign(N, 0.0);
    return ws;
}

void drift_at_node(const SGWorkspace& ws, int q, const double* f, double* b) {
    const int N = ws.grid.N;
    switch (ws.model.kind) {
    case ModelKind::ClassicalFP:
    case ModelKind::Opinion: {
        const double* cached = ws.lin_drift.data() + static_cast<size_t>(q) * N;
        for (int j = 0; j < N; ++j) b[j] = cached[j];
        break;
    }
    case ModelKind::BoundedConfidence: {
        // b_j = sum_l T(v_j - v_l) (v_j - v_l) cw_l f_l, split into two
        // correlations against the lag profile
        const double* T = ws.kernel_row(q);
        double* gw = ws.conv_g.data();
        double* hw = ws.conv_h.data();
        for (int l = 0; l < N; ++l) {
            const double wf = ws.grid.cw[l] * f[l];
            gw[l] = wf;
            hw[l] = wf * ws.grid.v[l];
        }
        for (int j = 0; j < N; ++j) {
            const double* Tj = T + (N - 1 + j); // Tj[-l] is the lag j-l value
            double s0 = 0.0, s1 = 0.0;
            for (int l = 0; l < N; ++l) {
                const double t = Tj[-l];
                s0 += t * gw[l];
                s1 += t * hw[l];
            }
            b[j] = ws.grid.v[j] * s0 - s1;
        }
        break;
    }
    case ModelKind::Swarming:
        drift_field(ws.model, ws.basis.z[q], ws.grid, f, b);
        break;
    }
}

void to_nodal(const SGWorkspace& ws, const CoefficientField& c, NodalField& out) {
    const int M = ws.basis.M, Nq = ws.basis.Nq, N = ws.grid.N;
    out.Nq = Nq;
    out.N = N;
    out.a.resize(static_cast<size_t>(Nq) * N);
    MapConst phi(ws.basis.phi.data(), M + 1, Nq);
    MapConst cm(c.a.data(), M + 1, N);
    MapMat nm(out.a.data(), Nq, N);
    nm.noalias() = phi.transpose() * cm;
}

void to_coeff(const SGWorkspace& ws, const NodalField& n, CoefficientField& out) {
    const int M = ws.basis.M, Nq = ws.basis.Nq, N = ws.grid.N;
    out.M = M;
    out.N = N;
    out.a.resize(static_cast<size_t>(M + 1) * N);
    MapConst pw(ws.phiw.data(), M + 1, Nq);
    MapConst nm(n.a.data(), Nq, N);
    MapMat cm(out.a.data(), M + 1, N);
    cm.noalias() = pw * nm;
}

void projected_quasi_equilibrium(SGWorkspace& ws, const CoefficientField& in,
                                 CoefficientField& out) {
    to_nodal(ws, in, ws.F);
    for (int q = 0; q < ws.basis.Nq; ++q) {
        if (ws.model.kind == ModelKind::BoundedConfidence) {
            drift_at_node(ws, q, ws.F.row(q), ws.brow.data());
            compute_fq_from_drift(ws.model, ws.basis.z[q], ws.grid, ws.F.row(q),
                                  ws.brow.data(), ws.Q.row(q));
        } else {
            compute_fq(ws.model, ws.basis.z[q], ws.grid, ws.F.row(q), ws.Q.row(q));
        }
    }
    to_coeff(ws, ws.Q, out);
}

CoefficientField fixed_point_quasi_equilibrium(SGWorkspace& ws,
                                               const CoefficientField& start,
                                               int max_iter, double tol) {
    CoefficientField cur = start, next(start.M, start.N);
    for (int it = 0; it < max_iter; ++it) {
        projected_quasi_equilibrium(ws, cur, next);
        double delta = 0.0;
        for (size_t i = 0; i < cur.a.size(); ++i)
            delta = std::max(delta, std::abs(next.a[i] - cur.a[i]));
        std::swap(cur, next);
        if (delta < tol) break;
    }
    // hand back the image of the final iterate: an exact fixed point in bits
    // once the iteration has stalled at its roundoff plateau
    projected_quasi_equilibrium(ws, cur, next);
    return next;
}

// Shared core: nodal flux-operator sweep of the reconstructed state with
// drift rebuilt from that same state, projected back onto the basis.
static void rhs_projected(SGWorkspace& ws, const NodalField& state, CoefficientField& out) {
    const int Nq = ws.basis.Nq, N = ws.grid.N;
    for (int q = 0; q < Nq; ++q) {
        drift_at_node(ws, q, state.row(q), ws.brow.data());
        apply_fp_operator(ws.grid, ws.brow.data(),
                          ws.diff.data() + static_cast<size_t>(q) * N,
                          state.row(q), ws.W.row(q));
    }
    to_coeff(ws, ws.W, out);
}

void rhs_cdsg(SGWorkspace& ws, const CoefficientField& in, CoefficientField& out) {
    to_nodal(ws, in, ws.F);
    rhs_projected(ws, ws.F, out);
}

void rhs_mmsg(SGWorkspace& ws, const CoefficientField& in, CoefficientField& out) {
    // equilibrium part first: projected_quasi_equilibrium leaves ws.F holding
    // the reconstruction of `in`, which the direct part below reuses
    projected_quasi_equilibrium(ws, in, ws.qhat);
    to_nodal(ws, ws.qhat, ws.Q);
    rhs_projected(ws, ws.Q, ws.rhs_scratch);

    rhs_projected(ws, ws.F, out);
    for (size_t i = 0; i < out.a.size(); ++i) out.a[i] -= ws.rhs_scratch.a[i];
}

BlockTridiag materialize_operator(const SGWorkspace& ws) {
    if (!is_linear(ws.model))
        throw std::invalid_argument("materialize_operator: drift must be state-independent");
    const int M = ws.basis.M, Nq = ws.basis.Nq, N = ws.grid.N;
    const int bs = M + 1;
    BlockTridiag A(N, bs);
    std::vector<double> lo(N), di(N), up(N);
    for (int q = 0; q < Nq; ++q) {
        assemble_fp_tridiag(ws.grid, ws.lin_drift.data() + static_cast<size_t>(q) * N,
                            ws.diff.data() + static_cast<size_t>(q) * N,
                            lo.data(), di.data(), up.data());
        for (int h = 0; h < bs; ++h) {
            for (int k = 0; k < bs; ++k) {
                // quadrature of Phi_h Phi_k against the scalar stencil entries
                double whk = ws.phiw[static_cast<size_t>(h) * Nq + q] * ws.basis.phi_at(k, q);
                if (whk == 0.0) continue;
                for (int j = 0; j < N; ++j) {
                    double* Db = A.block(A.di, j);
                    Db[h * bs + k] += whk * di[j];
                    if (j > 0) A.block(A.lo, j)[h * bs + k] += whk * lo[j];
                    if (j < N - 1) A.block(A.up, j)[h * bs + k] += whk * up[j];
                }
            }
        }
    }
    return A;
}

void field_to_blockvec(const CoefficientField& c, double* x) {
    const int bs = c.M + 1, N = c.N;
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < bs; ++k)
            x[static_cast<size_t>(j) * bs + k] = c.at(k, j);
}

void blockvec_to_field(const double* x, CoefficientField& c) {
    const int bs = c.M + 1, N = c.N;
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < bs; ++k)
            c.at(k, j) = x[static_cast<size_t>(j) * bs + k];
}

} // namespace fpsg
