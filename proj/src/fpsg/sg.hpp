#pragma once

#include <vector>

#include "fpsg/gpc.hpp"
#include "fpsg/grid.hpp"
#include "fpsg/models.hpp"

namespace fpsg {

/// Galerkin coefficients of the solution: modes k = 0..M by rows, velocity
/// nodes by columns. Mode 0 is the mean field; the variance at a node is the
/// sum of squares of the higher modes.
struct CoefficientField {
    int M = 0, N = 0;
    std::vector<double> a; // (M+1) x N row-major

    CoefficientField() = default;
    CoefficientField(int M_, int N_) : M(M_), N(N_),
        a(static_cast<size_t>(M_ + 1) * N_, 0.0) {}
    double* row(int k) { return a.data() + static_cast<size_t>(k) * N; }
    const double* row(int k) const { return a.data() + static_cast<size_t>(k) * N; }
    double& at(int k, int j) { return a[static_cast<size_t>(k) * N + j]; }
    double at(int k, int j) const { return a[static_cast<size_t>(k) * N + j]; }
};

/// Solution samples at the z-quadrature nodes: node q by rows.
struct NodalField {
    int Nq = 0, N = 0;
    std::vector<double> a; // Nq x N row-major

    NodalField() = default;
    NodalField(int Nq_, int N_) : Nq(Nq_), N(N_),
        a(static_cast<size_t>(Nq_) * N_, 0.0) {}
    double* row(int q) { return a.data() + static_cast<size_t>(q) * N; }
    const double* row(int q) const { return a.data() + static_cast<size_t>(q) * N; }
};

enum class Scheme { CDsG, MMsG };

/// Block-tridiagonal matrix acting on grid-major vectors x[j*bs + k]: block
/// row j couples grid nodes j-1, j, j+1 through bs x bs dense blocks (bs is
/// the number of retained modes M+1). lo[0] and up[nb-1] stay zero.
struct BlockTridiag {
    int nb = 0, bs = 0;
    std::vector<double> lo, di, up; // nb x bs x bs each, row-major blocks

    BlockTridiag() = default;
    BlockTridiag(int nb_, int bs_);
    double* block(std::vector<double>& which, int j) {
        return which.data() + static_cast<size_t>(j) * bs * bs;
    }
    const double* block(const std::vector<double>& which, int j) const {
        return which.data() + static_cast<size_t>(j) * bs * bs;
    }
};

void block_matvec(const BlockTridiag& A, const double* x, double* y);

/// Precomputed tables and scratch shared by the Galerkin right-hand sides.
/// One workspace per run; concurrent use from several threads is not
/// supported (sweeps give each entry its own workspace).
struct SGWorkspace {
    Model model;
    GpcBasis basis;
    VelocityGrid grid;
    std::vector<double> phiw;      // (M+1) x Nq: phi weighted by quadrature
    std::vector<double> diff;      // Nq x N diffusion samples
    std::vector<double> ddiff;     // Nq x N analytic dD/dv samples
    std::vector<double> lin_drift; // Nq x N drift samples (linear kinds only)
    // Interaction kernel profiles: both bounded confidence kernels depend on
    // v - v_* only, so on the uniform grid each z-node needs one row of
    // 2N-1 lag values (lag j-l stored at index j-l+N-1) and the drift is a
    // pair of short correlations instead of a dense matrix-vector product.
    std::vector<double> bc_kernel; // Nq x (2N-1)

    // scratch for the rhs evaluations
    NodalField F, Q, W;
    CoefficientField qhat, rhs_scratch;
    std::vector<double> brow;
    mutable std::vector<double> conv_g, conv_h; // drift correlation inputs

    const double* kernel_row(int q) const {
        return bc_kernel.data() + static_cast<size_t>(q) * (2 * grid.N - 1);
    }
};

SGWorkspace make_workspace(Model model, GpcBasis basis, VelocityGrid grid);

/// Drift samples at node q for the state row f (length N), using the cached
/// tables (precomputed kernel contraction for bounded confidence).
void drift_at_node(const SGWorkspace& ws, int q, const double* f, double* b);

void to_nodal(const SGWorkspace& ws, const CoefficientField& c, NodalField& out);
void to_coeff(const SGWorkspace& ws, const NodalField& n, CoefficientField& out);

/// Projected quasi-equilibrium map: out = P[ f^q(R in) ], the Galerkin
/// projection of the per-node quasi-equilibria of the reconstructed state.
void projected_quasi_equilibrium(SGWorkspace& ws, const CoefficientField& in,
                                 CoefficientField& out);

/// Self-consistent projected quasi-equilibrium: iterates the map above to the
/// given tolerance (max-abs coefficient change), then returns the image of
/// the final iterate so the result is exactly a fixed point in stored bits
/// whenever the iteration has stalled.
CoefficientField fixed_point_quasi_equilibrium(SGWorkspace& ws,
                                               const CoefficientField& start,
                                               int max_iter = 400,
                                               double tol = 1e-15);

/// Standard stochastic Galerkin right-hand side: project, apply the
/// conservative flux operator per node with coefficients rebuilt from the
/// reconstructed state, project back. in and out must not alias.
void rhs_cdsg(SGWorkspace& ws, const CoefficientField& in, CoefficientField& out);

/// Micro-macro right-hand side: rhs_cdsg(in) minus rhs_cdsg evaluated at the
/// projected quasi-equilibrium of in, whose drift is rebuilt from the
/// reconstructed equilibrium itself. Vanishes identically at fixed points of
/// the projected quasi-equilibrium map.
void rhs_mmsg(SGWorkspace& ws, const CoefficientField& in, CoefficientField& out);

/// Dense block-tridiagonal matrix of rhs_cdsg for the linear kinds (drift
/// independent of the state). Acts on grid-major vectors; agrees with the
/// projected evaluation to roundoff. Throws for nonlocal models.
BlockTridiag materialize_operator(const SGWorkspace& ws);

/// Layout shuttles between coefficient fields (mode-major) and the grid-major
/// vectors the block solver uses.
void field_to_blockvec(const CoefficientField& c, double* x);
void blockvec_to_field(const double* x, CoefficientField& c);

} // namespace fpsg
