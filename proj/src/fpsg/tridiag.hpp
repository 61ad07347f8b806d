#pragma once

#include <Eigen/Dense>

#include <vector>

#include "fpsg/sg.hpp"

namespace fpsg {

/// LU factorization of a scalar tridiagonal matrix with partial pivoting
/// (row swaps create one extra superdiagonal). The implicit velocity systems
/// are strongly advection-dominated where the diffusion degenerates, so the
/// pivot-free Thomas recursion is not safe here.
struct TridiagPivLU {
    int n = 0;
    std::vector<double> dl, d, du, du2;
    std::vector<int> piv; // 1 if rows i, i+1 were swapped at step i
};

/// Factors the matrix with bands (lo, di, up); lo[0] and up[n-1] are ignored.
void tridiag_factor(TridiagPivLU& f, int n, const double* lo, const double* di,
                    const double* up);

/// Solves in place using a previous factorization.
void tridiag_solve(const TridiagPivLU& f, double* x);

/// Block-tridiagonal LU without block-level pivoting; each pivot block is
/// factored densely with partial pivoting. Suited to the Galerkin matrices
/// I - eta*L whose pivot blocks are uniformly well conditioned.
struct BlockTridiagFactor {
    int nb = 0, bs = 0;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu; // of the Schur pivots
    std::vector<Eigen::MatrixXd> C;                       // elimination multipliers
    std::vector<Eigen::MatrixXd> up;                      // super-diagonal blocks
};

BlockTridiagFactor factor_block_tridiag(const BlockTridiag& A);

/// Solves in place on a grid-major vector of length nb*bs.
void solve_block_tridiag(const BlockTridiagFactor& f, double* x);

} // namespace fpsg
