#pragma once

#include <vector>

namespace fpsg {

/// Orthonormal Legendre chaos basis for a uniform random parameter z on [-1,1]
/// with density p(z) = 1/2, together with the Gauss-Legendre rule used for all
/// z-integrals. Phi_k(z) = sqrt(2k+1) P_k(z), so E[Phi_j Phi_k] = delta_jk.
struct GpcBasis {
    int M = 0;               // highest retained polynomial degree
    int Nq = 0;              // quadrature size, must satisfy Nq >= M+1
    std::vector<double> z;   // quadrature nodes, ascending in (-1,1)
    std::vector<double> w;   // weights w.r.t. p(z); they sum to 1
    std::vector<double> phi; // (M+1) x Nq table, phi[k*Nq+q] = Phi_k(z[q])

    double phi_at(int k, int q) const { return phi[k * Nq + q]; }
};

/// Default quadrature size for degree-M bases: exact products of two basis
/// polynomials plus margin, never fewer than 32 nodes.
int default_quadrature_size(int M);

/// Gauss-Legendre rule on [-1,1]; weights sum to 2. Nodes are found by Newton
/// iteration on the Legendre recurrence and are symmetric about 0.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

GpcBasis make_basis(int M, int Nq);
inline GpcBasis make_basis(int M) { return make_basis(M, default_quadrature_size(M)); }

/// Phi_k at an arbitrary point via the three-term recurrence.
double evaluate_phi(int k, double z);

/// coeffs[k] = sum_q w_q values[q] Phi_k(z_q), k = 0..M.
void project_samples(const GpcBasis& basis, const double* values, double* coeffs);

/// sum_k coeffs[k] Phi_k(z) at an arbitrary z.
double reconstruct(const GpcBasis& basis, const double* coeffs, double z);

/// Same, but at quadrature node q using the precomputed table.
double reconstruct_at_node(const GpcBasis& basis, const double* coeffs, int q);

/// Mean and variance of the truncated expansion: mean is the 0-mode, variance
/// the sum of squares of the higher modes (orthonormal basis).
double coeff_mean(const double* coeffs);
double coeff_variance(const double* coeffs, int M);

} // namespace fpsg
