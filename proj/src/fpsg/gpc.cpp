#include "fpsg/gpc.hpp"

#include <cmath>
#include <stdexcept>

namespace fpsg {

int default_quadrature_size(int M) {
    int n = 2 * M + 2;
    return n < 32 ? 32 : n;
}

// Evaluates P_n(x) and its derivative with the standard recurrence
// (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}.
static void legendre_pair(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) { p = p0; dp = 0.0; return; }
    for (int k = 1; k < n; ++k) {
        double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess for the i-th root counted from x = +1
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p, dp;
        for (int it = 0; it < 100; ++it) {
            legendre_pair(n, x, p, dp);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre_pair(n, x, p, dp);
        x -= p / dp; // one polishing step past the tolerance check
        legendre_pair(n, x, p, dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = wgt;
        weights[n - 1 - i] = wgt;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0; // enforce the exact middle root
}

GpcBasis make_basis(int M, int Nq) {
    if (M < 0) throw std::invalid_argument("make_basis: M must be >= 0");
    if (Nq < M + 1) throw std::invalid_argument("make_basis: need Nq >= M+1");
    GpcBasis b;
    b.M = M;
    b.Nq = Nq;
    gauss_legendre(Nq, b.z, b.w);
    // weights become probabilities under p(z) = 1/2
    for (double& wq : b.w) wq *= 0.5;
    b.phi.assign(static_cast<size_t>(M + 1) * Nq, 0.0);
    for (int q = 0; q < Nq; ++q) {
        double x = b.z[q];
        double p0 = 1.0, p1 = x;
        b.phi[q] = 1.0; // Phi_0 = 1
        if (M >= 1) b.phi[Nq + q] = std::sqrt(3.0) * x;
        for (int k = 2; k <= M; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            b.phi[static_cast<size_t>(k) * Nq + q] = std::sqrt(2.0 * k + 1.0) * p2;
            p0 = p1;
            p1 = p2;
        }
    }
    return b;
}

double evaluate_phi(int k, double z) {
    double p0 = 1.0, p1 = z;
    if (k == 0) return 1.0;
    for (int j = 1; j < k; ++j) {
        double p2 = ((2.0 * j + 1.0) * z * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * k + 1.0) * p1;
}

void project_samples(const GpcBasis& basis, const double* values, double* coeffs) {
    for (int k = 0; k <= basis.M; ++k) {
        const double* row = basis.phi.data() + static_cast<size_t>(k) * basis.Nq;
        double acc = 0.0;
        for (int q = 0; q < basis.Nq; ++q) acc += basis.w[q] * row[q] * values[q];
        coeffs[k] = acc;
    }
}

double reconstruct(const GpcBasis& basis, const double* coeffs, double z) {
    // evaluate all Phi_k(z) on the fly to avoid repeated recurrences
    double acc = coeffs[0];
    if (basis.M >= 1) acc += coeffs[1] * std::sqrt(3.0) * z;
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= basis.M; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        acc += coeffs[k] * std::sqrt(2.0 * k + 1.0) * p2;
        p0 = p1;
        p1 = p2;
    }
    return acc;
}

double reconstruct_at_node(const GpcBasis& basis, const double* coeffs, int q) {
    double acc = 0.0;
    for (int k = 0; k <= basis.M; ++k) acc += coeffs[k] * basis.phi_at(k, q);
    return acc;
}

double coeff_mean(const double* coeffs) { return coeffs[0]; }

double coeff_variance(const double* coeffs, int M) {
    double acc = 0.0;
    for (int k = 1; k <= M; ++k) acc += coeffs[k] * coeffs[k];
    return acc;
}

} // namespace fpsg
