#include "fpsg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fpsg {

VelocityGrid make_grid(double vmin, double vmax, int N) {
    if (N < 3) throw std::invalid_argument("make_grid: need at least 3 nodes");
    if (!(vmax > vmin)) throw std::invalid_argument("make_grid: empty domain");
    VelocityGrid g;
    g.N = N;
    g.vmin = vmin;
    g.vmax = vmax;
    g.dv = (vmax - vmin) / (N - 1);
    g.v.resize(N);
    for (int j = 0; j < N; ++j)
        g.v[j] = (vmin * (N - 1 - j) + vmax * j) / (N - 1);
    g.v[0] = vmin;
    g.v[N - 1] = vmax;
    g.cw.assign(N, g.dv);
    g.cw[0] = 0.5 * g.dv;
    g.cw[N - 1] = 0.5 * g.dv;
    return g;
}

double trapezoid(const VelocityGrid& g, const double* f) {
    double acc = 0.0;
    for (int j = 0; j < g.N; ++j) acc += g.cw[j] * f[j];
    return acc;
}

void apply_fp_operator(const VelocityGrid& g, const double* b, const double* d,
                       const double* f, double* out) {
    const int N = g.N;
    const double inv_dv = 1.0 / g.dv;
    double flux_left = 0.0; // no flux through vmin
    for (int j = 0; j < N; ++j) {
        double flux_right = 0.0; // no flux through vmax
        if (j < N - 1) {
            flux_right = 0.25 * (b[j] + b[j + 1]) * (f[j] + f[j + 1])
                       + (d[j + 1] * f[j + 1] - d[j] * f[j]) * inv_dv;
        }
        out[j] = (flux_right - flux_left) / g.cw[j];
        flux_left = flux_right;
    }
}

void assemble_fp_tridiag(const VelocityGrid& g, const double* b, const double* d,
                         double* lo, double* di, double* up) {
    const int N = g.N;
    const double inv_dv = 1.0 / g.dv;
    for (int j = 0; j < N; ++j) { lo[j] = 0.0; di[j] = 0.0; up[j] = 0.0; }
    for (int j = 0; j < N; ++j) {
        const double inv_w = 1.0 / g.cw[j];
        if (j < N - 1) { // right interface contributes +F_{j+1/2}/cw_j
            double bb = 0.5 * (b[j] + b[j + 1]);
            di[j] += (0.5 * bb - d[j] * inv_dv) * inv_w;
            up[j] += (0.5 * bb + d[j + 1] * inv_dv) * inv_w;
        }
        if (j > 0) { // left interface contributes -F_{j-1/2}/cw_j
            double bb = 0.5 * (b[j - 1] + b[j]);
            di[j] -= (0.5 * bb + d[j] * inv_dv) * inv_w;
            lo[j] -= (0.5 * bb - d[j - 1] * inv_dv) * inv_w;
        }
    }
}

void flux_ode_density(const VelocityGrid& g, const double* b, const double* d,
                      const double* dd, double* out) {
    const int N = g.N;
    const int jc = N / 2;
    if (!(d[jc] > 0.0))
        throw std::invalid_argument("flux_ode_density: diffusion must be positive "
                                    "at the anchor node");
    // contiguous positive-diffusion range around the anchor; outside it the
    // density is pinned to zero (degenerate ends such as (1-v^2)^2 kernels)
    int lo = jc, hi = jc;
    while (lo > 0 && d[lo - 1] > 0.0) --lo;
    while (hi < N - 1 && d[hi + 1] > 0.0) ++hi;

    std::vector<double> s(N, 0.0);
    for (int j = lo; j <= hi; ++j) s[j] = -(b[j] + dd[j]) / d[j];

    // Per-interval increments, cubic-interpolation accurate where a 4-point
    // stencil fits inside the range (the construction error of the density
    // then scales like dv^4, which keeps the equilibrium comparable between a
    // coarse grid and its refinement); trapezoid fallback on short ranges.
    std::vector<double> inc(N, 0.0);
    const double h24 = g.dv / 24.0;
    for (int j = lo; j < hi; ++j) {
        if (hi - lo < 3)
            inc[j] = 0.5 * g.dv * (s[j] + s[j + 1]);
        else if (j - 1 >= lo && j + 2 <= hi)
            inc[j] = h24 * (-s[j - 1] + 13.0 * s[j] + 13.0 * s[j + 1] - s[j + 2]);
        else if (j == lo)
            inc[j] = h24 * (9.0 * s[j] + 19.0 * s[j + 1] - 5.0 * s[j + 2] + s[j + 3]);
        else // j + 1 == hi
            inc[j] = h24 * (9.0 * s[j + 1] + 19.0 * s[j] - 5.0 * s[j - 1] + s[j - 2]);
    }

    std::vector<double> expo(N, 0.0);
    for (int j = jc + 1; j <= hi; ++j) expo[j] = expo[j - 1] + inc[j - 1];
    for (int j = jc - 1; j >= lo; --j) expo[j] = expo[j + 1] - inc[j];
    double emax = *std::max_element(expo.begin() + lo, expo.begin() + hi + 1);
    for (int j = 0; j < N; ++j)
        out[j] = (j >= lo && j <= hi) ? std::exp(expo[j] - emax) : 0.0;
}

} // namespace fpsg
