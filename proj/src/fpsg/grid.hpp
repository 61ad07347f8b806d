#pragma once

#include <vector>

namespace fpsg {

/// Uniform node-centered velocity grid on [vmin, vmax] with exact endpoints.
/// cw holds the integration cell widths: dv in the interior, dv/2 at the two
/// boundary nodes, so that sum(cw) = vmax - vmin and sum_j cw[j] f[j] is the
/// trapezoid rule.
struct VelocityGrid {
    int N = 0;
    double vmin = 0.0, vmax = 0.0, dv = 0.0;
    std::vector<double> v;
    std::vector<double> cw;
};

VelocityGrid make_grid(double vmin, double vmax, int N);

double trapezoid(const VelocityGrid& g, const double* f);

/// Conservative flux form of the Fokker-Planck operator for one frozen
/// parameter sample:
///   out_j = (F_{j+1/2} - F_{j-1/2}) / cw_j,
///   F_{j+1/2} = (b_j+b_{j+1})/2 * (f_j+f_{j+1})/2 + (d_{j+1}f_{j+1} - d_j f_j)/dv,
/// with zero flux through both domain ends. Dividing by the trapezoid cell
/// width at the boundary makes the telescoped trapezoid mass exactly constant.
void apply_fp_operator(const VelocityGrid& g, const double* b, const double* d,
                       const double* f, double* out);

/// Tridiagonal matrix of the same operator with frozen coefficients b, d.
/// lo[j] multiplies f[j-1], di[j] multiplies f[j], up[j] multiplies f[j+1];
/// lo[0] and up[N-1] are zero.
void assemble_fp_tridiag(const VelocityGrid& g, const double* b, const double* d,
                         double* lo, double* di, double* up);

/// Unnormalized flux-annihilating density exp{-int (b + d')/d}, the integral
/// taken with the cumulative trapezoid rule anchored at the center node
/// (overflow-safe: the running maximum of the exponent is subtracted).
/// dd holds the analytic derivative of d. Nodes where d <= 0 (degenerate
/// diffusion at domain ends) get density zero; d must be positive at the
/// anchor.
void flux_ode_density(const VelocityGrid& g, const double* b, const double* d,
                      const double* dd, double* out);

} // namespace fpsg
