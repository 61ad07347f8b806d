#pragma once

#include <vector>

#include "fpsg/gpc.hpp"
#include "fpsg/grid.hpp"
#include "fpsg/sg.hpp"

namespace fpsg {

/// Trapezoid mass and first moment of the mean field (mode 0).
double field_mass(const VelocityGrid& g, const CoefficientField& c);
double field_first_moment(const VelocityGrid& g, const CoefficientField& c);

/// Pointwise variance of the expansion: var[j] = sum_{k>=1} a_kj^2.
void variance_profile(const CoefficientField& c, double* var);

/// Relative L1 distance between the variance profiles of two fields given on
/// grids with nested nodes (the reference grid refines the coarse one by an
/// integer factor). Throws when the grids do not nest or the reference
/// variance vanishes identically.
double eps_var(const VelocityGrid& coarse, const CoefficientField& approx,
               const CoefficientField& ref);

/// L2_p error over the random and velocity variables via Parseval: compares
/// the modes both expansions carry (0..min(M, M_ref)) on the coarse nodes,
/// trapezoid in v, and takes the square root of the total.
double l2_error(const VelocityGrid& coarse, const CoefficientField& approx,
                const CoefficientField& ref);

/// Reconstruction at the z-quadrature nodes without a workspace (diagnostics
/// path; the assembly keeps its own cached variant).
NodalField nodal_view(const GpcBasis& basis, const CoefficientField& c);

/// Variance over z of the per-node L1 norms int |f(z_q, v)| dv.
double variance_of_l1_norm(const GpcBasis& basis, const VelocityGrid& g,
                           const CoefficientField& c);

/// Per-node relative Shannon entropy int f log(f/g) dv. Nonpositive values of
/// either density are clipped to 1e-300 and counted; a large count signals
/// loss of positivity rather than a diagnostics problem.
struct EntropyStats {
    std::vector<double> per_node;
    long clipped = 0;
    double max_value = 0.0;
};
EntropyStats relative_entropy_nodal(const VelocityGrid& g, const NodalField& f,
                                    const NodalField& ref);

} // namespace fpsg
