#pragma once

#include "fpsg/models.hpp"

namespace fpsg {

/// Flux-annihilating quasi-equilibrium built from the current state slice f at
/// parameter z, scaled to carry exactly the trapezoid mass of f. The exponent
/// is evaluated in closed form where the model admits one (classical
/// Maxwellian, opinion, swarming with the momentum of f); the bounded
/// confidence model falls back to quadrature of the vanishing-flux ODE.
void compute_fq(const Model& m, double z, const VelocityGrid& grid,
                const double* f, double* fq);

/// Quadrature route for any model: cumulative integration of -(B[f] + D')/D
/// anchored at the center node. Mass-matched to f like compute_fq. The
/// closed forms above avoid its construction error where available.
void compute_fq_generic(const Model& m, double z, const VelocityGrid& grid,
                        const double* f, double* fq);

/// Same dispatch as compute_fq, but with the drift samples B[f] supplied by
/// the caller so the nonlocal models can reuse a cached evaluation; the
/// closed-form kinds ignore b.
void compute_fq_from_drift(const Model& m, double z, const VelocityGrid& grid,
                           const double* f, const double* b, double* fq);

} // namespace fpsg
