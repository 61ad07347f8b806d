#pragma once

#include "fpsg/models.hpp"

namespace fpsg {

/// Time-dependent closed-form solution of the classical linear model
/// d/dt f = d/dv [K(z) v f + K(z) sigma(z) d/dv f] started from the
/// anisotropic datum alpha v^2 exp(-beta v^2) with unit mass and temperature
/// sigma(z). The solution keeps the Gaussian-times-quadratic form
///   f(z,v,t) = (A(z,t) + B(z,t) v^2) exp(-s(z,t) v^2)
/// for all times and relaxes to the Maxwellian with temperature sigma(z).

/// Inverse-width s(z,t); s(0) = 3/(2 sigma), s(inf) = 1/(2 sigma).
double exact_classical_s(double K, double sigma, double t);

/// Pointwise value of the solution for scalar coefficients.
double exact_classical_value(double K, double sigma, double v, double t);

/// Model-level wrapper; requires kind == ClassicalFP.
double exact_classical_solution(const Model& m, double z, double v, double t);

} // namespace fpsg
