#pragma once

#include <vector>

#include "fpsg/sg.hpp"
#include "fpsg/tridiag.hpp"

namespace fpsg {

/// Two-stage stiffly accurate singly-diagonal implicit Runge-Kutta scheme
/// (gamma = 1 - 1/sqrt(2), second order) for the linear kinds. It operates on
/// the materialized Galerkin matrix so the two stage systems share a single
/// cached block factorization of I - gamma*h*L. With the micro-macro scheme
/// the subtracted equilibrium enters as the constant source S = L*qhat: the
/// per-node masses that determine the quasi-equilibrium of a linear model are
/// conserved exactly, so recomputing it per stage would reproduce S bit for
/// bit.
struct Dirk2 {
    double h = 0.0;
    double gamma = 0.0;
    BlockTridiag L;
    BlockTridiagFactor fac;
    std::vector<double> S;                // grid-major constant source
    std::vector<double> x, k1, k2, y, r;  // grid-major scratch
};

Dirk2 make_dirk2(SGWorkspace& ws, Scheme scheme, double h, const CoefficientField& f0);
void dirk2_step(Dirk2& d, CoefficientField& f);

/// Semi-implicit two-stage scheme for the nonlocal kinds: an implicit-midpoint
/// predictor followed by an implicit-trapezoid corrector, with the nonlocal
/// drift and the micro-macro source frozen at the beginning of each stage.
/// Velocity transport is solved per z-node with pivoted tridiagonal
/// factorizations; the state returns to the Galerkin manifold through a
/// projection after every stage.
struct Imex2Scratch {
    NodalField F, Fs, Qn;
    CoefficientField cstar;
    std::vector<double> b, bq, lo, di, up, rhs, src;
    TridiagPivLU lu;
};

Imex2Scratch make_imex2_scratch(const SGWorkspace& ws);
void imex2_step(SGWorkspace& ws, Scheme scheme, double h, CoefficientField& f,
                Imex2Scratch& sc);

} // namespace fpsg
