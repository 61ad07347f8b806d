#include "fpsg/quasi_eq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fpsg {

static double mass_of(const VelocityGrid& grid, const double* f) {
    double mass = trapezoid(grid, f);
    if (!(mass > 0.0))
        throw std::runtime_error("compute_fq: state has nonpositive mass");
    return mass;
}

static void scale_to_mass(const VelocityGrid& grid, double target, double* fq) {
    double mass = trapezoid(grid, fq);
    if (!(mass > 0.0))
        throw std::runtime_error("compute_fq: quasi-equilibrium has nonpositive mass");
    double c = target / mass;
    for (int j = 0; j < grid.N; ++j) fq[j] *= c;
}

void compute_fq(const Model& m, double z, const VelocityGrid& grid,
                const double* f, double* fq) {
    const int N = grid.N;
    switch (m.kind) {
    case ModelKind::ClassicalFP: {
        double s = m.sigma(z);
        for (int j = 0; j < N; ++j) {
            double v = grid.v[j];
            fq[j] = std::exp(-v * v / (2.0 * s));
        }
        break;
    }
    case ModelKind::Opinion: {
        // closed form of exp{-int (B + D')/D} for B = gamma (v-u) and
        // D = sigma^2/2 (1-v^2)^2:
        //   (1-v^2)^{-2} (1+v)^{c} (1-v)^{-c} exp{-gamma (1-uv)/(sigma^2 (1-v^2))}
        // with c = gamma u / (2 sigma^2); the essential singularity wins at
        // v = +-1, so those nodes carry exactly zero density.
        double g = m.gamma(z), s2 = m.sigma2, u = m.opinion_mean;
        double c = g * u / (2.0 * s2);
        std::vector<double> expo(N, -1e300);
        double emax = -1e300;
        for (int j = 0; j < N; ++j) {
            double v = grid.v[j];
            double w = 1.0 - v * v;
            if (w <= 0.0) continue;
            expo[j] = -2.0 * std::log(w) + c * (std::log1p(v) - std::log1p(-v))
                    - g * (1.0 - u * v) / (s2 * w);
            emax = std::max(emax, expo[j]);
        }
        for (int j = 0; j < N; ++j)
            fq[j] = expo[j] <= -1e299 ? 0.0 : std::exp(expo[j] - emax);
        break;
    }
    case ModelKind::Swarming: {
        double mass = 0.0, mom = 0.0;
        for (int j = 0; j < N; ++j) {
            mass += grid.cw[j] * f[j];
            mom += grid.cw[j] * grid.v[j] * f[j];
        }
        if (!(mass > 0.0))
            throw std::runtime_error("compute_fq: state has nonpositive mass");
        swarming_equilibrium_given_mean(m, z, mom / mass, grid, fq);
        for (int j = 0; j < N; ++j) fq[j] *= mass;
        return; // already mass-matched
    }
    case ModelKind::BoundedConfidence:
        compute_fq_generic(m, z, grid, f, fq);
        return;
    }
    scale_to_mass(grid, mass_of(grid, f), fq);
}

static void fq_from_flux_ode(const Model& m, double z, const VelocityGrid& grid,
                             const double* f, const double* b, double* fq) {
    const int N = grid.N;
    std::vector<double> d(N), dd(N);
    diffusion_field(m, z, grid, d.data());
    diffusion_derivative_field(m, z, grid, dd.data());
    flux_ode_density(grid, b, d.data(), dd.data(), fq);
    scale_to_mass(grid, mass_of(grid, f), fq);
}

void compute_fq_generic(const Model& m, double z, const VelocityGrid& grid,
                        const double* f, double* fq) {
    std::vector<double> b(grid.N);
    drift_field(m, z, grid, f, b.data());
    fq_from_flux_ode(m, z, grid, f, b.data(), fq);
}

void compute_fq_from_drift(const Model& m, double z, const VelocityGrid& grid,
                           const double* f, const double* b, double* fq) {
    if (m.kind == ModelKind::BoundedConfidence)
        fq_from_flux_ode(m, z, grid, f, b, fq);
    else
        compute_fq(m, z, grid, f, fq);
}

} // namespace fpsg
