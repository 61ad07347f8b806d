#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fpsg/grid.hpp"

namespace fpsg {

enum class ModelKind { ClassicalFP, Opinion, BoundedConfidence, Swarming };

/// Interaction kernel variants for the bounded confidence model.
enum class BcKernel { Indicator, Sigmoid };

/// Scalar coefficient profile over the random parameter z in [-1,1].
using ZProfile = std::function<double(double)>;

/// One-dimensional Fokker-Planck model
///   d/dt f = d/dv [ B(z,v;f) f + d/dv (D(z,v) f) ]
/// from the catalog: classical (linear relaxation to a Maxwellian), opinion
/// formation on [-1,1], bounded confidence (nonlocal drift), and swarming
/// (nonlocal cubic drift). Unused profiles stay empty for a given kind.
struct Model {
    ModelKind kind = ModelKind::ClassicalFP;

    ZProfile K, sigma;      // classical: B = K(z) v, D = K(z) sigma(z)

    ZProfile gamma;         // opinion: B = gamma(z) (v - u)
    double sigma2 = 0.1;    // opinion / bounded confidence: sigma^2 in
                            // D = sigma^2/2 (1 - v^2)^2
    double opinion_mean = 0.0; // conserved mean opinion u, frozen from the
                               // initial datum

    ZProfile Delta;         // bounded confidence radius, values in [0,2]
    BcKernel kernel = BcKernel::Indicator;
    double beta = 10.0;     // sigmoid sharpness

    ZProfile alpha, D;      // swarming: B = alpha(z) v (v^2-1) + (v - u_f),
                            // D = D(z)
};

Model make_classical(ZProfile K, ZProfile sigma);
Model make_opinion(ZProfile gamma, double sigma2, double mean = 0.0);
Model make_bounded_confidence(ZProfile Delta, double sigma2,
                              BcKernel kernel = BcKernel::Indicator,
                              double beta = 10.0);
Model make_swarming(ZProfile alpha, ZProfile D);

bool is_linear(const Model& m);   // drift independent of f
bool is_nonlocal(const Model& m); // drift rebuilt from f every evaluation

/// Throws std::invalid_argument when a coefficient profile violates its
/// positivity/range constraint at any of the given z samples.
void validate_model(const Model& m, const std::vector<double>& z_samples);

/// Model-specific default velocity domain: [-1,1] for opinion and bounded
/// confidence, [-2,2] for swarming, and [-8 sqrt(max sigma), +...] for the
/// classical model (Maxwellian support at the largest temperature).
std::pair<double, double> default_domain(const Model& m);

/// Drift samples b_j = B(z, v_j; f). The nodal slice f (length grid.N) is
/// required for the nonlocal models and ignored by the linear ones.
void drift_field(const Model& m, double z, const VelocityGrid& grid,
                 const double* f, double* b);

/// Diffusion samples d_j = D(z, v_j) and the analytic derivative dD/dv.
void diffusion_field(const Model& m, double z, const VelocityGrid& grid, double* d);
void diffusion_derivative_field(const Model& m, double z, const VelocityGrid& grid,
                                double* dd);

/// Initial datum of the model's standard test, normalized to unit trapezoid
/// mass on the given grid.
void initial_field(const Model& m, double z, const VelocityGrid& grid, double* f0);

/// Stationary density for the models that admit one in closed or quadrature
/// form: classical (analytic Maxwellian) and opinion (vanishing-flux ODE
/// integrated with the cumulative trapezoid rule, unit trapezoid mass).
/// Throws for the other kinds.
void analytic_steady_state(const Model& m, double z, const VelocityGrid& grid,
                           double* finf);

/// Swarming stationary density for a prescribed momentum u_f, normalized to
/// unit trapezoid mass.
void swarming_equilibrium_given_mean(const Model& m, double z, double u,
                                     const VelocityGrid& grid, double* finf);

/// Pointwise beta equilibrium on (-1,1) for drift gamma (v-u) and diffusion
/// sigma^2/2 (1-v^2); lambda = sigma^2/gamma. Analytically normalized.
double beta_steady_state(double v, double u, double lambda);

/// Pointwise inverse gamma equilibrium on (0,inf) for drift gamma (v-1) and
/// diffusion sigma^2/2 v^2; mu = 1 + 2 gamma/sigma^2. Analytically normalized.
double inverse_gamma_steady_state(double v, double mu);

} // namespace fpsg
