#include "fpsg/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fpsg {

Model make_classical(ZProfile K, ZProfile sigma) {
    Model m;
    m.kind = ModelKind::ClassicalFP;
    m.K = std::move(K);
    m.sigma = std::move(sigma);
    return m;
}

Model make_opinion(ZProfile gamma, double sigma2, double mean) {
    Model m;
    m.kind = ModelKind::Opinion;
    m.gamma = std::move(gamma);
    m.sigma2 = sigma2;
    m.opinion_mean = mean;
    return m;
}

Model make_bounded_confidence(ZProfile Delta, double sigma2, BcKernel kernel, double beta) {
    Model m;
    m.kind = ModelKind::BoundedConfidence;
    m.Delta = std::move(Delta);
    m.sigma2 = sigma2;
    m.kernel = kernel;
    m.beta = beta;
    return m;
}

Model make_swarming(ZProfile alpha, ZProfile D) {
    Model m;
    m.kind = ModelKind::Swarming;
    m.alpha = std::move(alpha);
    m.D = std::move(D);
    return m;
}

bool is_linear(const Model& m) {
    return m.kind == ModelKind::ClassicalFP || m.kind == ModelKind::Opinion;
}

bool is_nonlocal(const Model& m) { return !is_linear(m); }

void validate_model(const Model& m, const std::vector<double>& z_samples) {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("validate_model: " + what);
    };
    for (double z : z_samples) {
        switch (m.kind) {
        case ModelKind::ClassicalFP:
            if (!m.K || !m.sigma) fail("classical model needs K and sigma");
            if (!(m.K(z) > 0.0)) fail("K(z) must be positive");
            if (!(m.sigma(z) > 0.0)) fail("sigma(z) must be positive");
            break;
        case ModelKind::Opinion:
            if (!m.gamma) fail("opinion model needs gamma");
            if (!(m.gamma(z) > 0.0)) fail("gamma(z) must be positive");
            if (!(m.sigma2 > 0.0)) fail("sigma^2 must be positive");
            break;
        case ModelKind::BoundedConfidence: {
            if (!m.Delta) fail("bounded confidence model needs Delta");
            double D = m.Delta(z);
            if (!(D >= 0.0 && D <= 2.0)) fail("Delta(z) must lie in [0,2]");
            if (!(m.sigma2 > 0.0)) fail("sigma^2 must be positive");
            if (m.kernel == BcKernel::Sigmoid && !(m.beta > 0.0))
                fail("sigmoid sharpness beta must be positive");
            break;
        }
        case ModelKind::Swarming:
            if (!m.alpha || !m.D) fail("swarming model needs alpha and D");
            if (!(m.D(z) > 0.0)) fail("D(z) must be positive");
            break;
        }
    }
}

std::pair<double, double> default_domain(const Model& m) {
    switch (m.kind) {
    case ModelKind::ClassicalFP: {
        double smax = 0.0;
        for (int i = 0; i <= 128; ++i) {
            double z = -1.0 + 2.0 * i / 128.0;
            smax = std::max(smax, m.sigma(z));
        }
        double L = 8.0 * std::sqrt(smax);
        return {-L, L};
    }
    case ModelKind::Opinion:
    case ModelKind::BoundedConfidence:
        return {-1.0, 1.0};
    case ModelKind::Swarming:
        return {-2.0, 2.0};
    }
    return {-1.0, 1.0};
}

// Interaction kernel of the bounded confidence model.
static double bc_kernel_value(const Model& m, double z, double v, double vs) {
    if (m.kernel == BcKernel::Indicator)
        return std::abs(v - vs) <= m.Delta(z) ? 1.0 : 0.0;
    double d = m.Delta(z);
    return 1.0 / (1.0 + std::exp(-m.beta * (v - vs + d)))
         / (1.0 + std::exp(-m.beta * (-v + vs + d)));
}

static double nodal_mean(const VelocityGrid& grid, const double* f, double* mass_out) {
    double mass = 0.0, mom = 0.0;
    for (int j = 0; j < grid.N; ++j) {
        mass += grid.cw[j] * f[j];
        mom += grid.cw[j] * grid.v[j] * f[j];
    }
    if (mass_out) *mass_out = mass;
    return mom;
}

void drift_field(const Model& m, double z, const VelocityGrid& grid,
                 const double* f, double* b) {
    const int N = grid.N;
    switch (m.kind) {
    case ModelKind::ClassicalFP: {
        double K = m.K(z);
        for (int j = 0; j < N; ++j) b[j] = K * grid.v[j];
        break;
    }
    case ModelKind::Opinion: {
        double g = m.gamma(z);
        for (int j = 0; j < N; ++j) b[j] = g * (grid.v[j] - m.opinion_mean);
        break;
    }
    case ModelKind::BoundedConfidence: {
        if (!f) throw std::invalid_argument("drift_field: bounded confidence needs f");
        for (int j = 0; j < N; ++j) {
            double acc = 0.0;
            for (int l = 0; l < N; ++l)
                acc += grid.cw[l] * bc_kernel_value(m, z, grid.v[j], grid.v[l])
                     * (grid.v[j] - grid.v[l]) * f[l];
            b[j] = acc;
        }
        break;
    }
    case ModelKind::Swarming: {
        if (!f) throw std::invalid_argument("drift_field: swarming needs f");
        double mass = 0.0;
        double mom = nodal_mean(grid, f, &mass);
        if (std::abs(mass) < 1e-300)
            throw std::runtime_error("drift_field: zero-mass state has no momentum");
        double u = mom / mass;
        double a = m.alpha(z);
        for (int j = 0; j < N; ++j) {
            double v = grid.v[j];
            b[j] = a * v * (v * v - 1.0) + (v - u);
        }
        break;
    }
    }
}

void diffusion_field(const Model& m, double z, const VelocityGrid& grid, double* d) {
    const int N = grid.N;
    switch (m.kind) {
    case ModelKind::ClassicalFP: {
        double val = m.K(z) * m.sigma(z);
        for (int j = 0; j < N; ++j) d[j] = val;
        break;
    }
    case ModelKind::Opinion:
    case ModelKind::BoundedConfidence: {
        for (int j = 0; j < N; ++j) {
            double w = 1.0 - grid.v[j] * grid.v[j];
            d[j] = 0.5 * m.sigma2 * w * w;
        }
        break;
    }
    case ModelKind::Swarming: {
        double val = m.D(z);
        for (int j = 0; j < N; ++j) d[j] = val;
        break;
    }
    }
}

void diffusion_derivative_field(const Model& m, double z, const VelocityGrid& grid,
                                double* dd) {
    const int N = grid.N;
    switch (m.kind) {
    case ModelKind::ClassicalFP:
    case ModelKind::Swarming:
        for (int j = 0; j < N; ++j) dd[j] = 0.0;
        break;
    case ModelKind::Opinion:
    case ModelKind::BoundedConfidence:
        for (int j = 0; j < N; ++j) {
            double v = grid.v[j];
            dd[j] = -2.0 * m.sigma2 * v * (1.0 - v * v);
        }
        break;
    }
    (void)z;
}

void initial_field(const Model& m, double z, const VelocityGrid& grid, double* f0) {
    const int N = grid.N;
    switch (m.kind) {
    case ModelKind::ClassicalFP: {
        // anisotropic datum of the relaxation benchmark: alpha v^2 e^{-beta v^2}
        // with unit mass and temperature sigma(z)
        double beta = 1.5 / m.sigma(z);
        double alpha = 2.0 * beta * std::sqrt(beta) / std::sqrt(M_PI);
        for (int j = 0; j < N; ++j) {
            double v = grid.v[j];
            f0[j] = alpha * v * v * std::exp(-beta * v * v);
        }
        break;
    }
    case ModelKind::Opinion:
    case ModelKind::BoundedConfidence: {
        // symmetric bimodal opinion datum, peaks at +-1/2
        const double s2 = 0.05;
        for (int j = 0; j < N; ++j) {
            double v = grid.v[j];
            double a = v - 0.5, b = v + 0.5;
            f0[j] = std::exp(-a * a / s2) + std::exp(-b * b / s2);
        }
        break;
    }
    case ModelKind::Swarming: {
        // single off-center bump; its momentum selects the travelling branch
        const double s2 = 1.0 / 40.0;
        for (int j = 0; j < N; ++j) {
            double a = grid.v[j] - 0.5;
            f0[j] = std::exp(-a * a / (2.0 * s2));
        }
        break;
    }
    }
    double mass = trapezoid(grid, f0);
    if (!(mass > 0.0))
        throw std::runtime_error("initial_field: datum has nonpositive mass on this grid");
    for (int j = 0; j < N; ++j) f0[j] /= mass;
    (void)z;
}

void analytic_steady_state(const Model& m, double z, const VelocityGrid& grid,
                           double* finf) {
    const int N = grid.N;
    switch (m.kind) {
    case ModelKind::ClassicalFP: {
        double s = m.sigma(z);
        double norm = 1.0 / std::sqrt(2.0 * M_PI * s);
        for (int j = 0; j < N; ++j) {
            double v = grid.v[j];
            finf[j] = norm * std::exp(-v * v / (2.0 * s));
        }
        break;
    }
    case ModelKind::Opinion: {
        // vanishing-flux ODE integrated with the cumulative trapezoid rule
        std::vector<double> b(N), d(N), dd(N);
        drift_field(m, z, grid, nullptr, b.data());
        diffusion_field(m, z, grid, d.data());
        diffusion_derivative_field(m, z, grid, dd.data());
        flux_ode_density(grid, b.data(), d.data(), dd.data(), finf);
        double mass = trapezoid(grid, finf);
        if (!(mass > 0.0))
            throw std::runtime_error("analytic_steady_state: degenerate density");
        for (int j = 0; j < N; ++j) finf[j] /= mass;
        break;
    }
    default:
        throw std::invalid_argument(
            "analytic_steady_state: only classical and opinion kinds have one");
    }
}

void swarming_equilibrium_given_mean(const Model& m, double z, double u,
                                     const VelocityGrid& grid, double* finf) {
    if (m.kind != ModelKind::Swarming)
        throw std::invalid_argument("swarming_equilibrium_given_mean: wrong model kind");
    const int N = grid.N;
    double a = m.alpha(z), D = m.D(z);
    double emax = -1e300;
    std::vector<double> expo(N);
    for (int j = 0; j < N; ++j) {
        double v = grid.v[j];
        expo[j] = -(0.25 * a * v * v * v * v + 0.5 * (1.0 - a) * v * v - u * v) / D;
        emax = std::max(emax, expo[j]);
    }
    for (int j = 0; j < N; ++j) finf[j] = std::exp(expo[j] - emax);
    double mass = trapezoid(grid, finf);
    for (int j = 0; j < N; ++j) finf[j] /= mass;
}

double beta_steady_state(double v, double u, double lambda) {
    if (v <= -1.0 || v >= 1.0) return 0.0;
    double a = (1.0 + u) / lambda;
    double b = (1.0 - u) / lambda;
    double logB = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double logf = (a - 1.0) * std::log1p(v) + (b - 1.0) * std::log1p(-v)
                - (a + b - 1.0) * std::log(2.0) - logB;
    return std::exp(logf);
}

double inverse_gamma_steady_state(double v, double mu) {
    if (v <= 0.0) return 0.0;
    double th = mu - 1.0; // scale; fixes the mean at 1
    double logf = mu * std::log(th) - std::lgamma(mu)
                - (1.0 + mu) * std::log(v) - th / v;
    return std::exp(logf);
}

} // namespace fpsg
