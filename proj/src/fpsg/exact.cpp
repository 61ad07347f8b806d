#include "fpsg/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace fpsg {

double exact_classical_s(double K, double sigma, double t) {
    // algebraically equal to e^{2Kt} / (2 sigma e^{2Kt} - 4 sigma/3) but free
    // of overflow for large Kt
    double E = std::exp(-2.0 * K * t);
    return 1.0 / (2.0 * sigma * (1.0 - (2.0 / 3.0) * E));
}

double exact_classical_value(double K, double sigma, double v, double t) {
    double E = std::exp(-2.0 * K * t);
    double s = exact_classical_s(K, sigma, t);
    double D = (4.0 * sigma / 3.0) * E; // relative weight of the v^2 part
    double A = std::sqrt(s / M_PI) * (1.0 - 0.5 * s * D);
    double B = s * s * std::sqrt(s) * D / std::sqrt(M_PI);
    return (A + B * v * v) * std::exp(-s * v * v);
}

double exact_classical_solution(const Model& m, double z, double v, double t) {
    if (m.kind != ModelKind::ClassicalFP)
        throw std::invalid_argument("exact_classical_solution: wrong model kind");
    return exact_classical_value(m.K(z), m.sigma(z), v, t);
}

} // namespace fpsg
