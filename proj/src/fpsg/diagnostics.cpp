#include "fpsg/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace fpsg {

namespace {

int restriction_stride(int coarse_n, int ref_n) {
    if (coarse_n < 2 || ref_n < coarse_n)
        throw std::invalid_argument("restriction: reference grid is coarser than the approximation");
    if ((ref_n - 1) % (coarse_n - 1) != 0)
        throw std::invalid_argument("restriction: grids do not nest (N_ref-1 must be a multiple of N-1)");
    return (ref_n - 1) / (coarse_n - 1);
}

} // namespace

double field_mass(const VelocityGrid& g, const CoefficientField& c) {
    return trapezoid(g, c.row(0));
}

double field_first_moment(const VelocityGrid& g, const CoefficientField& c) {
    const double* f = c.row(0);
    double acc = 0.0;
    for (int j = 0; j < g.N; ++j) acc += g.cw[j] * g.v[j] * f[j];
    return acc;
}

void variance_profile(const CoefficientField& c, double* var) {
    for (int j = 0; j < c.N; ++j) var[j] = 0.0;
    for (int k = 1; k <= c.M; ++k) {
        const double* row = c.row(k);
        for (int j = 0; j < c.N; ++j) var[j] += row[j] * row[j];
    }
}

double eps_var(const VelocityGrid& coarse, const CoefficientField& approx,
               const CoefficientField& ref) {
    if (approx.N != coarse.N)
        throw std::invalid_argument("eps_var: field does not match the coarse grid");
    const int stride = restriction_stride(approx.N, ref.N);

    std::vector<double> va(approx.N), vr_full(ref.N);
    variance_profile(approx, va.data());
    variance_profile(ref, vr_full.data());

    double num = 0.0, den = 0.0;
    for (int j = 0; j < coarse.N; ++j) {
        const double vr = vr_full[j * stride];
        num += coarse.cw[j] * std::abs(va[j] - vr);
        den += coarse.cw[j] * std::abs(vr);
    }
    if (den == 0.0)
        throw std::runtime_error("eps_var: reference variance is identically zero");
    return num / den;
}

double l2_error(const VelocityGrid& coarse, const CoefficientField& approx,
                const CoefficientField& ref) {
    if (approx.N != coarse.N)
        throw std::invalid_argument("l2_error: field does not match the coarse grid");
    const int stride = restriction_stride(approx.N, ref.N);
    const int shared = std::min(approx.M, ref.M);

    double total = 0.0;
    for (int k = 0; k <= shared; ++k) {
        const double* ra = approx.row(k);
        const double* rr = ref.row(k);
        for (int j = 0; j < coarse.N; ++j) {
            const double d = ra[j] - rr[j * stride];
            total += coarse.cw[j] * d * d;
        }
    }
    return std::sqrt(total);
}

NodalField nodal_view(const GpcBasis& basis, const CoefficientField& c) {
    if (basis.M != c.M)
        throw std::invalid_argument("nodal_view: basis order does not match the field");
    NodalField out(basis.Nq, c.N);
    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const Mat> phi(basis.phi.data(), basis.M + 1, basis.Nq);
    Eigen::Map<const Mat> coeff(c.a.data(), c.M + 1, c.N);
    Eigen::Map<Mat> nodal(out.a.data(), out.Nq, out.N);
    nodal.noalias() = phi.transpose() * coeff;
    return out;
}

double variance_of_l1_norm(const GpcBasis& basis, const VelocityGrid& g,
                           const CoefficientField& c) {
    NodalField nodal = nodal_view(basis, c);
    double mean = 0.0, second = 0.0;
    for (int q = 0; q < basis.Nq; ++q) {
        const double* f = nodal.row(q);
        double l1 = 0.0;
        for (int j = 0; j < g.N; ++j) l1 += g.cw[j] * std::abs(f[j]);
        mean += basis.w[q] * l1;
        second += basis.w[q] * l1 * l1;
    }
    double var = second - mean * mean;
    return var > 0.0 ? var : 0.0;
}

EntropyStats relative_entropy_nodal(const VelocityGrid& g, const NodalField& f,
                                    const NodalField& ref) {
    if (f.Nq != ref.Nq || f.N != ref.N)
        throw std::invalid_argument("relative_entropy_nodal: field shapes differ");
    constexpr double floor = 1e-300;
    EntropyStats stats;
    stats.per_node.resize(f.Nq);
    for (int q = 0; q < f.Nq; ++q) {
        const double* fr = f.row(q);
        const double* gr = ref.row(q);
        double h = 0.0;
        for (int j = 0; j < g.N; ++j) {
            double fv = fr[j];
            double gv = gr[j];
            if (fv <= 0.0 || gv <= 0.0) {
                ++stats.clipped;
                if (fv <= 0.0) fv = floor;
                if (gv <= 0.0) gv = floor;
            }
            h += g.cw[j] * fv * std::log(fv / gv);
        }
        stats.per_node[q] = h;
        if (q == 0 || h > stats.max_value) stats.max_value = h;
    }
    return stats;
}

} // namespace fpsg
