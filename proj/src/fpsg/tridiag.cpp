#include "fpsg/tridiag.hpp"

#include <cmath>
#include <stdexcept>

namespace fpsg {

void tridiag_factor(TridiagPivLU& f, int n, const double* lo, const double* di,
                    const double* up) {
    f.n = n;
    f.d.assign(di, di + n);
    f.dl.assign(n > 1 ? n - 1 : 0, 0.0);
    f.du.assign(n > 1 ? n - 1 : 0, 0.0);
    f.du2.assign(n > 2 ? n - 2 : 0, 0.0);
    f.piv.assign(n > 1 ? n - 1 : 0, 0);
    for (int i = 0; i + 1 < n; ++i) {
        f.dl[i] = lo[i + 1];
        f.du[i] = up[i];
    }
    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(f.d[i]) >= std::abs(f.dl[i])) {
            // no interchange
            if (f.d[i] == 0.0)
                throw std::runtime_error("tridiag_factor: exactly singular matrix");
            double fact = f.dl[i] / f.d[i];
            f.dl[i] = fact;
            f.d[i + 1] -= fact * f.du[i];
            if (i + 2 < n) f.du2[i] = 0.0;
            f.piv[i] = 0;
        } else {
            // swap rows i and i+1
            double fact = f.d[i] / f.dl[i];
            f.d[i] = f.dl[i];
            f.dl[i] = fact;
            double temp = f.du[i];
            f.du[i] = f.d[i + 1];
            f.d[i + 1] = temp - fact * f.d[i + 1];
            if (i + 2 < n) {
                f.du2[i] = f.du[i + 1];
                f.du[i + 1] = -fact * f.du[i + 1];
            }
            f.piv[i] = 1;
        }
    }
    if (f.d[n - 1] == 0.0)
        throw std::runtime_error("tridiag_factor: exactly singular matrix");
}

void tridiag_solve(const TridiagPivLU& f, double* x) {
    const int n = f.n;
    for (int i = 0; i + 1 < n; ++i) {
        if (f.piv[i] == 0) {
            x[i + 1] -= f.dl[i] * x[i];
        } else {
            double temp = x[i];
            x[i] = x[i + 1];
            x[i + 1] = temp - f.dl[i] * x[i];
        }
    }
    x[n - 1] /= f.d[n - 1];
    if (n > 1) x[n - 2] = (x[n - 2] - f.du[n - 2] * x[n - 1]) / f.d[n - 2];
    for (int i = n - 3; i >= 0; --i)
        x[i] = (x[i] - f.du[i] * x[i + 1] - f.du2[i] * x[i + 2]) / f.d[i];
}

BlockTridiagFactor factor_block_tridiag(const BlockTridiag& A) {
    const int nb = A.nb, bs = A.bs;
    BlockTridiagFactor f;
    f.nb = nb;
    f.bs = bs;
    f.lu.reserve(nb);
    f.C.resize(nb);
    f.up.resize(nb);
    using Mat = Eigen::MatrixXd;
    using MapRow = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                  Eigen::RowMajor>>;
    Mat pivot = MapRow(A.block(A.di, 0), bs, bs);
    f.lu.emplace_back(pivot);
    for (int j = 1; j < nb; ++j) {
        f.up[j - 1] = MapRow(A.block(A.up, j - 1), bs, bs);
        Mat loj = MapRow(A.block(A.lo, j), bs, bs);
        f.C[j] = loj * f.lu[j - 1].inverse();
        pivot = MapRow(A.block(A.di, j), bs, bs);
        pivot.noalias() -= f.C[j] * f.up[j - 1];
        f.lu.emplace_back(pivot);
    }
    return f;
}

void solve_block_tridiag(const BlockTridiagFactor& f, double* x) {
    const int nb = f.nb, bs = f.bs;
    using Vec = Eigen::Map<Eigen::VectorXd>;
    Eigen::VectorXd tmp(bs);
    for (int j = 1; j < nb; ++j) {
        Vec xj(x + static_cast<size_t>(j) * bs, bs);
        Vec xm(x + static_cast<size_t>(j - 1) * bs, bs);
        xj.noalias() -= f.C[j] * xm;
    }
    Vec xe(x + static_cast<size_t>(nb - 1) * bs, bs);
    tmp = f.lu[nb - 1].solve(xe);
    xe = tmp;
    for (int j = nb - 2; j >= 0; --j) {
        Vec xj(x + static_cast<size_t>(j) * bs, bs);
        Vec xp(x + static_cast<size_t>(j + 1) * bs, bs);
        xj.noalias() -= f.up[j] * xp;
        tmp = f.lu[j].solve(xj);
        xj = tmp;
    }
}

} // namespace fpsg
