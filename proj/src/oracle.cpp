// SPDX-License-Identifier: Apache-2.0
#include "biphoton/oracle.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>

namespace biphoton {

namespace {

// iterative radix-2 FFT, forward sign convention e^{-2 pi i jk / N}
void fft_inplace(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Time-basis kernel values by FFT of the spectral kernel, used when the
/// model carries no analytic time kernel.  Returns TK(chi, xi) on the
/// xi-grid k * h/delta_t for k in [-(m-1), m-1].
std::vector<std::complex<double>> tk_row_fft(const PhiModel& phi, double chi,
                                             double dxi, int kmax) {
    // oversample xi by r so the kappa span pi r / dxi covers the kernel
    const int r = std::max(1, static_cast<int>(std::ceil(phi.kappa_cut * dxi / M_PI)) + 1);
    const double dxi_f = dxi / r;
    const double xi_span_needed = 2.0 * (kmax * dxi + 16.0);
    size_t N = 1024;
    while (static_cast<double>(N) * dxi_f < xi_span_needed) N <<= 1;
    const double dk = 2.0 * M_PI / (static_cast<double>(N) * dxi_f);
    const double K = 0.5 * static_cast<double>(N) * dk;
    std::vector<std::complex<double>> buf(N);
    for (size_t j = 0; j < N; ++j) buf[j] = phi.kernel(chi, -K + static_cast<double>(j) * dk);
    fft_inplace(buf);
    std::vector<std::complex<double>> out(2 * kmax + 1);
    for (int k = -kmax; k <= kmax; ++k) {
        const long l = static_cast<long>(k) * r;
        const size_t idx = static_cast<size_t>((l % static_cast<long>(N) + N) % N);
        const double xi = static_cast<double>(k) * dxi;
        const std::complex<double> phase(std::cos(K * xi), std::sin(K * xi));
        out[static_cast<size_t>(k + kmax)] = dk / (2.0 * M_PI) * phase * buf[idx];
    }
    return out;
}

double logdet_positive(Eigen::MatrixXd M, const char* what) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(std::move(M));
    const auto& U = lu.matrixLU();
    double logdet = 0;
    double sign = lu.permutationP().determinant();
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
        const double d = U(i, i);
        if (d == 0.0) throw NumericError(std::string(what) + ": singular determinant");
        sign *= (d > 0 ? 1.0 : -1.0);
        logdet += std::log(std::abs(d));
    }
    if (sign <= 0)
        throw NumericError(std::string(what) +
                           ": determinant lost positivity (grid too coarse or state "
                           "outside validity)");
    return logdet;
}

} // namespace

TimeGrid TimeGrid::make(const EntanglementParams& params, double h, double L,
                        bool allow_large) {
    if (!(h > 0) || !(L > 0)) throw DomainError("TimeGrid: h and L must be positive");
    if (h > params.delta_t / 8.0 * (1.0 + 1e-12))
        throw DomainError("TimeGrid: spacing must resolve the correlation width (h <= delta_t/8)");
    if (L < 4.0 * params.Delta_t * (1.0 - 1e-12))
        throw DomainError("TimeGrid: domain must cover the pulse (L >= 4 Delta_t)");
    TimeGrid g;
    g.h = h;
    g.m = static_cast<int>(std::lround(2.0 * L / h)) + 1;
    g.L = 0.5 * h * (g.m - 1);
    if (g.m > 4096 && !allow_large)
        throw DomainError("TimeGrid: m exceeds the 4096 guardrail");
    g.t.resize(g.m);
    for (int i = 0; i < g.m; ++i) g.t[i] = -g.L + i * h;
    return g;
}

CovarianceGrid build_covariance(const BiphotonState& state, const TimeGrid& grid) {
    CovarianceGrid cov;
    cov.grid = grid;
    cov.params = state.params;
    cov.scale = state.phi.scale;
    const int m = grid.m;
    const double dt = state.params.delta_t;
    const double Dt = state.params.Delta_t;
    const double amp = grid.h * state.phi.scale / dt;

    Eigen::MatrixXcd psi(m, m);
    if (state.phi.time_kernel) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                psi(i, j) = amp * state.phi.time_kernel((grid.t[i] + grid.t[j]) / (2.0 * Dt),
                                                        (grid.t[i] - grid.t[j]) / dt);
    } else {
        const double dxi = grid.h / dt;
        for (int s = 0; s < 2 * m - 1; ++s) {
            // anti-diagonal i + j = s
            const double chi = (grid.t[0] + 0.5 * s * grid.h) / Dt;
            const int kmax = std::min(s, 2 * m - 2 - s);
            auto row = tk_row_fft(state.phi, chi, dxi, kmax);
            for (int i = std::max(0, s - m + 1); i <= std::min(s, m - 1); ++i) {
                const int j = s - i;
                psi(i, j) = amp * row[static_cast<size_t>(i - j + kmax)];
            }
        }
    }

    const double asym = (psi - psi.transpose()).norm();
    const double aimag = psi.imag().norm();
    cov.real_symmetric = asym <= 1e-12 * (psi.norm() + 1.0) && aimag <= 1e-12 * (psi.norm() + 1.0);
    if (cov.real_symmetric) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(psi.real());
        if (es.info() != Eigen::Success)
            throw NumericError("build_covariance: eigenfactorization failed");
        const Eigen::VectorXd w = es.eigenvalues();
        const Eigen::MatrixXd& Q = es.eigenvectors();
        cov.c_r = Q * (2.0 * w.array()).cosh().matrix().asDiagonal() * Q.transpose();
        cov.su_r = Q * (2.0 * w.array()).sinh().matrix().asDiagonal() * Q.transpose();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(psi, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.info() != Eigen::Success)
            throw NumericError("build_covariance: singular value factorization failed");
        const Eigen::VectorXd s = svd.singularValues();
        const Eigen::MatrixXcd& U = svd.matrixU();
        const Eigen::MatrixXcd& V = svd.matrixV();
        const Eigen::VectorXd ch = (2.0 * s.array()).cosh().matrix();
        const Eigen::VectorXd sh = (2.0 * s.array()).sinh().matrix();
        cov.c = U * ch.asDiagonal() * U.adjoint();
        cov.ctilde = V * ch.asDiagonal() * V.adjoint();
        cov.su = U * sh.asDiagonal() * V.adjoint();
    }
    return cov;
}

Eigen::MatrixXd CovarianceGrid::sigma() const {
    const int m = grid.m;
    Eigen::MatrixXd S(4 * m, 4 * m);
    Eigen::MatrixXd Rc, Ic, Rct, Ict, Rw, Iw;
    if (real_symmetric) {
        Rc = c_r; Ic = Eigen::MatrixXd::Zero(m, m);
        Rct = c_r; Ict = Ic;
        Rw = su_r; Iw = Ic;
    } else {
        Rc = c.real(); Ic = c.imag();
        Rct = ctilde.real(); Ict = ctilde.imag();
        Rw = su.real(); Iw = su.imag();
    }
    // sigma_AA = [[Re c, -Im c],[Im c, Re c]]/2, sigma_AB = [[Re W, Im W],[Im W, -Re W]]/2
    S.block(0, 0, m, m) = Rc;        S.block(0, m, m, m) = -Ic;
    S.block(m, 0, m, m) = Ic;        S.block(m, m, m, m) = Rc;
    S.block(2 * m, 2 * m, m, m) = Rct; S.block(2 * m, 3 * m, m, m) = -Ict;
    S.block(3 * m, 2 * m, m, m) = Ict; S.block(3 * m, 3 * m, m, m) = Rct;
    S.block(0, 2 * m, m, m) = Rw;    S.block(0, 3 * m, m, m) = Iw;
    S.block(m, 2 * m, m, m) = Iw;    S.block(m, 3 * m, m, m) = -Rw;
    S.block(2 * m, 0, 2 * m, 2 * m) = S.block(0, 2 * m, 2 * m, 2 * m).transpose();
    return 0.5 * S;
}

namespace {

std::vector<bool> cell_mask(const TimeGrid& g, const Interval& I) {
    std::vector<bool> mask(g.m);
    for (int i = 0; i < g.m; ++i) mask[i] = g.t[i] >= I.lo && g.t[i] < I.hi;
    return mask;
}

} // namespace

double fredholm_pgf(const CovarianceGrid& cov, const Interval& I_A, const Interval& I_B,
                    double y_A, double y_B) {
    const int m = cov.grid.m;
    const auto mA = cell_mask(cov.grid, I_A);
    const auto mB = cell_mask(cov.grid, I_B);
    const double a = 1.0 - y_A, b = 1.0 - y_B;
    if (cov.real_symmetric) {
        // psi real: the x and p sectors decouple and share one determinant,
        // so g = det_2m[ I + diag(a P_A, b P_B) [[c-I, W],[W^T, c-I]]/2 ]^{-1}
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2 * m, 2 * m);
        for (int i = 0; i < m; ++i) {
            if (mA[i] && a != 0.0) {
                for (int j = 0; j < m; ++j) {
                    M(i, j) += 0.5 * a * (cov.c_r(i, j) - (i == j ? 1.0 : 0.0));
                    M(i, m + j) += 0.5 * a * cov.su_r(i, j);
                }
            }
            if (mB[i] && b != 0.0) {
                for (int j = 0; j < m; ++j) {
                    M(m + i, j) += 0.5 * b * cov.su_r(j, i);
                    M(m + i, m + j) += 0.5 * b * (cov.c_r(i, j) - (i == j ? 1.0 : 0.0));
                }
            }
        }
        return std::exp(-logdet_positive(std::move(M), "fredholm_pgf"));
    }
    // general path: full 4m real form
    if (m > 1024)
        throw DomainError("fredholm_pgf: complex-kernel path is limited to m <= 1024");
    Eigen::MatrixXd S = cov.sigma();
    Eigen::VectorXd d(4 * m);
    for (int i = 0; i < m; ++i) {
        d(i) = d(m + i) = mA[i] ? a : 0.0;
        d(2 * m + i) = d(3 * m + i) = mB[i] ? b : 0.0;
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(4 * m, 4 * m) +
                        d.asDiagonal() * (S - 0.5 * Eigen::MatrixXd::Identity(4 * m, 4 * m));
    return std::exp(-0.5 * logdet_positive(std::move(M), "fredholm_pgf"));
}

double oracle_moments(const CovarianceGrid& cov, const std::vector<double>& times_A,
                      const std::vector<double>& times_B) {
    const TimeGrid& g = cov.grid;
    auto node = [&](double t) {
        if (t < g.t.front() - 0.5 * g.h || t > g.t.back() + 0.5 * g.h)
            throw DomainError("oracle_moments: time outside the grid");
        const int i = static_cast<int>(std::lround((t + g.L) / g.h));
        return std::min(std::max(i, 0), g.m - 1);
    };
    const double h = g.h;
    auto cval = [&](bool tilde, int i, int j) -> std::complex<double> {
        if (cov.real_symmetric) return cov.c_r(i, j);
        return tilde ? cov.ctilde(i, j) : cov.c(i, j);
    };
    auto wval = [&](int i, int j) -> std::complex<double> {
        return cov.real_symmetric ? std::complex<double>(cov.su_r(i, j)) : cov.su(i, j);
    };
    auto nq = [&](bool tilde, int i) {
        return (cval(tilde, i, i).real() - 1.0) / (2.0 * h);
    };
    const size_t nA = times_A.size(), nB = times_B.size();
    if (nA + nB == 1) {
        return nA == 1 ? nq(false, node(times_A[0])) : nq(true, node(times_B[0]));
    }
    if (nA == 1 && nB == 1) {
        const int i = node(times_A[0]), j = node(times_B[0]);
        const double cross = std::abs(wval(i, j)) / (2.0 * h);
        return nq(false, i) * nq(true, j) + cross * cross;
    }
    if ((nA == 2 && nB == 0) || (nA == 0 && nB == 2)) {
        const bool tilde = nA == 0;
        const auto& ts = tilde ? times_B : times_A;
        const int i = node(ts[0]), j = node(ts[1]);
        if (i == j) throw ContractError("oracle_moments: coincident times within a party");
        const double cross = std::abs(cval(tilde, j, i)) / (2.0 * h);
        return nq(tilde, i) * nq(tilde, j) + cross * cross;
    }
    throw DomainError("oracle_moments: only total order <= 2 is supported");
}

void dump_covariance(const CovarianceGrid& cov, const std::string& path,
                     const std::string& format) {
    const Eigen::MatrixXd S = cov.sigma();
    if (format == "csv") {
        std::ofstream f(path);
        if (!f) throw DomainError("dump_covariance: cannot open " + path);
        f << "# biphoton covariance sigma, row-major\n";
        f << "# m=" << cov.grid.m << " h=" << cov.grid.h << " L=" << cov.grid.L
          << " lambda=" << cov.scale << " Delta_t=" << cov.params.Delta_t
          << " delta_t=" << cov.params.delta_t << "\n";
        f.precision(12);
        for (Eigen::Index i = 0; i < S.rows(); ++i) {
            for (Eigen::Index j = 0; j < S.cols(); ++j)
                f << S(i, j) << (j + 1 < S.cols() ? "," : "");
            f << "\n";
        }
    } else if (format == "bin") {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DomainError("dump_covariance: cannot open " + path);
        const char magic[8] = {'B', 'P', 'H', 'S', 'I', 'G', '0', '1'};
        f.write(magic, 8);
        const int64_t m = cov.grid.m;
        f.write(reinterpret_cast<const char*>(&m), sizeof(m));
        const double hdr[5] = {cov.grid.h, cov.grid.L, cov.scale, cov.params.Delta_t,
                               cov.params.delta_t};
        f.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
        for (Eigen::Index i = 0; i < S.rows(); ++i)
            f.write(reinterpret_cast<const char*>(S.row(i).eval().data()),
                    static_cast<std::streamsize>(sizeof(double)) * S.cols());
    } else {
        throw DomainError("dump_covariance: format must be csv or bin");
    }
}

} // namespace biphoton
