// SPDX-License-Identifier: Apache-2.0
#include "biphoton/model.hpp"

#include <cmath>

namespace biphoton {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double gauss_envelope(double chi) { return std::exp(-2.0 * kLn2 * chi * chi); }

// int_K^inf cos(a k) / k^2 dk  (K > 0, a >= 0)
double cos_over_sq_tail(double a, double K) {
    if (a == 0.0) return 1.0 / K;
    return std::cos(a * K) / K - a * (M_PI / 2 - sine_integral(a * K));
}

// int_K^inf sin(a k) / k dk
double sin_over_k_tail(double a, double K) {
    if (a == 0.0) return 0.0;
    const double s = a > 0 ? 1.0 : -1.0;
    return s * (M_PI / 2 - sine_integral(std::abs(a) * K));
}

} // namespace

PhiModel make_sinc_gaussian(double lambda) {
    if (lambda < 0) throw DomainError("make_sinc_gaussian: lambda must be >= 0");
    PhiModel m;
    m.scale = lambda;
    m.kernel = [](double chi, double kappa) {
        return std::complex<double>(gauss_envelope(chi) * sinc(kappa / 2.0), 0.0);
    };
    m.symmetric_kappa = true;
    // closed forms:  int a^2 = sqrt(pi/(4 ln2)),  int sinc^2(k/2) dk = 2 pi,
    //                int a^4 = sqrt(pi/(8 ln2)),  int sinc^4(k/2) dk = 4 pi / 3
    m.unit_norms.l2_sq = 2.0 * M_PI * std::sqrt(M_PI / (4.0 * kLn2));
    m.unit_norms.l4_4 = (4.0 * M_PI / 3.0) * std::sqrt(M_PI / (8.0 * kLn2));
    m.unit_norms.sup = 1.0;
    // first zero of sinc(kappa/2) sits at 2 pi; the unit-width convention of
    // the entanglement measures puts it at 2
    m.kappa_unit = M_PI;
    m.chi_halfwidth = 4.75;
    m.kappa_cut = 300.0;
    m.tail_sq = [](double chi, double K) {
        // int_{|k|>K} a^2 sinc^2(k/2) dk = 4 a^2 [1/K - T_1(K)]
        const double a2 = gauss_envelope(chi);
        const double t = 4.0 * (1.0 / K - cos_over_sq_tail(1.0, K));
        return a2 * a2 * t;
    };
    m.tail_sq_cos = [](double chi, double K, double c) {
        const double a2 = gauss_envelope(chi);
        c = std::abs(c);
        const double t = 4.0 * (cos_over_sq_tail(c, K) -
                                0.5 * (cos_over_sq_tail(1.0 + c, K) +
                                       cos_over_sq_tail(std::abs(1.0 - c), K)));
        return a2 * a2 * t;
    };
    m.tail_lin_cos = [](double chi, double K, double d) {
        // 2 a int_K^inf sinc(k/2) cos(d k) dk
        //   = a int_K^inf [sin((1/2+d)k) + sin((1/2-d)k)] / k dk, both tails
        const double a = gauss_envelope(chi);
        d = std::abs(d);
        return 2.0 * a * (sin_over_k_tail(0.5 + d, K) + sin_over_k_tail(0.5 - d, K));
    };
    m.time_kernel = [](double chi, double xi) {
        const double a = gauss_envelope(chi);
        const double ax = std::abs(xi);
        if (ax < 0.5 - 1e-12) return a;
        if (ax > 0.5 + 1e-12) return 0.0;
        return a * M_SQRT1_2; // rms of the one-sided limits 1 and 0
    };
    return m;
}

PhiModel make_double_gaussian(double lambda) {
    if (lambda < 0) throw DomainError("make_double_gaussian: lambda must be >= 0");
    PhiModel m;
    m.scale = lambda;
    m.kernel = [](double chi, double kappa) {
        return std::complex<double>(gauss_envelope(chi) * gauss_envelope(kappa), 0.0);
    };
    m.symmetric_kappa = true;
    m.unit_norms.l2_sq = M_PI / (4.0 * kLn2);
    m.unit_norms.l4_4 = M_PI / (8.0 * kLn2);
    m.unit_norms.sup = 1.0;
    m.kappa_unit = 1.0;
    m.chi_halfwidth = 4.75;
    m.kappa_cut = 6.0;
    m.tail_sq = [](double chi, double K) {
        const double a2 = gauss_envelope(chi);
        // int_{|k|>K} e^{-4 ln2 k^2} dk
        const double c = 4.0 * kLn2;
        return a2 * a2 * std::sqrt(M_PI / c) * std::erfc(std::sqrt(c) * K);
    };
    m.tail_sq_cos = [](double, double, double) { return 0.0; };
    m.tail_lin_cos = [](double, double, double) { return 0.0; };
    m.time_kernel = [](double chi, double xi) {
        return gauss_envelope(chi) * std::exp(-xi * xi / (8.0 * kLn2)) /
               (2.0 * std::sqrt(2.0 * M_PI * kLn2));
    };
    return m;
}

double phi_c(const PhiModel& phi, double chi, double kappa) {
    const double a = std::abs(phi.phi(chi, kappa));
    if (a < 1e-8) return 2.0 * a * a; // cosh(2a)-1 to leading order
    return std::cosh(2.0 * a) - 1.0;
}

std::complex<double> phi_s(const PhiModel& phi, double chi, double kappa) {
    const std::complex<double> p = phi.phi(chi, kappa);
    const double a = std::abs(p);
    if (a < 1e-8) return 2.0 * p; // sinh(2a)/a -> 2
    return std::sinh(2.0 * a) / a * p;
}

double mean_photon_number(const PhiModel& phi, const EntanglementParams& params,
                          const QuadOptions& opts) {
    if (phi.scale == 0.0) return 0.0;
    const double W = phi.chi_halfwidth;
    QuadOptions inner = opts;
    inner.abs_tol = opts.abs_tol / (2.0 * W);
    auto chi_integrand = [&](double chi) {
        return integrate_kappa(
            phi, chi, [&](double k) { return phi_c(phi, chi, k); }, 1.0, inner);
    };
    const double v = adaptive_gk(chi_integrand, -W, W, opts).value;
    return params.ratio() / (4.0 * M_PI) * v;
}

PhiModel calibrate_scale(double target_N, const EntanglementParams& params,
                         const PhiModel& templ) {
    if (target_N < 0) throw DomainError("calibrate_scale: target mean must be >= 0");
    if (target_N == 0.0) return templ.rescaled(0.0);
    // quadratic-order seed, Tr[r^2] = ratio/(2 pi) |phi|_2^2
    const double lam0 =
        std::sqrt(2.0 * M_PI * target_N / (params.ratio() * templ.unit_norms.l2_sq));
    double hi = 1.05 * lam0;
    auto N_of = [&](double lam) {
        return mean_photon_number(templ.rescaled(lam), params);
    };
    int guard = 0;
    while (N_of(hi) < target_N) {
        hi *= 1.5;
        if (++guard > 60) throw NumericError("calibrate_scale: bracket not found");
    }
    const double lam = find_root([&](double l) { return N_of(l) - target_N; }, 0.0, hi,
                                 1e-11);
    return templ.rescaled(lam);
}

double marginal_intensity(const BiphotonState& state, double t, const QuadOptions& opts) {
    const PhiModel& phi = state.phi;
    if (phi.scale == 0.0) return 0.0;
    const double chi = t / state.params.Delta_t;
    const double v = integrate_kappa(
        phi, chi, [&](double k) { return phi_c(phi, chi, k); }, 1.0, opts);
    return v / (4.0 * M_PI * state.params.delta_t);
}

double marginal_spectrum(const BiphotonState& state, double omega,
                         const QuadOptions& opts) {
    const PhiModel& phi = state.phi;
    if (phi.scale == 0.0) return 0.0;
    const double kappa = state.params.delta_t * omega;
    const double W = phi.chi_halfwidth;
    const double v =
        adaptive_gk([&](double chi) { return phi_c(phi, chi, kappa); }, -W, W, opts)
            .value;
    return state.params.Delta_t / (4.0 * M_PI) * v;
}

} // namespace biphoton
