// SPDX-License-Identifier: Apache-2.0
//
// Joint-amplitude model phi(chi, kappa) of the biphoton state, the derived
// hyperbolic kernels phi_c and phi_s, and calibration of the amplitude scale
// against a target mean photon number.
//
// Dimensionless variables: chi = (t_A + t_B) / (2 Delta_t) follows the pulse
// envelope, kappa = delta_t (w_A - w_B) / 2 follows the phase-matching
// profile.  All state parameters with units are seconds.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>

#include "biphoton/errors.hpp"
#include "biphoton/quadrature.hpp"

namespace biphoton {

/// Temporal widths of the state: correlation width delta_t and pulse FWHM
/// Delta_t, both in seconds.  Delta_t/delta_t quantifies entanglement.
struct EntanglementParams {
    double delta_t;
    double Delta_t;

    EntanglementParams(double delta, double Delta) : delta_t(delta), Delta_t(Delta) {
        if (!(delta_t > 0) || !(Delta_t > 0))
            throw DomainError("EntanglementParams: widths must be positive");
        if (ratio() < 1.0)
            throw DomainError("EntanglementParams: Delta_t/delta_t must be >= 1");
    }
    double ratio() const { return Delta_t / delta_t; }
};

/// L2^2, L4^4 and supremum norms of |kernel| over R^2 at unit scale.
struct KernelNorms {
    double l2_sq = 0;
    double l4_4 = 0;
    double sup = 0;
};

/// Validity data of the closed-form machinery for a given state; computed in
/// opcalc, carried here so states can hold their own report.
struct ValidityReport {
    double n_lim = 0;
    double x_max = 0;
    double n_max = 0;
    bool ok = false;
};

/// The normalized joint-amplitude function phi(chi, kappa) = scale * kernel.
///
/// `kernel` is held at unit scale so rescaled copies share it and the cached
/// norms transform analytically.  `kappa_unit` records the kappa width of the
/// kernel relative to the unit-width convention of the entanglement measures;
/// the phase-matching sinc carries pi (its first spectral zero sits at 2 pi
/// instead of 2).
struct PhiModel {
    double scale = 0;
    std::function<std::complex<double>(double, double)> kernel;
    bool symmetric_kappa = false;
    KernelNorms unit_norms;
    double kappa_unit = 1.0;

    // integration hints
    double chi_halfwidth = 4.75;  ///< |kernel| negligible beyond this |chi|
    double kappa_cut = 400.0;     ///< default kappa truncation radius

    /// int_{|kappa|>K} |kernel(chi,kappa)|^2 dkappa at unit scale.
    std::function<double(double, double)> tail_sq;
    /// int_{|kappa|>K} |kernel|^2 cos(c kappa) dkappa at unit scale.
    std::function<double(double, double, double)> tail_sq_cos;
    /// int_{|kappa|>K} Re kernel * cos(c kappa) dkappa at unit scale; the
    /// kernel itself decays only like 1/kappa for the phase-matching sinc, so
    /// linear (phi_s-weighted) integrals need this oscillatory tail.
    std::function<double(double, double, double)> tail_lin_cos;

    /// Dimensionless time-basis kernel TK(chi, xi) with
    /// psi(tA,tB) = (scale/delta_t) TK((tA+tB)/(2 Delta_t), (tA-tB)/delta_t).
    /// At jump discontinuities TK returns the root mean square of the
    /// one-sided limits so grid sampling preserves the Hilbert-Schmidt norm.
    std::function<double(double, double)> time_kernel;

    std::complex<double> phi(double chi, double kappa) const {
        return scale * kernel(chi, kappa);
    }

    /// Norms of |phi| including the scale factor.
    double l2_sq() const { return scale * scale * unit_norms.l2_sq; }
    double l4_4() const { return std::pow(scale, 4) * unit_norms.l4_4; }
    double sup() const { return scale * unit_norms.sup; }

    /// Norms of the kappa-width-normalized kernel, used by the entanglement
    /// measures (Schmidt number, validity bounds).
    double l2_sq_normalized() const { return l2_sq() / kappa_unit; }
    double l4_4_normalized() const { return l4_4() / kappa_unit; }

    PhiModel rescaled(double new_scale) const {
        PhiModel m = *this;
        m.scale = new_scale;
        return m;
    }
};

/// sin(x)/x.
inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

/// Built-in model phi(chi,kappa) = lambda * alpha(chi) * sinc(kappa/2) with
/// Gaussian alpha, alpha(0) = 1 and |alpha|^2 of unit FWHM.  The time-basis
/// kernel is alpha((tA+tB)/2Dt) * rect((tA-tB)/dt) with the rectangle arising
/// from the crystal geometry.
PhiModel make_sinc_gaussian(double lambda);

/// Smooth reference model phi = lambda * alpha(chi) * beta(kappa) with both
/// |alpha|^2 and |beta|^2 Gaussians of unit FWHM.  Spectrally compact, so the
/// discretized oracle converges fast; used for tight cross-checks.
PhiModel make_double_gaussian(double lambda);

/// cosh(2|phi|) - 1 >= 0.
double phi_c(const PhiModel& phi, double chi, double kappa);
/// sinh(2|phi|) phi/|phi|, continuously extended to 0 at phi = 0.
std::complex<double> phi_s(const PhiModel& phi, double chi, double kappa);

/// The state: parameters, amplitude model and its implied mean photon number
/// per party.  `validity` is attached by opcalc when the state is built
/// through the checked factory.
struct BiphotonState {
    EntanglementParams params;
    PhiModel phi;
    double mean_photons = 0;
    std::optional<ValidityReport> validity;
};

/// Mean photon number of one party,
///   <N> = (Delta_t/delta_t) / (4 pi) * II phi_c(chi,kappa) dchi dkappa.
/// Strictly increasing in phi.scale.
double mean_photon_number(const PhiModel& phi, const EntanglementParams& params,
                          const QuadOptions& opts = {});

/// Rescale `templ` so that mean_photon_number matches target_N (relative
/// tolerance 1e-8, monotone bracketing root finder).
PhiModel calibrate_scale(double target_N, const EntanglementParams& params,
                         const PhiModel& templ);

/// <N_A(t)>: photon rate (1/s) of each party at time t,
///   1/(4 pi delta_t) * I phi_c(t/Delta_t, kappa) dkappa.
double marginal_intensity(const BiphotonState& state, double t,
                          const QuadOptions& opts = {});

/// <N_A(w)>: spectral density (s) at angular frequency offset w,
///   Delta_t/(4 pi) * I phi_c(chi, delta_t w) dchi.
double marginal_spectrum(const BiphotonState& state, double omega,
                         const QuadOptions& opts = {});

/// Integral of F(phi_c(chi, .)) over the real kappa axis with the analytic
/// tail correction linear_coeff * int_{|k|>K} phi_c.  The integrand must be
/// asymptotically linear in phi_c for the correction to apply.
template <typename F, typename T>
T integrate_kappa(const PhiModel& phi, double chi, F&& f, const T& linear_coeff,
                  const QuadOptions& opts = {}) {
    const double K = phi.kappa_cut;
    T body = adaptive_gk([&](double k) { return f(k); }, -K, K, opts).value;
    const double tail = 2.0 * phi.scale * phi.scale * phi.tail_sq(chi, K);
    return body + linear_coeff * tail;
}

} // namespace biphoton
