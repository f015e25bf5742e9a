// SPDX-License-Identifier: Apache-2.0
#include "biphoton/opcalc.hpp"

#include <cmath>

namespace biphoton {

namespace {
const std::complex<double> kI(0.0, 1.0);
}

Eigen::Matrix2cd SMatrix::aa(double chi, double kappa) const {
    const double cp = phi_c(phi_, chi, kappa);
    const double cm = phi_c(phi_, chi, -kappa);
    Eigen::Matrix2cd m;
    m << cp + cm, kI * (cp - cm), -kI * (cp - cm), cp + cm;
    return 0.25 * m;
}

Eigen::Matrix2cd SMatrix::ab(double chi, double kappa) const {
    const std::complex<double> sp =
        phi_s(phi_, chi, kappa) * std::exp(kI * kappa * (shift_a_ - shift_b_));
    const std::complex<double> sm =
        std::conj(phi_s(phi_, chi, -kappa) * std::exp(-kI * kappa * (shift_a_ - shift_b_)));
    Eigen::Matrix2cd mp, mm;
    mp << 1, -kI, -kI, -1;
    mm << 1, kI, kI, -1;
    return 0.25 * (sp * mp + sm * mm);
}

Eigen::Matrix4cd SMatrix::at(double chi, double kappa) const {
    Eigen::Matrix4cd m;
    m.block<2, 2>(0, 0) = aa(chi, kappa);
    m.block<2, 2>(0, 2) = ab(chi, kappa);
    m.block<2, 2>(2, 0) = ba(chi, kappa);
    m.block<2, 2>(2, 2) = bb(chi, kappa);
    return m;
}

SMatrix SMatrix::time_shifted(double T_over_dt, bool party_a) const {
    SMatrix s = *this;
    (party_a ? s.shift_a_ : s.shift_b_) += T_over_dt;
    return s;
}

SMatrix s_matrix(const BiphotonState& state) { return SMatrix(state.phi); }

namespace {

double xtilde_root(double n_lim) {
    auto f = [n_lim](double x) {
        const double lhs =
            std::log(std::cosh(2.0 * x)) + n_lim * std::log(2.0 * x) - std::lgamma(n_lim + 1.0);
        const double rhs = std::log(std::min(x, 2.0 * x * x));
        return lhs - rhs;
    };
    // walk down from a value safely above the largest root, then bisect
    double hi = 1.0;
    while (f(hi) <= 0.0) {
        hi *= 1.5;
        if (hi > 1e4) throw NumericError("n_max: no upper bracket for x~");
    }
    double lo = hi;
    while (f(lo) > 0.0) {
        lo *= 0.95;
        if (lo < 1e-8) throw NumericError("n_max: no lower bracket for x~");
    }
    return find_root(f, lo, lo / 0.95, 1e-12);
}

} // namespace

double n_max(double ratio, const PhiModel& phi) {
    if (ratio < 1.0) throw DomainError("n_max: ratio must be >= 1");
    const double xt = xtilde_root(2.0 * ratio);
    const double norm_sq = phi.unit_norms.l2_sq / phi.kappa_unit /
                           (phi.unit_norms.sup * phi.unit_norms.sup);
    return xt * xt * ratio * norm_sq;
}

ValidityReport validity(const EntanglementParams& params, double mean_N,
                        const PhiModel& phi, double ok_threshold) {
    ValidityReport r;
    r.n_lim = 2.0 * params.ratio();
    const double norm = phi.unit_norms.sup / std::sqrt(phi.unit_norms.l2_sq / phi.kappa_unit);
    r.x_max = std::sqrt(mean_N / params.ratio()) * norm;
    r.n_max = n_max(params.ratio(), phi);
    r.ok = mean_N <= ok_threshold * r.n_max;
    return r;
}

double schmidt_number(const BiphotonState& state) {
    const PhiModel& phi = state.phi;
    const double l2 = phi.l2_sq_normalized();
    const double l4 = phi.l4_4_normalized();
    if (!(l2 > 0) || !(l4 > 0)) throw DomainError("schmidt_number: norms not positive");
    return state.params.ratio() / (2.0 * M_PI) * l2 * l2 / l4;
}

BiphotonState make_state(const EntanglementParams& params, const PhiModel& phi) {
    BiphotonState s{params, phi, mean_photon_number(phi, params), std::nullopt};
    s.validity = validity(params, s.mean_photons, phi);
    return s;
}

BiphotonState make_state_with_mean(const EntanglementParams& params,
                                   const PhiModel& templ, double target_N) {
    return make_state(params, calibrate_scale(target_N, params, templ));
}

KernelNorms compute_unit_norms(const PhiModel& phi, const QuadOptions& opts) {
    const double W = phi.chi_halfwidth;
    const double K = phi.kappa_cut;
    auto abs_pow = [&](double chi, double k, int p) {
        return std::pow(std::abs(phi.kernel(chi, k)), p);
    };
    auto kappa_int = [&](double chi, int p) {
        double v = adaptive_gk([&](double k) { return abs_pow(chi, k, p); }, -K, K, opts)
                       .value;
        // tail via the map kappa = K/u, two sides
        v += 2.0 * adaptive_gk(
                       [&](double u) {
                           if (u <= 0) return 0.0;
                           const double k = K / u;
                           return abs_pow(chi, k, p) * K / (u * u);
                       },
                       0.0, 1.0, opts)
                 .value;
        return v;
    };
    KernelNorms n;
    n.l2_sq = adaptive_gk([&](double chi) { return kappa_int(chi, 2); }, -W, W, opts).value;
    n.l4_4 = adaptive_gk([&](double chi) { return kappa_int(chi, 4); }, -W, W, opts).value;
    // supremum: coarse grid then local golden refinement on each axis
    double best = 0, bchi = 0, bk = 0;
    for (int i = 0; i <= 80; ++i)
        for (int j = 0; j <= 400; ++j) {
            const double chi = -W + 2.0 * W * i / 80.0;
            const double k = -K + 2.0 * K * j / 400.0;
            const double v = std::abs(phi.kernel(chi, k));
            if (v > best) { best = v; bchi = chi; bk = k; }
        }
    double dchi = 2.0 * W / 80.0, dk = 2.0 * K / 400.0;
    for (int it = 0; it < 60; ++it) {
        bool moved = false;
        for (const auto& [dc, dkk] : {std::pair{dchi, 0.0}, {-dchi, 0.0}, {0.0, dk}, {0.0, -dk}}) {
            const double v = std::abs(phi.kernel(bchi + dc, bk + dkk));
            if (v > best) { best = v; bchi += dc; bk += dkk; moved = true; }
        }
        if (!moved) { dchi *= 0.5; dk *= 0.5; }
        if (dchi < 1e-10 && dk < 1e-9) break;
    }
    n.sup = best;
    return n;
}

} // namespace biphoton
