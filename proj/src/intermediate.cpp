// SPDX-License-Identifier: Apache-2.0
#include "biphoton/intermediate.hpp"

#include <cmath>

namespace biphoton {

namespace {

std::complex<double> f_mn_scalar(std::complex<double> m, std::complex<double> n) {
    const double scale = std::abs(m) + std::abs(n);
    if (std::abs(m - n) <= 1e-8 * scale) {
        const std::complex<double> x = 0.5 * (m + n);
        return x / (1.0 + x) - std::log(1.0 + x);
    }
    return (n * std::log(1.0 + m) - m * std::log(1.0 + n)) / (m - n);
}

} // namespace

double f_mn(double m, double n) {
    if (m <= -1.0 || n <= -1.0) throw DomainError("f_mn: I+M, I+N must be invertible");
    return f_mn_scalar(m, n).real();
}

Eigen::Matrix2cd f_mn(const Eigen::Matrix2cd& M, const Eigen::Matrix2cd& N) {
    const double scale = M.norm() * N.norm() + 1.0;
    if ((M * N - N * M).norm() > 1e-10 * scale)
        throw ContractError("f_mn: arguments do not commute");
    // pick the better-conditioned argument to supply the eigenbasis
    auto spread = [](const Eigen::Matrix2cd& X) {
        return (X - 0.5 * X.trace() * Eigen::Matrix2cd::Identity()).norm();
    };
    const bool use_M = spread(M) >= spread(N);
    const Eigen::Matrix2cd& base = use_M ? M : N;
    if (spread(base) < 1e-14 * (base.norm() + 1.0)) {
        // both essentially scalar
        const std::complex<double> m = 0.5 * M.trace(), n = 0.5 * N.trace();
        return f_mn_scalar(m, n) * Eigen::Matrix2cd::Identity();
    }
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(base);
    const Eigen::Matrix2cd V = es.eigenvectors();
    const Eigen::Matrix2cd Vi = V.inverse();
    const Eigen::Matrix2cd Md = Vi * M * V, Nd = Vi * N * V;
    const double off = std::abs(Md(0, 1)) + std::abs(Md(1, 0)) + std::abs(Nd(0, 1)) +
                       std::abs(Nd(1, 0));
    if (off > 1e-8 * scale) throw ContractError("f_mn: no common eigenbasis found");
    Eigen::Matrix2cd F = Eigen::Matrix2cd::Zero();
    F(0, 0) = f_mn_scalar(Md(0, 0), Nd(0, 0));
    F(1, 1) = f_mn_scalar(Md(1, 1), Nd(1, 1));
    return V * F * Vi;
}

namespace {

constexpr double kKappaMax = 60.0;   // kappa window; linear tail corrected
constexpr double kKappapMax = 80.0;  // kappa' window of the border kernel
constexpr double kOscSwitch = 300.0; // beyond this frequency use Si asymptote

// H(x) = ln(1+x)/x and G(x) = [x/(1+x) - ln(1+x)]/x^2, series-continued
// through x = 0.  All four divided-difference kernels reduce to these:
//   fhat  = ln(1+cu)/u   = c H(cu),   fhat'  = c^2 G(cu),
//   B     = ln(1+cu)/(cu) =  H(cu),   B'     = c  G(cu).
Jet2 hfun_series(const Jet2& x) {
    if (std::abs(x.value()) < 1e-4)
        return 1.0 - x * 0.5 + (x * x) * (1.0 / 3.0) - (x * x * x) * 0.25;
    return log(x + 1.0) * recip(x);
}

Jet2 gfun_series(const Jet2& x) {
    if (std::abs(x.value()) < 1e-4)
        return -0.5 + x * (2.0 / 3.0) - (x * x) * 0.75 + (x * x * x) * 0.8;
    return (x * recip(x + 1.0) - log(x + 1.0)) * recip(x * x);
}

Jet2 fhat(const Jet2& c, double u) { return c * hfun_series(c * u); }
Jet2 fhat_prime(const Jet2& c, double u) { return (c * c) * gfun_series(c * u); }
Jet2 bfun(const Jet2& c, double u) { return hfun_series(c * u); }
Jet2 bfun_prime(const Jet2& c, double u) { return c * gfun_series(c * u); }

// divided difference (f(up) - f(um)) / (up - um) with derivative fallback
template <typename Fn, typename Dn>
Jet2 divided_difference(Fn&& f, Dn&& fp, const Jet2& c, double up, double um) {
    if (std::abs(up - um) > 1e-7 * (std::abs(up) + std::abs(um) + 1e-300))
        return (f(c, up) - f(c, um)) * (1.0 / (up - um));
    return fp(c, 0.5 * (up + um));
}

struct HalfLineDomain {
    double lo, hi; // chi domain of the interval
    double sign;   // |chi| = sign * chi on the domain
};

HalfLineDomain domain_of(HalfLine which, double W) {
    if (which == HalfLine::PositiveTimes) return {0.0, W, 1.0};
    return {-W, 0.0, -1.0};
}

/// Shared triple-integral driver.  For each (chi, kappa) node evaluates
///   delta_part - (2/pi)[ h0 Si(a K') + int_0^{K'} sin(a k') (h(k')-h0)/k' dk' ]
/// with a = 2 (Delta_t/delta_t) |chi| and model-specific h.
class BorderExpansion {
public:
    BorderExpansion(PhiModel phi, double ratio, HalfLineDomain dom, QuadOptions opts)
        : phi_(std::move(phi)), ratio_(ratio), dom_(dom), opts_(opts) {}

    /// integral over chi and kappa of base(kappa) + sinc correction.
    /// `local` maps (chi, kappa, h0) -> (base integrand, h function).
    template <typename Base, typename HFun, typename H0, typename TailLin>
    Jet2 integrate(Base&& base, HFun&& hfun, H0&& h0_of, TailLin&& tail_lin,
                   int na, int nb) const {
        QuadOptions inner = opts_;
        inner.abs_tol = opts_.abs_tol / (4.0 * kKappaMax);
        QuadOptions osc = opts_;
        osc.abs_tol = opts_.abs_tol * 1e-2;
        osc.rel_tol = std::max(opts_.rel_tol, 1e-7);
        auto chi_integrand = [&](double chi) {
            const double a = 2.0 * ratio_ * dom_.sign * chi;
            auto kap_integrand = [&](double k) {
                Jet2 h0 = h0_of(chi, k);
                Jet2 corr = sinc_correction(chi, k, a, h0, hfun, osc, na, nb);
                return base(chi, k) - corr;
            };
            Jet2 body = adaptive_gk(kap_integrand, -kKappaMax, kKappaMax, inner).value;
            const double t2 =
                2.0 * phi_.scale * phi_.scale * phi_.tail_sq(chi, kKappaMax);
            return body + tail_lin(chi) * t2;
        };
        return adaptive_gk(chi_integrand, dom_.lo, dom_.hi, opts_).value;
    }

    const PhiModel& phi() const { return phi_; }
    double ratio() const { return ratio_; }

private:
    template <typename HFun>
    Jet2 sinc_correction(double chi, double k, double a, const Jet2& h0, HFun&& hfun,
                         const QuadOptions& osc, int na, int nb) const {
        if (a <= 0.0) return Jet2(na, nb);
        const double lead = (2.0 / M_PI) * sine_integral(a * kKappapMax);
        Jet2 corr = h0 * lead;
        if (a <= kOscSwitch) {
            auto q = [&](double kp) {
                if (kp < 1e-9) return Jet2(na, nb);
                return (hfun(chi, k, kp) - h0) * (1.0 / kp);
            };
            corr += filon_sin(q, a, 0.0, kKappapMax, osc) * (2.0 / M_PI);
        }
        // beyond kOscSwitch the remainder is O(1/a); consistent with keeping
        // only the first order of the border expansion
        return corr;
    }

    PhiModel phi_;
    double ratio_;
    HalfLineDomain dom_;
    QuadOptions opts_;
};

class PartyIntermediatePgf final : public OnePartyPgf {
public:
    PartyIntermediatePgf(BorderExpansion be) : be_(std::move(be)) {}

    Jet2 taylor(double y, int n) const override {
        const int na = n, nb = 0;
        Jet2 c = (1.0 - Jet2::variable_a(y, na, nb)) * 0.5;
        const PhiModel& phi = be_.phi();
        auto u_of = [&](double chi, double k) { return phi_c(phi, chi, k); };
        auto base = [&](double chi, double k) {
            const double u = u_of(chi, k);
            Jet2 A = log(c * u + 1.0);
            Jet2 Ap = c * recip(c * u + 1.0);
            return A * 2.0 + (A - Ap * u);
        };
        auto hfun = [&](double chi, double k, double kp) {
            const double up = u_of(chi, k + kp), um = u_of(chi, k - kp);
            return divided_difference(fhat, fhat_prime, c, up, um) * (up * um);
        };
        auto h0 = [&](double chi, double k) {
            const double u = u_of(chi, k);
            return fhat_prime(c, u) * (u * u);
        };
        auto tail_lin = [&](double) { return c * 2.0; };
        Jet2 expo = be_.integrate(base, hfun, h0, tail_lin, na, nb);
        return exp(expo * (-be_.ratio() / (4.0 * M_PI)));
    }

private:
    BorderExpansion be_;
};

class CorrectionPgf final : public Pgf {
public:
    CorrectionPgf(BorderExpansion be, HalfLine which) : be_(std::move(be)), which_(which) {}

    Jet2 taylor(double yA, double yB, int na, int nb) const override {
        const bool q_is_a = which_ == HalfLine::PositiveTimes;
        Jet2 yq = q_is_a ? Jet2::variable_a(yA, na, nb) : Jet2::variable_b(yB, na, nb);
        Jet2 ynq = q_is_a ? Jet2::variable_b(yB, na, nb) : Jet2::variable_a(yA, na, nb);
        Jet2 c = (1.0 - yq) * 0.5;
        const PhiModel& phi = be_.phi();
        auto u_of = [&](double chi, double k) { return phi_c(phi, chi, k); };
        auto ps = [&](double chi, double k) { return phi_s(phi, chi, k); };
        // delta part |phi_s|^2 B'(u) minus the sinc part of the same kernel
        auto base = [&](double chi, double k) {
            const double u = u_of(chi, k);
            return bfun_prime(c, u) * std::norm(ps(chi, k));
        };
        auto hfun = [&](double chi, double k, double kp) {
            const double up = u_of(chi, k + kp), um = u_of(chi, k - kp);
            const double w = (ps(chi, k + kp) * std::conj(ps(chi, k - kp))).real();
            return divided_difference(bfun, bfun_prime, c, up, um) * w;
        };
        auto h0 = [&](double chi, double k) {
            const double u = u_of(chi, k);
            return bfun_prime(c, u) * std::norm(ps(chi, k));
        };
        // linear kappa tail of the delta part: |phi_s|^2 B' -> -c u
        auto tail_lin = [&](double) { return c * (-1.0); };
        Jet2 T = be_.integrate(base, hfun, h0, tail_lin, na, nb);
        Jet2 expo = (ynq - 1.0) * T * (be_.ratio() / (8.0 * M_PI));
        return exp(expo);
    }
    const char* provenance() const override { return "intermediate"; }

private:
    BorderExpansion be_;
    HalfLine which_;
};

BorderExpansion make_expansion(const BiphotonState& state, HalfLine which,
                               const QuadOptions& opts) {
    if (!state.phi.symmetric_kappa)
        throw ContractError("intermediate expansion requires a kappa-symmetric model");
    return BorderExpansion(state.phi, state.params.ratio(),
                           domain_of(which, state.phi.chi_halfwidth), opts);
}

} // namespace

OnePartyPgfPtr pgf_party_intermediate(const BiphotonState& state, HalfLine which,
                                      const QuadOptions& opts) {
    return std::make_shared<PartyIntermediatePgf>(make_expansion(state, which, opts));
}

PgfPtr pgf_correction(const BiphotonState& state, HalfLine which,
                      const QuadOptions& opts) {
    return std::make_shared<CorrectionPgf>(make_expansion(state, which, opts), which);
}

OneEachProbabilities prob_one_each_disjoint(const BiphotonState& state,
                                            const QuadOptions& opts) {
    auto gA = pgf_party_intermediate(state, HalfLine::PositiveTimes, opts);
    auto gB = pgf_party_intermediate(state, HalfLine::NegativeTimes, opts);
    const double dA = gA->derivative(1, 0.0);
    const double dB = gB->derivative(1, 0.0);
    auto cA = pgf_correction(state, HalfLine::PositiveTimes, opts);
    auto cB = pgf_correction(state, HalfLine::NegativeTimes, opts);
    OneEachProbabilities p;
    p.p_uncorrelated = dA * dB;
    p.p_total = p.p_uncorrelated + cA->derivative(1, 1, 0.0, 0.0) +
                cB->derivative(1, 1, 0.0, 0.0);
    return p;
}

} // namespace biphoton
