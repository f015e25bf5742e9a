// SPDX-License-Identifier: Apache-2.0
#include "biphoton/coding.hpp"

#include <cmath>

namespace biphoton {

namespace {

class CodingPgf final : public Pgf {
public:
    CodingPgf(PhiModel phi, double ratio, double chi_lo, double chi_hi, double phase,
              double detuning_over_dt, QuadOptions opts)
        : phi_(std::move(phi)), ratio_(ratio), chi_lo_(chi_lo), chi_hi_(chi_hi),
          cosphi_(std::cos(phase)), sinphi_(std::sin(phase)), d_(detuning_over_dt),
          opts_(opts) {}

    Jet2 taylor(double yA, double yB, int na, int nb) const override {
        Jet2 a = 1.0 - Jet2::variable_a(yA, na, nb);
        Jet2 b = 1.0 - Jet2::variable_b(yB, na, nb);
        Jet2 ab16 = a * b * (1.0 / 16.0);
        const double K = phi_.kappa_cut;
        QuadOptions inner = opts_;
        inner.abs_tol = opts_.abs_tol / (2.0 * K);
        auto chi_int = [&](double chi) {
            auto f = [&](double k) {
                const double u = phi_c(phi_, chi, k);
                const double cd = std::cos(d_ * k), sd = std::sin(d_ * k);
                Jet2 t1 = 1.0 + (a + b) * (0.25 * u) +
                          ab16 * (u * (0.5 * u - 1.0 - (0.5 * u + 1.0) * cosphi_ * cd));
                Jet2 t2 = ab16 * (0.5 * (u - 2.0) * u * sinphi_ * sd);
                Jet2 arg = t1 * t1 - t2 * t2;
                if (arg.value() <= 0.0)
                    throw NumericError("pgf_coding: log argument lost positivity");
                return log(arg);
            };
            Jet2 body = adaptive_gk(f, -K, K, inner).value;
            // linearized tails: ln(...) ~ 2(a+b)/4 u - 2 ab/16 (1 + cos phi cos(dk)) u
            const double s2 = phi_.scale * phi_.scale;
            const double ts = 2.0 * s2 * phi_.tail_sq(chi, K);
            const double tc = 2.0 * s2 * phi_.tail_sq_cos(chi, K, d_);
            Jet2 tail = (a + b) * (0.5 * ts) - ab16 * 2.0 * (ts + cosphi_ * tc);
            return body + tail;
        };
        Jet2 expo = adaptive_gk(chi_int, chi_lo_, chi_hi_, opts_).value;
        return exp(expo * (-ratio_ / (4.0 * M_PI)));
    }
    const char* provenance() const override { return "coding"; }

private:
    PhiModel phi_;
    double ratio_, chi_lo_, chi_hi_, cosphi_, sinphi_, d_;
    QuadOptions opts_;
};

void check_setup(const BiphotonState& state, const CodingSetup& setup) {
    if (!state.phi.symmetric_kappa)
        throw ContractError("pgf_coding: the model must be kappa-symmetric");
    const double cap = setup.separation_threshold * state.params.Delta_t;
    if (std::abs(setup.tau_A - setup.tau) > cap ||
        std::abs(setup.tau_B - setup.tau) > cap ||
        std::abs(setup.tau_A - setup.tau_B) > cap)
        throw ContractError("pgf_coding: MZI delays break the pulse separation bound");
    if (setup.t_plus != 0.25 || setup.t_minus != 0.25)
        throw ContractError("pgf_coding: closed form holds for t_{q+-} = 1/4");
}

} // namespace

Interval default_middle_interval(const BiphotonState& state) {
    const double w = 4.0 * state.params.Delta_t;
    return {-w, w};
}

PgfPtr pgf_coding(const BiphotonState& state, const CodingSetup& setup,
                  const Interval& I_m, const QuadOptions& opts) {
    check_setup(state, setup);
    const double Dt = state.params.Delta_t;
    const double W = state.phi.chi_halfwidth;
    const double lo = std::max(I_m.lo / Dt, -W), hi = std::min(I_m.hi / Dt, W);
    if (!(lo < hi)) throw DomainError("pgf_coding: empty middle interval");
    return std::make_shared<CodingPgf>(state.phi, state.params.ratio(), lo, hi,
                                       setup.phase, setup.detuning() / state.params.delta_t,
                                       opts);
}

double prob_exactly_one_pair(const BiphotonState& state, const CodingSetup& setup,
                             const QuadOptions& opts) {
    auto g = pgf_coding(state, setup, default_middle_interval(state), opts);
    return g->derivative(1, 1, 0.0, 0.0);
}

double prob_multiple_pairs(const BiphotonState& state, const CodingSetup& setup,
                           const QuadOptions& opts) {
    auto g = pgf_coding(state, setup, default_middle_interval(state), opts);
    const Jet2 t00 = g->taylor(0.0, 0.0, 1, 1);
    const Jet2 t01 = g->taylor(0.0, 1.0, 1, 0);
    const Jet2 t10 = g->taylor(1.0, 0.0, 0, 1);
    const double p = 1.0 + t00.value() + t00.derivative(1, 0) + t00.derivative(0, 1) +
                     t00.derivative(1, 1) - t01.value() - t10.value() -
                     t01.derivative(1, 0) - t10.derivative(0, 1);
    if (p < -1e-9)
        throw NumericError("prob_multiple_pairs: negative probability", std::abs(p));
    return std::max(p, 0.0);
}

double visibility(const BiphotonState& state, double detuning, const QuadOptions& opts) {
    CodingSetup s0, spi;
    s0.tau_A = detuning; // tau_B = tau = 0
    spi.tau_A = detuning;
    spi.phase = M_PI;
    const double p0 = prob_exactly_one_pair(state, s0, opts);
    const double ppi = prob_exactly_one_pair(state, spi, opts);
    if (p0 + ppi <= 0.0)
        throw NumericError("visibility: vanishing coincidence probabilities");
    return (p0 - ppi) / (p0 + ppi);
}

double visibility_crossing(const BiphotonState& state, double level,
                           const QuadOptions& opts) {
    const double dt = state.params.delta_t;
    const double v0 = visibility(state, 0.0, opts);
    auto f = [&](double d_over_dt) {
        return visibility(state, d_over_dt * dt, opts) / v0 - level;
    };
    if (f(0.0) <= 0.0) return 0.0;
    double hi = 0.1;
    while (f(hi) > 0.0 && hi < 1.2) hi += 0.1;
    if (f(hi) > 0.0)
        throw NumericError("visibility_crossing: no crossing below 1.2 delta_t");
    return find_root(f, std::max(0.0, hi - 0.1), hi, 1e-3);
}

} // namespace biphoton
