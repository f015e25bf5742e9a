// SPDX-License-Identifier: Apache-2.0
#include "biphoton/pgf.hpp"

#include <algorithm>
#include <cmath>

namespace biphoton {

WidthClass classify(const Interval& I, double delta_t, const WidthThresholds& thr) {
    const double w = I.width();
    if (w <= thr.small_over_dt * delta_t) return WidthClass::Small;
    if (w >= thr.large_over_dt * delta_t) return WidthClass::Large;
    return WidthClass::Intermediate;
}

namespace {

// ---------------------------------------------------------------------------
// kappa-integrated covariance blocks.  With z^pm pairing the +-kappa branches
// of S, every block integral reduces to two real scalars:
//   int S_AA e^{-i k d} dk = 1/2 [[Re E, -Im E], [Im E, Re E]],
//   int S_AB e^{-i k d} dk = 1/2 [[Re C,  Im C], [Im C, -Re C]],
// with E = int phi_c e^{-i k d} dk and C = int phi_s e^{-i k d} dk, so the
// collapsed determinant is real for any model.

std::complex<double> block_E(const PhiModel& phi, double chi, double d,
                             const QuadOptions& opts) {
    const double K = phi.kappa_cut;
    auto pc = [&](double k) { return phi_c(phi, chi, k); };
    double re, im;
    if (d == 0.0) {
        re = adaptive_gk(pc, -K, K, opts).value;
        im = 0.0;
    } else {
        re = filon_cos(pc, d, -K, K, opts);
        im = -filon_sin(pc, d, -K, K, opts);
    }
    re += 2.0 * phi.scale * phi.scale * phi.tail_sq_cos(chi, K, d);
    // the odd tail vanishes for kappa-symmetric phi_c and is O(1/K^2) otherwise
    return {re, im};
}

std::complex<double> block_C(const PhiModel& phi, double chi, double d,
                             const QuadOptions& opts) {
    const double K = phi.kappa_cut;
    auto ps_re = [&](double k) { return phi_s(phi, chi, k).real(); };
    auto ps_im = [&](double k) { return phi_s(phi, chi, k).imag(); };
    std::complex<double> c;
    if (d == 0.0) {
        c = {adaptive_gk(ps_re, -K, K, opts).value,
             adaptive_gk(ps_im, -K, K, opts).value};
    } else {
        const double rc = filon_cos(ps_re, d, -K, K, opts);
        const double rs = filon_sin(ps_re, d, -K, K, opts);
        const double ic = filon_cos(ps_im, d, -K, K, opts);
        const double is = filon_sin(ps_im, d, -K, K, opts);
        c = {rc + is, ic - rs};
    }
    // linear tail phi_s ~ 2 phi; the sinh remainder decays cubically
    c += 2.0 * phi.scale * phi.tail_lin_cos(chi, K, d);
    return c;
}

// ---------------------------------------------------------------------------

class SmallPgf final : public Pgf {
public:
    SmallPgf(double cA, double cB, std::complex<double> C, double wA, double wB,
             double delta_t)
        : cA_(cA), cB_(cB), C_(C), wA_(wA), wB_(wB), dt_(delta_t) {}

    Jet2 taylor(double yA, double yB, int na, int nb) const override {
        const double pref = 1.0 / (2.0 * M_PI * dt_);
        Jet2 fA = (Jet2::variable_a(yA, na, nb) - 1.0) * (wA_ * pref);
        Jet2 fB = (Jet2::variable_b(yB, na, nb) - 1.0) * (wB_ * pref);
        // det[ I4 - diag(tauA I2, tauB I2)/(2 pi dt) * Sigma ]
        //   = [ (1 - fA cA)(1 - fB cB) - fA fB |C|^2/4 ]^2
        Jet2 det = (1.0 - fA * cA_) * (1.0 - fB * cB_) -
                   (fA * fB) * (0.25 * std::norm(C_));
        if (det.value() <= 0.0)
            throw NumericError("pgf_small: determinant lost positivity");
        return pow(det, -1.0);
    }
    const char* provenance() const override { return "small"; }

private:
    double cA_, cB_;
    std::complex<double> C_;
    double wA_, wB_, dt_;
};

// Dimensionless chi segment of a large-interval integral.
struct Segment {
    double lo, hi;
};

enum class LargeMode { Joint, AOnly, BOnly };

class LargePgf final : public Pgf {
public:
    LargePgf(PhiModel phi, double ratio, std::vector<Segment> segments, LargeMode mode,
             QuadOptions opts)
        : phi_(std::move(phi)), ratio_(ratio), segs_(std::move(segments)), mode_(mode),
          opts_(opts) {}

    Jet2 taylor(double yA, double yB, int na, int nb) const override {
        Jet2 w = weight(yA, yB, na, nb);
        Jet2 expo(na, nb);
        const double K = phi_.kappa_cut;
        QuadOptions inner = opts_;
        inner.abs_tol = opts_.abs_tol / (2.0 * K);
        for (const Segment& s : segs_) {
            auto chi_int = [&](double chi) {
                auto f = [&](double k) {
                    const double u = phi_c(phi_, chi, k);
                    Jet2 arg = w * (0.5 * u) + 1.0;
                    if (arg.value() <= 0.0)
                        throw NumericError(
                            "pgf_large: log argument lost positivity (state outside "
                            "validity)");
                    return log(arg);
                };
                Jet2 body = adaptive_gk(f, -K, K, inner).value;
                const double tail = 2.0 * phi_.scale * phi_.scale * phi_.tail_sq(chi, K);
                return body + w * (0.5 * tail);
            };
            expo += adaptive_gk(chi_int, s.lo, s.hi, opts_).value;
        }
        return exp(expo * (-ratio_ / (2.0 * M_PI)));
    }
    const char* provenance() const override {
        return mode_ == LargeMode::Joint ? "large-joint" : "decomposed";
    }

private:
    Jet2 weight(double yA, double yB, int na, int nb) const {
        switch (mode_) {
            case LargeMode::Joint: {
                Jet2 a = Jet2::variable_a(yA, na, nb);
                Jet2 b = Jet2::variable_b(yB, na, nb);
                return 1.0 - a * b;
            }
            case LargeMode::AOnly: return 1.0 - Jet2::variable_a(yA, na, nb);
            default: return 1.0 - Jet2::variable_b(yB, na, nb);
        }
    }

    PhiModel phi_;
    double ratio_;
    std::vector<Segment> segs_;
    LargeMode mode_;
    QuadOptions opts_;
};

std::vector<Segment> clip_to_support(const PhiModel& phi, double Delta_t, double lo,
                                     double hi) {
    const double W = phi.chi_halfwidth;
    const double a = std::max(lo / Delta_t, -W);
    const double b = std::min(hi / Delta_t, W);
    if (!(a < b)) return {};
    return {{a, b}};
}

class ConstOnePgf final : public Pgf {
public:
    Jet2 taylor(double, double, int na, int nb) const override {
        return Jet2(na, nb, 1.0);
    }
    const char* provenance() const override { return "decomposed"; }
};

class EfficiencyPgf final : public Pgf {
public:
    EfficiencyPgf(PgfPtr inner, double etaA, double etaB)
        : inner_(std::move(inner)), etaA_(etaA), etaB_(etaB) {}

    Jet2 taylor(double yA, double yB, int na, int nb) const override {
        Jet2 g = inner_->taylor(1.0 - etaA_ + etaA_ * yA, 1.0 - etaB_ + etaB_ * yB, na, nb);
        Jet2 r(na, nb);
        double pa = 1.0;
        for (int i = 0; i <= na; ++i) {
            double pb = 1.0;
            for (int j = 0; j <= nb; ++j) {
                r.at(i, j) = g.at(i, j) * pa * pb;
                pb *= etaB_;
            }
            pa *= etaA_;
        }
        return r;
    }
    const char* provenance() const override { return inner_->provenance(); }

private:
    PgfPtr inner_;
    double etaA_, etaB_;
};

} // namespace

PgfPtr pgf_small(const BiphotonState& state, double T_A, double T_B, double width_A,
                 double width_B, const WidthThresholds& thr, const QuadOptions& opts) {
    const double dt = state.params.delta_t;
    if (width_A <= 0 || width_B <= 0)
        throw DomainError("pgf_small: widths must be positive");
    if (width_A > thr.small_over_dt * dt || width_B > thr.small_over_dt * dt)
        throw ContractError("pgf_small: widths are not Small relative to delta_t");
    const PhiModel& phi = state.phi;
    const double Dt = state.params.Delta_t;
    const double cA = 0.5 * block_E(phi, T_A / Dt, 0.0, opts).real();
    const double cB = 0.5 * block_E(phi, T_B / Dt, 0.0, opts).real();
    const std::complex<double> C =
        block_C(phi, (T_A + T_B) / (2.0 * Dt), (T_A - T_B) / dt, opts);
    return std::make_shared<SmallPgf>(cA, cB, C, width_A, width_B, dt);
}

double correlation_function(const BiphotonState& state,
                            const std::vector<double>& times_A,
                            const std::vector<double>& times_B,
                            const QuadOptions& opts) {
    const int mA = static_cast<int>(times_A.size());
    const int mB = static_cast<int>(times_B.size());
    const int n = mA + mB;
    if (n == 0) throw DomainError("correlation_function: no time values");
    if (n > 10) throw DomainError("correlation_function: order cap is 10");
    const double dt = state.params.delta_t;
    for (const auto* ts : {&times_A, &times_B})
        for (size_t i = 0; i < ts->size(); ++i)
            for (size_t j = i + 1; j < ts->size(); ++j)
                if (std::abs((*ts)[i] - (*ts)[j]) < 1e-9 * dt)
                    throw ContractError(
                        "correlation_function: coincident times within a party");
    if (state.phi.scale == 0.0) return 0.0;

    const double Dt = state.params.Delta_t;
    const PhiModel& phi = state.phi;
    std::vector<double> t(n);
    std::copy(times_A.begin(), times_A.end(), t.begin());
    std::copy(times_B.begin(), times_B.end(), t.begin() + mA);
    auto is_a = [&](int i) { return i < mA; };

    // 2x2 real blocks of the kappa-integrated covariance
    std::vector<Eigen::Matrix2d> blocks(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double chi = (t[i] + t[j]) / (2.0 * Dt);
            Eigen::Matrix2d B;
            if (is_a(i) == is_a(j)) {
                const std::complex<double> E = block_E(phi, chi, (t[i] - t[j]) / dt, opts);
                B << E.real(), -E.imag(), E.imag(), E.real();
            } else {
                // phase argument is (T_A - T_B)/dt regardless of row party
                const double d = (is_a(i) ? t[i] - t[j] : t[j] - t[i]) / dt;
                const std::complex<double> C = block_C(phi, chi, d, opts);
                B << C.real(), C.imag(), C.imag(), -C.real();
            }
            blocks[static_cast<size_t>(i) * n + j] = 0.5 * B;
        }

    // M = I - (1/2 pi dt) diag(tau_i I2) Sigma, multilinear in the tau_i
    const double pref = 1.0 / (2.0 * M_PI * dt);
    const int dim = 2 * n;
    std::vector<MultiJet> M(static_cast<size_t>(dim) * dim, MultiJet(n));
    for (int r = 0; r < dim; ++r) {
        const int i = r / 2, qi = r % 2;
        for (int c = 0; c < dim; ++c) {
            const int j = c / 2, qj = c % 2;
            MultiJet e(n, r == c ? 1.0 : 0.0);
            const double b = blocks[static_cast<size_t>(i) * n + j](qi, qj);
            if (b != 0.0) e -= MultiJet::variable(n, i, pref * b);
            M[static_cast<size_t>(r) * dim + c] = e;
        }
    }
    // LU without pivoting: the value part of M is the identity
    MultiJet det(n, 1.0);
    for (int k = 0; k < dim; ++k) {
        MultiJet piv = M[static_cast<size_t>(k) * dim + k];
        det = det * piv;
        MultiJet inv = piv.inverse();
        for (int r = k + 1; r < dim; ++r) {
            MultiJet f = M[static_cast<size_t>(r) * dim + k] * inv;
            for (int c = k; c < dim; ++c)
                M[static_cast<size_t>(r) * dim + c] -=
                    f * M[static_cast<size_t>(k) * dim + c];
        }
    }
    return det.pow(-0.5).top();
}

PgfPtr pgf_large_joint(const BiphotonState& state, const Interval& I,
                       const QuadOptions& opts) {
    if (classify(I, state.params.delta_t) != WidthClass::Large)
        throw ContractError("pgf_large_joint: interval is not Large");
    auto segs = clip_to_support(state.phi, state.params.Delta_t, I.lo, I.hi);
    return std::make_shared<LargePgf>(state.phi, state.params.ratio(), std::move(segs),
                                      LargeMode::Joint, opts);
}

namespace {

std::vector<Segment> interval_difference(const Interval& x, const Interval& y) {
    std::vector<Segment> out;
    if (y.lo > x.lo) out.push_back({x.lo, std::min(x.hi, y.lo)});
    if (y.hi < x.hi) out.push_back({std::max(x.lo, y.hi), x.hi});
    std::vector<Segment> valid;
    for (auto& s : out)
        if (s.lo < s.hi) valid.push_back(s);
    return valid;
}

} // namespace

PgfDecomposition pgf_decompose(const BiphotonState& state, const Interval& I_A,
                               const Interval& I_B, const QuadOptions& opts) {
    const double dt = state.params.delta_t;
    if (classify(I_A, dt) != WidthClass::Large || classify(I_B, dt) != WidthClass::Large)
        throw ContractError("pgf_decompose: both intervals must be Large");
    const double Dt = state.params.Delta_t;
    auto clip_all = [&](const std::vector<Segment>& raw) {
        std::vector<Segment> segs;
        for (const auto& s : raw) {
            auto c = clip_to_support(state.phi, Dt, s.lo, s.hi);
            segs.insert(segs.end(), c.begin(), c.end());
        }
        return segs;
    };
    PgfDecomposition d;
    auto make = [&](std::vector<Segment> segs, LargeMode mode) -> PgfPtr {
        if (segs.empty()) return std::make_shared<ConstOnePgf>();
        return std::make_shared<LargePgf>(state.phi, state.params.ratio(),
                                          std::move(segs), mode, opts);
    };
    d.a_only = make(clip_all(interval_difference(I_A, I_B)), LargeMode::AOnly);
    d.b_only = make(clip_all(interval_difference(I_B, I_A)), LargeMode::BOnly);
    const double ilo = std::max(I_A.lo, I_B.lo), ihi = std::min(I_A.hi, I_B.hi);
    d.joint = make(ilo < ihi ? clip_to_support(state.phi, Dt, ilo, ihi)
                             : std::vector<Segment>{},
                   LargeMode::Joint);
    return d;
}

PgfPtr apply_efficiency(PgfPtr g, double eta_A, double eta_B) {
    if (!(eta_A >= 0 && eta_A <= 1 && eta_B >= 0 && eta_B <= 1))
        throw DomainError("apply_efficiency: efficiencies must lie in [0,1]");
    return std::make_shared<EfficiencyPgf>(std::move(g), eta_A, eta_B);
}

double pmf(const Pgf& g, int n_A, int n_B) {
    if (n_A < 0 || n_B < 0 || n_A > 64 || n_B > 64)
        throw DomainError("pmf: order outside supported range");
    return g.taylor(0.0, 0.0, n_A, n_B).at(n_A, n_B);
}

PmfTable pmf_table(const Pgf& g, double deficit_tol, int max_order) {
    PmfTable out;
    for (int N = 8; N <= max_order; N = N + N / 2) {
        N = std::min(N, max_order);
        Jet2 t = g.taylor(0.0, 0.0, N, N);
        double sum = 0;
        out.p.assign(N + 1, std::vector<double>(N + 1));
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) {
                out.p[i][j] = t.at(i, j);
                sum += t.at(i, j);
            }
        out.deficit = 1.0 - sum;
        if (std::abs(out.deficit) < deficit_tol) {
            out.converged = true;
            break;
        }
        if (N == max_order) break;
    }
    return out;
}

} // namespace biphoton
