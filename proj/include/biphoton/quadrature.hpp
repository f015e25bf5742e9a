// SPDX-License-Identifier: Apache-2.0
//
// Numerical integration utilities: globally adaptive Gauss-Kronrod 15(7),
// a Filon-Legendre rule for oscillatory integrals int f(x) sin(w x) dx,
// the sine integral, and a bracketed scalar root finder.
//
// The integrators are templated on the value type so that truncated Taylor
// jets can be integrated directly (differentiation under the integral sign).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/jets.hpp"

namespace biphoton {

inline double qnorm(double x) { return std::abs(x); }
inline double qnorm(const std::complex<double>& x) { return std::abs(x); }
template <typename S>
double qnorm(const Jet2T<S>& x) { return x.norm(); }

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_intervals = 4000;
    bool throw_on_fail = true;
};

namespace detail {

// Gauss-Kronrod 15-7 nodes and weights (positive half, node 0 last).
inline constexpr double gk_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename F>
auto gk15(F&& f, double a, double b, double* err)
    -> decltype(f(0.0)) {
    using T = decltype(f(0.0));
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    // node 0 (center)
    T fc = f(c);
    T kron = fc * (gk_wk[7] * h);
    T gauss = fc * (gk_wg[3] * h);
    for (int i = 0; i < 7; ++i) {
        T fl = f(c - h * gk_x[i]);
        T fr = f(c + h * gk_x[i]);
        T s = fl + fr;
        kron += s * (gk_wk[i] * h);
        if (i % 2 == 1) gauss += s * (gk_wg[i / 2] * h);
    }
    T diff = kron - gauss;
    double e = qnorm(diff);
    // standard Kronrod error inflation
    *err = std::pow(200.0 * e, 1.5);
    if (*err > e) *err = e;
    if (e > 0 && *err < e * 1e-6) *err = e * 1e-6;
    return kron;
}

} // namespace detail

template <typename T>
struct QuadResult {
    T value;
    double error;
};

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
template <typename F>
auto adaptive_gk(F&& f, double a, double b, const QuadOptions& opts = {})
    -> QuadResult<decltype(f(0.0))> {
    using T = decltype(f(0.0));
    struct Seg {
        double a, b, err;
        T val;
    };
    auto cmp = [](const Seg& x, const Seg& y) { return x.err < y.err; };
    std::priority_queue<Seg, std::vector<Seg>, decltype(cmp)> heap(cmp);

    double e0;
    T v0 = detail::gk15(f, a, b, &e0);
    heap.push({a, b, e0, v0});
    T total = v0;
    double total_err = e0;
    int count = 1;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * qnorm(total)) &&
           count < opts.max_intervals) {
        Seg s = heap.top();
        heap.pop();
        const double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b) { heap.push(s); break; } // interval exhausted
        double el, er;
        T vl = detail::gk15(f, s.a, m, &el);
        T vr = detail::gk15(f, m, s.b, &er);
        total += vl + vr - s.val;
        total_err += el + er - s.err;
        heap.push({s.a, m, el, vl});
        heap.push({m, s.b, er, vr});
        ++count;
    }
    const double target = std::max(opts.abs_tol, opts.rel_tol * qnorm(total));
    if (total_err > 10.0 * target && opts.throw_on_fail)
        throw NumericError("adaptive quadrature did not converge", total_err);
    return {total, total_err};
}

// ---------------------------------------------------------------------------
// Sine integral Si(x) = int_0^x sin(t)/t dt.

inline double sine_integral(double x) {
    const double ax = std::abs(x);
    double si;
    if (ax <= 40.0) {
        auto f = [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; };
        QuadOptions o;
        o.abs_tol = 1e-14;
        o.rel_tol = 1e-13;
        si = adaptive_gk(f, 0.0, ax, o).value;
    } else {
        // asymptotic auxiliary expansion, terms (2k)!/x^{2k}
        double fsum = 0, gsum = 0, term = 1;
        const double x2 = ax * ax;
        for (int k = 0; k < 12; ++k) {
            const double tf = (k % 2 == 0 ? term : -term);
            fsum += tf;
            term *= (2 * k + 1) / ax; // -> (2k+1)!/x^{2k+1}
            gsum += (k % 2 == 0 ? term : -term) * ax;
            term *= (2 * k + 2) / ax; // -> (2k+2)!/x^{2k+2}
            if (term * x2 < 1e-18) break;
        }
        const double fx = fsum / ax;
        const double gx = gsum / x2;
        si = M_PI / 2 - fx * std::cos(ax) - gx * std::sin(ax);
    }
    return x < 0 ? -si : si;
}

// ---------------------------------------------------------------------------
// Filon-Legendre rule: int_a^b f(x) sin(w x) dx with f smooth and w possibly
// large.  Each panel interpolates f at Gauss-Legendre nodes, expands in
// Legendre polynomials and uses the exact oscillatory moments
// int_{-1}^{1} P_n(u) e^{i t u} du = 2 i^n j_n(t).

namespace detail {

constexpr int filon_n = 16; // interpolation nodes per panel

struct FilonNodes {
    double x[filon_n];     // GL nodes on [-1,1]
    double w[filon_n];     // GL weights
    double p[filon_n][filon_n]; // P_n(x_i)
};

inline const FilonNodes& filon_nodes() {
    static const FilonNodes fn = [] {
        FilonNodes f{};
        // Newton iteration for Legendre roots
        const int n = filon_n;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (x * p1 - p0) / (x * x - 1);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            f.x[n - 1 - i] = x;
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1);
            f.w[n - 1 - i] = 2.0 / ((1 - x * x) * dp * dp);
        }
        for (int i = 0; i < n; ++i) {
            f.p[0][i] = 1;
            f.p[1][i] = f.x[i];
            for (int k = 2; k < n; ++k)
                f.p[k][i] =
                    ((2 * k - 1) * f.x[i] * f.p[k - 1][i] - (k - 1) * f.p[k - 2][i]) / k;
        }
        return f;
    }();
    return fn;
}

/// Spherical Bessel j_n(t), stable for the small orders used here.
inline double sph_j(int n, double t) {
    if (t < 1e-8) {
        // j_n(t) ~ t^n / (2n+1)!!
        double v = 1;
        for (int k = 1; k <= n; ++k) v *= t / (2 * k + 1);
        return v;
    }
    return std::sph_bessel(static_cast<unsigned>(n), t);
}

/// Per-node weights W_i such that int_a^b f trig(w x) dx ~= sum W_i f(x_i),
/// plus the half-order weights used for the error estimate.
inline void filon_weights(double w_freq, double a, double b, bool want_cos, double* W,
                          double* Whalf, double* X) {
    const FilonNodes& fn = filon_nodes();
    const double c = 0.5 * (a + b), s = 0.5 * (b - a);
    const double theta = w_freq * s;
    // Im or Re of e^{i w c} 2 i^n j_n(theta)
    double mom[filon_n];
    const double cs = std::cos(w_freq * c), sn = std::sin(w_freq * c);
    for (int n = 0; n < filon_n; ++n) {
        const double j = 2.0 * sph_j(n, theta);
        // i^n cycles (1, i, -1, -i)
        switch (n % 4) {
            case 0: mom[n] = (want_cos ? cs : sn) * j; break;
            case 1: mom[n] = (want_cos ? -sn : cs) * j; break;
            case 2: mom[n] = (want_cos ? -cs : -sn) * j; break;
            default: mom[n] = (want_cos ? sn : -cs) * j; break;
        }
    }
    for (int i = 0; i < filon_n; ++i) {
        X[i] = c + s * fn.x[i];
        double acc = 0, acch = 0;
        for (int n = 0; n < filon_n; ++n) {
            const double contrib = (2 * n + 1) * 0.5 * fn.w[i] * fn.p[n][i] * mom[n];
            acc += contrib;
            if (n < filon_n / 2) acch += contrib;
        }
        W[i] = s * acc;
        Whalf[i] = s * acch;
    }
}

} // namespace detail

/// Adaptive Filon quadrature of int_a^b f(x) trig(w x) dx.
template <typename F>
auto filon_trig(F&& f, double w_freq, double a, double b, bool want_cos,
                const QuadOptions& opts = {}) -> decltype(f(0.0)) {
    using T = decltype(f(0.0));
    struct Panel {
        double a, b;
    };
    std::vector<Panel> stack{{a, b}};
    bool have = false;
    T total = f(0.5 * (a + b)) * 0.0; // zero of the right shape
    double err_total = 0;
    int panels = 0;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        double W[detail::filon_n], Wh[detail::filon_n], X[detail::filon_n];
        detail::filon_weights(w_freq, p.a, p.b, want_cos, W, Wh, X);
        T v = f(X[0]) * W[0];
        T vh = f(X[0]) * Wh[0];
        for (int i = 1; i < detail::filon_n; ++i) {
            T fi = f(X[i]);
            v += fi * W[i];
            vh += fi * Wh[i];
        }
        const double perr = qnorm(v - vh);
        const double width = p.b - p.a;
        const double tol_here =
            std::max(opts.abs_tol, opts.rel_tol * qnorm(total)) * width / (b - a);
        if (perr > tol_here && panels < opts.max_intervals &&
            width > 1e-12 * (b - a)) {
            const double m = 0.5 * (p.a + p.b);
            stack.push_back({p.a, m});
            stack.push_back({m, p.b});
            ++panels;
            continue;
        }
        err_total += perr;
        if (!have) {
            total = v;
            have = true;
        } else {
            total += v;
        }
        ++panels;
    }
    if (panels >= opts.max_intervals && opts.throw_on_fail &&
        err_total > 100.0 * std::max(opts.abs_tol, opts.rel_tol * qnorm(total)))
        throw NumericError("oscillatory quadrature did not converge", err_total);
    return total;
}

template <typename F>
auto filon_sin(F&& f, double w_freq, double a, double b, const QuadOptions& opts = {})
    -> decltype(f(0.0)) {
    return filon_trig(f, w_freq, a, b, false, opts);
}

template <typename F>
auto filon_cos(F&& f, double w_freq, double a, double b, const QuadOptions& opts = {})
    -> decltype(f(0.0)) {
    return filon_trig(f, w_freq, a, b, true, opts);
}

// ---------------------------------------------------------------------------
// Bracketed root finding (bisection with secant acceleration).

inline double find_root(const std::function<double(double)>& f, double lo, double hi,
                        double xtol = 1e-13, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if (flo * fhi > 0) throw NumericError("find_root: endpoints do not bracket a root");
    for (int it = 0; it < max_iter; ++it) {
        double mid;
        // secant proposal, fall back to bisection when outside or stalled
        const double sec = (lo * fhi - hi * flo) / (fhi - flo);
        const double bis = 0.5 * (lo + hi);
        mid = (it % 2 == 0 && sec > lo && sec < hi) ? sec : bis;
        const double fm = f(mid);
        if (fm == 0 || hi - lo < xtol * (1 + std::abs(mid))) return mid;
        if (flo * fm < 0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace biphoton
