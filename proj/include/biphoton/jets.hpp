// SPDX-License-Identifier: Apache-2.0
//
// Truncated Taylor arithmetic used to differentiate probability generating
// functions exactly under the integral sign.
//
// Jet2T<S> carries the coefficients c[i][j] = d^i_A d^j_B f / (i! j!) of a
// bivariate expansion truncated at per-variable orders (na, nb).  MultiJet
// carries a multilinear expansion (degree <= 1 in each of up to 16 variables)
// and is used for mixed first-order derivatives of correlation functions.
#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton {

template <typename S>
class Jet2T {
public:
    Jet2T() : na_(0), nb_(0), c_(1, S(0)) {}
    Jet2T(int na, int nb) : na_(na), nb_(nb), c_((na + 1) * (nb + 1), S(0)) {}
    Jet2T(int na, int nb, S value) : Jet2T(na, nb) { c_[0] = value; }

    static Jet2T constant(S value, int na, int nb) { return Jet2T(na, nb, value); }

    /// Seed for the first variable: value + dy_A.
    static Jet2T variable_a(S value, int na, int nb) {
        Jet2T j(na, nb, value);
        if (na > 0) j.at(1, 0) = S(1);
        return j;
    }
    /// Seed for the second variable: value + dy_B.
    static Jet2T variable_b(S value, int na, int nb) {
        Jet2T j(na, nb, value);
        if (nb > 0) j.at(0, 1) = S(1);
        return j;
    }

    int order_a() const { return na_; }
    int order_b() const { return nb_; }

    S& at(int i, int j) { return c_[static_cast<size_t>(i) * (nb_ + 1) + j]; }
    const S& at(int i, int j) const { return c_[static_cast<size_t>(i) * (nb_ + 1) + j]; }
    S value() const { return c_[0]; }

    /// Mixed derivative d^i_A d^j_B (coefficient times i! j!).
    S derivative(int i, int j) const {
        S v = at(i, j);
        for (int k = 2; k <= i; ++k) v *= S(k);
        for (int k = 2; k <= j; ++k) v *= S(k);
        return v;
    }

    Jet2T& operator+=(const Jet2T& o) {
        assert(same_shape(o));
        for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet2T& operator-=(const Jet2T& o) {
        assert(same_shape(o));
        for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet2T& operator+=(S s) { c_[0] += s; return *this; }
    Jet2T& operator-=(S s) { c_[0] -= s; return *this; }
    Jet2T& operator*=(S s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend Jet2T operator+(Jet2T a, const Jet2T& b) { a += b; return a; }
    friend Jet2T operator-(Jet2T a, const Jet2T& b) { a -= b; return a; }
    friend Jet2T operator+(Jet2T a, S s) { a += s; return a; }
    friend Jet2T operator+(S s, Jet2T a) { a += s; return a; }
    friend Jet2T operator-(Jet2T a, S s) { a -= s; return a; }
    friend Jet2T operator-(S s, const Jet2T& a) {
        Jet2T r = -a;
        r += s;
        return r;
    }
    friend Jet2T operator*(Jet2T a, S s) { a *= s; return a; }
    friend Jet2T operator*(S s, Jet2T a) { a *= s; return a; }
    friend Jet2T operator/(Jet2T a, S s) { a *= S(1) / s; return a; }
    Jet2T operator-() const {
        Jet2T r(na_, nb_);
        for (size_t k = 0; k < c_.size(); ++k) r.c_[k] = -c_[k];
        return r;
    }

    friend Jet2T operator*(const Jet2T& a, const Jet2T& b) {
        assert(a.same_shape(b));
        Jet2T r(a.na_, a.nb_);
        for (int i = 0; i <= a.na_; ++i)
            for (int j = 0; j <= a.nb_; ++j) {
                const S aij = a.at(i, j);
                if (aij == S(0)) continue;
                for (int k = 0; i + k <= a.na_; ++k)
                    for (int l = 0; j + l <= a.nb_; ++l)
                        r.at(i + k, j + l) += aij * b.at(k, l);
            }
        return r;
    }

    bool same_shape(const Jet2T& o) const { return na_ == o.na_ && nb_ == o.nb_; }

    /// Largest absolute coefficient; used by quadrature error control.
    double norm() const {
        double m = 0;
        for (const auto& v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    /// f(jet) given the derivative sequence ds[k] = f^(k)(value()).
    /// Evaluates sum_k ds[k]/k! * (jet - value)^k by Horner.
    Jet2T compose(const std::vector<S>& ds) const {
        Jet2T nil = *this;
        nil.c_[0] = S(0);
        const int depth = static_cast<int>(ds.size()) - 1;
        S fact = S(1);
        std::vector<S> coeff(ds.size());
        for (int k = 0; k <= depth; ++k) {
            if (k > 1) fact *= S(k);
            coeff[k] = ds[k] / fact;
        }
        Jet2T r(na_, nb_, coeff[depth]);
        for (int k = depth - 1; k >= 0; --k) {
            r = r * nil;
            r += coeff[k];
        }
        return r;
    }

    int series_depth() const { return na_ + nb_; }

private:
    int na_, nb_;
    std::vector<S> c_;
};

using Jet2 = Jet2T<double>;
using CJet2 = Jet2T<std::complex<double>>;

template <typename S>
Jet2T<S> exp(const Jet2T<S>& x) {
    const int d = x.series_depth();
    std::vector<S> ds(d + 1, std::exp(x.value()));
    return x.compose(ds);
}

template <typename S>
Jet2T<S> log(const Jet2T<S>& x) {
    const S x0 = x.value();
    if (std::abs(x0) == 0.0)
        throw NumericError("log of jet with zero value part");
    const int d = x.series_depth();
    std::vector<S> ds(d + 1);
    ds[0] = std::log(x0);
    S p = S(1) / x0; // (-1)^{k-1} (k-1)! / x0^k, factorial folded by compose
    S sign = S(1);
    S fact = S(1);
    for (int k = 1; k <= d; ++k) {
        if (k > 1) fact *= S(k - 1);
        ds[k] = sign * fact * p;
        p /= x0;
        sign = -sign;
    }
    return x.compose(ds);
}

/// x^alpha for real alpha (value part must be positive for S=double).
template <typename S>
Jet2T<S> pow(const Jet2T<S>& x, double alpha) {
    const S x0 = x.value();
    const int d = x.series_depth();
    std::vector<S> ds(d + 1);
    S v = std::pow(x0, S(alpha));
    double a = alpha;
    for (int k = 0; k <= d; ++k) {
        ds[k] = v;
        v = v * S(a) / x0;
        a -= 1.0;
    }
    return x.compose(ds);
}

template <typename S>
Jet2T<S> recip(const Jet2T<S>& x) { return pow(x, -1.0); }

inline Jet2 real(const CJet2& x) {
    Jet2 r(x.order_a(), x.order_b());
    for (int i = 0; i <= x.order_a(); ++i)
        for (int j = 0; j <= x.order_b(); ++j) r.at(i, j) = x.at(i, j).real();
    return r;
}
inline double max_imag(const CJet2& x) {
    double m = 0;
    for (int i = 0; i <= x.order_a(); ++i)
        for (int j = 0; j <= x.order_b(); ++j) m = std::max(m, std::abs(x.at(i, j).imag()));
    return m;
}
inline CJet2 complexify(const Jet2& x) {
    CJet2 r(x.order_a(), x.order_b());
    for (int i = 0; i <= x.order_a(); ++i)
        for (int j = 0; j <= x.order_b(); ++j) r.at(i, j) = x.at(i, j);
    return r;
}

// ---------------------------------------------------------------------------
// Multilinear jets: polynomials of degree <= 1 in each of nvars variables,
// coefficients indexed by variable subset mask.

template <typename S>
class MultiJetT {
public:
    MultiJetT() : nvars_(0), c_(1, S(0)) {}
    explicit MultiJetT(int nvars) : nvars_(nvars), c_(size_t(1) << nvars, S(0)) {}
    MultiJetT(int nvars, S value) : MultiJetT(nvars) { c_[0] = value; }

    static MultiJetT variable(int nvars, int which, S coeff = S(1)) {
        MultiJetT j(nvars);
        j.c_[size_t(1) << which] = coeff;
        return j;
    }

    int nvars() const { return nvars_; }
    S& operator[](uint32_t mask) { return c_[mask]; }
    const S& operator[](uint32_t mask) const { return c_[mask]; }
    S value() const { return c_[0]; }
    /// Coefficient of the full product of variables = the mixed first derivative.
    S top() const { return c_.back(); }

    MultiJetT& operator+=(const MultiJetT& o) {
        for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    MultiJetT& operator-=(const MultiJetT& o) {
        for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    friend MultiJetT operator+(MultiJetT a, const MultiJetT& b) { a += b; return a; }
    friend MultiJetT operator-(MultiJetT a, const MultiJetT& b) { a -= b; return a; }
    friend MultiJetT operator*(const MultiJetT& a, const MultiJetT& b) {
        MultiJetT r(a.nvars_);
        const uint32_t full = uint32_t(c_size(a.nvars_)) - 1;
        for (uint32_t ma = 0; ma <= full; ++ma) {
            const S va = a.c_[ma];
            if (va == S(0)) continue;
            const uint32_t rest = full & ~ma;
            // enumerate submasks of the complement so products stay multilinear
            uint32_t mb = rest;
            while (true) {
                r.c_[ma | mb] += va * b.c_[mb];
                if (mb == 0) break;
                mb = (mb - 1) & rest;
            }
        }
        return r;
    }
    MultiJetT operator*(S s) const {
        MultiJetT r = *this;
        for (auto& v : r.c_) v *= s;
        return r;
    }

    /// Multiplicative inverse; requires nonzero value part.
    MultiJetT inverse() const {
        MultiJetT nil = *this;
        const S v0 = c_[0];
        nil.c_[0] = S(0);
        nil = nil * (S(-1) / v0);
        MultiJetT r(nvars_, S(1));
        MultiJetT term(nvars_, S(1));
        for (int k = 1; k <= nvars_; ++k) {
            term = term * nil;
            r += term;
        }
        return r * (S(1) / v0);
    }

    /// x^alpha via the binomial series in the nilpotent part.
    MultiJetT pow(double alpha) const {
        MultiJetT nil = *this;
        const S v0 = c_[0];
        nil.c_[0] = S(0);
        MultiJetT r(nvars_, S(1));
        MultiJetT term(nvars_, S(1));
        S coeff = S(1);
        S vpow = S(1);
        for (int k = 1; k <= nvars_; ++k) {
            term = term * nil;
            coeff *= S(alpha - (k - 1)) / S(k);
            vpow /= v0;
            r += term * (coeff * vpow);
        }
        return r * std::pow(v0, S(alpha));
    }

private:
    static size_t c_size(int nvars) { return size_t(1) << nvars; }
    int nvars_;
    std::vector<S> c_;
};

using MultiJet = MultiJetT<double>;

} // namespace biphoton
