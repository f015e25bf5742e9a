// SPDX-License-Identifier: Apache-2.0
//
// Probability generating functions of the two-party counting statistics for
// small and large detection windows, correlation functions, detector
// efficiency folding and probability extraction.
#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "biphoton/model.hpp"
#include "biphoton/opcalc.hpp"

namespace biphoton {

/// Detection window in seconds; either end may be infinite.
struct Interval {
    double lo;
    double hi;

    Interval(double l, double h) : lo(l), hi(h) {
        if (!(lo < hi)) throw DomainError("Interval: lo must be < hi");
    }
    static Interval whole() {
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    }
    double width() const { return hi - lo; }
};

enum class WidthClass { Small, Intermediate, Large };

struct WidthThresholds {
    double small_over_dt = 1.0 / 20.0; ///< Small: width <= delta_t/20
    double large_over_dt = 20.0;       ///< Large: width >= 20 delta_t
};

WidthClass classify(const Interval& I, double delta_t, const WidthThresholds& thr = {});

/// Two-variable PGF g(y_A, y_B) with an exact-derivative contract.  taylor()
/// returns the expansion around (yA, yB) with per-variable orders (na, nb);
/// the integrands are differentiated under the integral sign through
/// truncated Taylor arithmetic.
class Pgf {
public:
    virtual ~Pgf() = default;
    virtual Jet2 taylor(double yA, double yB, int na, int nb) const = 0;
    virtual const char* provenance() const = 0;

    double value(double yA, double yB) const { return taylor(yA, yB, 0, 0).value(); }
    double derivative(int na, int nb, double yA, double yB) const {
        return taylor(yA, yB, na, nb).derivative(na, nb);
    }
};

using PgfPtr = std::shared_ptr<const Pgf>;

/// PGF for both detection windows much narrower than delta_t; the Fredholm
/// determinant collapses to a 4x4 determinant at one time value per party.
PgfPtr pgf_small(const BiphotonState& state, double T_A, double T_B, double width_A,
                 double width_B, const WidthThresholds& thr = {},
                 const QuadOptions& opts = {});

/// Normal-ordered correlation density <N_A(t_A1)...N_B(t_Bm)> in units of
/// s^-(m_A+m_B).  Times within a party must be distinct.
double correlation_function(const BiphotonState& state,
                            const std::vector<double>& times_A,
                            const std::vector<double>& times_B,
                            const QuadOptions& opts = {});

/// Joint PGF for a shared window much wider than delta_t.
PgfPtr pgf_large_joint(const BiphotonState& state, const Interval& I,
                       const QuadOptions& opts = {});

/// Factorization over large windows: g = g_A^{IA\IB} g_B^{IB\IA} g_j^{IA&IB}.
struct PgfDecomposition {
    PgfPtr a_only; ///< one-party factor, constant in y_B
    PgfPtr b_only; ///< one-party factor, constant in y_A
    PgfPtr joint;
};

PgfDecomposition pgf_decompose(const BiphotonState& state, const Interval& I_A,
                               const Interval& I_B, const QuadOptions& opts = {});

/// Detector efficiencies: y_q -> 1 - eta_q + eta_q y_q.
PgfPtr apply_efficiency(PgfPtr g, double eta_A, double eta_B);

/// p(n_A, n_B) = d^nA_A d^nB_B g(0,0) / (nA! nB!).
double pmf(const Pgf& g, int n_A, int n_B);
inline double pmf(const PgfPtr& g, int n_A, int n_B) { return pmf(*g, n_A, n_B); }

/// Joint probability table adaptively truncated until the missing mass drops
/// below `deficit_tol` (or the order cap is hit, flagged by `converged`).
struct PmfTable {
    std::vector<std::vector<double>> p; ///< p[nA][nB]
    double deficit = 1.0;
    bool converged = false;
};

PmfTable pmf_table(const Pgf& g, double deficit_tol = 1e-6, int max_order = 40);

} // namespace biphoton
