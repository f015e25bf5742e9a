// SPDX-License-Identifier: Apache-2.0
//
// First-order expansion of the counting statistics in the interval width:
// party PGFs on half lines, the cross-interval correction PGFs, and the
// probability of one photon on each side of the pulse center.
#pragma once

#include <Eigen/Dense>

#include "biphoton/pgf.hpp"

namespace biphoton {

enum class HalfLine { PositiveTimes, NegativeTimes };

/// f(M, N) = (M-N)^{-1} [N ln(I+M) - M ln(I+N)] for commuting arguments,
/// continuously extended across M = N.
double f_mn(double m, double n);
Eigen::Matrix2cd f_mn(const Eigen::Matrix2cd& M, const Eigen::Matrix2cd& N);

/// One-party PGF over a half line including the first-order interval-border
/// correction.  Requires a kappa-symmetric model.
class OnePartyPgf {
public:
    virtual ~OnePartyPgf() = default;
    /// Expansion of g(y) around y to order n (coefficients d^k g / k!).
    virtual Jet2 taylor(double y, int n) const = 0;
    double value(double y) const { return taylor(y, 0).value(); }
    double derivative(int n, double y) const { return taylor(y, n).derivative(n, 0); }
};

using OnePartyPgfPtr = std::shared_ptr<const OnePartyPgf>;

OnePartyPgfPtr pgf_party_intermediate(const BiphotonState& state, HalfLine which,
                                      const QuadOptions& opts = {});

/// Correction PGF g_{q,cor} carrying the correlation between the party's
/// half line and the opposite one; (y_A, y_B) ordering follows Pgf.
PgfPtr pgf_correction(const BiphotonState& state, HalfLine which,
                      const QuadOptions& opts = {});

/// p(n_A=1 on [0,inf); n_B=1 on (-inf,0]).  `first` is the uncorrelated
/// product of the party one-photon probabilities, `second` adds the two
/// correction terms.
struct OneEachProbabilities {
    double p_uncorrelated;
    double p_total;
};

OneEachProbabilities prob_one_each_disjoint(const BiphotonState& state,
                                            const QuadOptions& opts = {});

} // namespace biphoton
