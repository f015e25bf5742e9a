// SPDX-License-Identifier: Apache-2.0
//
// Closed-form operator calculus: the covariance-kernel field S(chi, kappa),
// validity bounds of the expansion machinery (n_lim, x_max, N_max) and the
// Schmidt number.
#pragma once

#include <Eigen/Dense>

#include "biphoton/model.hpp"

namespace biphoton {

/// The 4x4 covariance-kernel field with 2x2 party blocks,
///   S = [[S_AA, S_AB], [S_BA, S_BB]],  S_BB = S_AA,  S_BA = conj(S_AB).
/// Quadrature ordering within a block is (x, p).
class SMatrix {
public:
    explicit SMatrix(PhiModel phi) : phi_(std::move(phi)) {}

    Eigen::Matrix2cd aa(double chi, double kappa) const;
    Eigen::Matrix2cd ab(double chi, double kappa) const;
    Eigen::Matrix2cd bb(double chi, double kappa) const { return aa(chi, kappa); }
    Eigen::Matrix2cd ba(double chi, double kappa) const { return ab(chi, kappa).conjugate(); }
    Eigen::Matrix4cd at(double chi, double kappa) const;

    /// Time-shift of party q by T: S_{q q'} and S_{q' q} pick up the phase
    /// e^{+- i kappa T / delta_t}; valid while T << Delta_t.
    SMatrix time_shifted(double T_over_dt, bool party_a) const;

    const PhiModel& phi() const { return phi_; }

private:
    PhiModel phi_;
    double shift_a_ = 0; // accumulated phase coefficients, units of 1/delta_t
    double shift_b_ = 0;
};

SMatrix s_matrix(const BiphotonState& state);

/// Validity bounds specialized to collinear degenerate phase matching:
///   n_lim = 2 Delta_t/delta_t,
///   x_max = sqrt(<N> delta_t/Delta_t) * |phi|_inf / |phi|_2
/// with width-normalized kernel norms (the convention that reproduces the
/// published N_max table).
ValidityReport validity(const EntanglementParams& params, double mean_N,
                        const PhiModel& phi, double ok_threshold = 0.1);

/// Upper bound N_max of the mean photon number at the given entanglement.
/// Solves cosh(2x)(2x)^{n_lim} / Gamma(n_lim+1) = min(x, 2x^2) for the
/// largest root and converts through the normalized kernel norms; the result
/// is independent of phi.scale.
double n_max(double ratio, const PhiModel& phi);

/// Schmidt number K = ratio/(2 pi) * (|phi|_2 / |phi|_4)^4 with
/// width-normalized norms; independent of phi.scale.
double schmidt_number(const BiphotonState& state);

/// Checked state factory: computes the mean photon number and attaches the
/// validity report.
BiphotonState make_state(const EntanglementParams& params, const PhiModel& phi);

/// State with the scale calibrated to a target mean photon number.
BiphotonState make_state_with_mean(const EntanglementParams& params,
                                   const PhiModel& templ, double target_N);

/// Numeric quadrature of the unit-scale kernel norms, for cross-checking the
/// cached analytic values.  The supremum is located by grid scan plus local
/// refinement.
KernelNorms compute_unit_norms(const PhiModel& phi, const QuadOptions& opts = {});

} // namespace biphoton
