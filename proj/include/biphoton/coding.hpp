// SPDX-License-Identifier: Apache-2.0
//
// Phase-time coding: the Franson arrangement of two unbalanced Mach-Zehnder
// interferometers, the middle-interval PGF with detuning, key probabilities
// and the interference visibility.
#pragma once

#include "biphoton/pgf.hpp"

namespace biphoton {

/// Interferometer setup.  tau is the pump pulse delay, tau_A/tau_B the MZI
/// delays, phase = phi_alpha - phi_A - phi_B the composite phase.  All delay
/// mismatches must stay well below Delta_t for the three detection pulses to
/// designate independent modes.
struct CodingSetup {
    double tau = 0;
    double tau_A = 0;
    double tau_B = 0;
    double phase = 0;                ///< radians, reduced to [0, 2 pi)
    double t_plus = 0.25, t_minus = 0.25; ///< arm transmissions incl. BS tracing
    double separation_threshold = 1.0 / 20.0; ///< mismatch cap in units of Delta_t

    double detuning() const { return tau_A - tau_B; }
};

/// PGF of both parties counting in the middle detection interval I_m.
/// Depends on tau_A - tau_B only, never on tau.
PgfPtr pgf_coding(const BiphotonState& state, const CodingSetup& setup,
                  const Interval& I_m, const QuadOptions& opts = {});

/// Default middle window [-4 Delta_t, 4 Delta_t] around the pulse center.
Interval default_middle_interval(const BiphotonState& state);

/// p(n_A=1; n_B=1), the figure of merit for phase-time coding.
double prob_exactly_one_pair(const BiphotonState& state, const CodingSetup& setup,
                             const QuadOptions& opts = {});

/// p(n_A>=2; n_B>=2) by inclusion-exclusion; discarded during key distillation.
double prob_multiple_pairs(const BiphotonState& state, const CodingSetup& setup,
                           const QuadOptions& opts = {});

/// V = (p|_{phi=0} - p|_{phi=pi}) / (p|_{phi=0} + p|_{phi=pi}) at the given
/// detuning tau_A - tau_B (seconds).
double visibility(const BiphotonState& state, double detuning,
                  const QuadOptions& opts = {});

/// Detuning (in units of delta_t) at which the visibility has dropped to
/// `level` times its zero-detuning value; bisection to 1e-3.
double visibility_crossing(const BiphotonState& state, double level = 0.93,
                           const QuadOptions& opts = {});

} // namespace biphoton
