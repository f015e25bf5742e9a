// SPDX-License-Identifier: Apache-2.0
//
// Brute-force ground truth: discretize the joint amplitude on a time grid,
// build the quadrature covariance through a polar (singular value)
// factorization, and evaluate the exact probability generating function as a
// finite determinant.
#pragma once

#include <Eigen/Dense>
#include <string>

#include "biphoton/pgf.hpp"

namespace biphoton {

/// Uniform time grid t_i = -L + i h, i = 0..m-1, with m = 2L/h + 1.
struct TimeGrid {
    double h = 0;
    double L = 0;
    int m = 0;
    std::vector<double> t;

    /// Checked construction: h <= delta_t/8, L >= 4 Delta_t, and m <= 4096
    /// unless `allow_large` overrides the memory guardrail.
    static TimeGrid make(const EntanglementParams& params, double h, double L,
                         bool allow_large = false);
};

/// Discretized covariance of the state on a grid.  The hyperbolic kernel
/// matrices are kept; the full 4m x 4m sigma is materialized on demand.
/// Index order of sigma: party (A,B) x quadrature (x,p) x time.
struct CovarianceGrid {
    TimeGrid grid;
    EntanglementParams params{1.0, 1.0};
    double scale = 0;
    bool real_symmetric = false;

    // real fast path (psi real symmetric): c == ctilde, su symmetric
    Eigen::MatrixXd c_r, su_r;
    // general path
    Eigen::MatrixXcd c, ctilde, su;

    Eigen::MatrixXcd stilde_utdag() const {
        return real_symmetric ? Eigen::MatrixXcd(su_r.transpose().cast<std::complex<double>>())
                              : Eigen::MatrixXcd(su.adjoint());
    }

    /// Full real symmetric covariance; memory grows as 16 m^2 doubles.
    Eigen::MatrixXd sigma() const;
};

CovarianceGrid build_covariance(const BiphotonState& state, const TimeGrid& grid);

/// g(y_A, y_B) = det[I + diag((1-y_A) P_A, (1-y_B) P_B)(sigma - I/2)]^{-1/2}.
/// Grid cells enter a window through the half-open rule t_i in [lo, hi).
double fredholm_pgf(const CovarianceGrid& cov, const Interval& I_A, const Interval& I_B,
                    double y_A, double y_B);

/// Normal-ordered moment density at the grid nodes nearest the requested
/// times; supported orders: <N_q(t)>, <:N_q(t) N_q'(t'):> (total order <= 2).
double oracle_moments(const CovarianceGrid& cov, const std::vector<double>& times_A,
                      const std::vector<double>& times_B);

/// Write sigma with a parameter header; format "csv" or "bin" (row-major).
void dump_covariance(const CovarianceGrid& cov, const std::string& path,
                     const std::string& format);

} // namespace biphoton
