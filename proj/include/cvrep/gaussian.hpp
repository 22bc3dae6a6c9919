// Covariance-matrix toolkit for the no-scissor Gaussian sub-problems.
// Convention: quadrature ordering (x1, p1, x2, p2, ...), vacuum = identity.
// Means are never tracked; outcome-dependent displacements are corrected
// locally and do not affect covariances.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace cvrep {

struct NonPhysicalResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GaussianState {
    Eigen::MatrixXd cov;
    int n_modes = 0;

    /// Largest violation of cov + i*Omega >= 0 (0 when physical).
    double physicality_defect() const;
};

/// Two-mode squeezed vacuum: diagonal blocks nu*I, off-diagonal
/// sqrt(nu^2-1)*diag(1,-1), nu = (1+chi^2)/(1-chi^2).
GaussianState tmsv_covariance(double chi);

/// Pure-loss channel on one mode: block -> eta*block + (1-eta)*I,
/// cross blocks scale by sqrt(eta).
GaussianState apply_loss(const GaussianState& gs, double eta, int mode);

/// Dual-homodyne entanglement swap: mode 1 of each input is mixed on a 50:50
/// beam splitter, then conjugate quadratures are measured. Returns the
/// outcome-independent covariance of the retained pair (mode 0 of gs1, mode 0
/// of gs2). Swapping two pure TMSVs yields tmsv_covariance(chi1*chi2) exactly.
GaussianState dhd_swap(const GaussianState& gs1, const GaussianState& gs2);

/// Symplectic spectrum (one representative per +/- pair, ascending).
std::vector<double> symplectic_eigenvalues(const GaussianState& gs);

/// h(nu_A) - sum_i h(nu_i) in bits, h the bosonic entropy function.
double gaussian_rci(const GaussianState& gs);

/// Baseline (c): one TMSV(chi) arm crosses the full channel eta_total and is
/// swapped against a local TMSV(chi) at the receiver; no scissors, M = 1.
double baseline_direct_dhd(double chi, double eta_total);

}  // namespace cvrep
