#include "cvrep/gaussian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cvrep {

namespace {

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd om = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        om(2 * k, 2 * k + 1) = 1.0;
        om(2 * k + 1, 2 * k) = -1.0;
    }
    return om;
}

Eigen::MatrixXd beam_splitter_5050(int n_modes, int m1, int m2) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    const double t = 1.0 / std::sqrt(2.0);
    for (int q = 0; q < 2; ++q) {
        const int i = 2 * m1 + q, j = 2 * m2 + q;
        s(i, i) = t;
        s(i, j) = t;
        s(j, i) = -t;
        s(j, j) = t;
    }
    return s;
}

// Homodyne of quadrature quad (0 = x, 1 = p) of one mode; returns the
// conditional covariance of the remaining modes (outcome-independent).
Eigen::MatrixXd measure_quadrature(const Eigen::MatrixXd& cov, int mode, int quad) {
    const int dim = static_cast<int>(cov.rows());
    std::vector<int> keep;
    keep.reserve(static_cast<std::size_t>(dim) - 2);
    for (int k = 0; k < dim; ++k)
        if (k / 2 != mode) keep.push_back(k);
    const int mi = 2 * mode + quad;
    const double v = cov(mi, mi);
    if (!(v > 0.0)) throw NonPhysicalResult("measure_quadrature: non-positive variance");
    Eigen::MatrixXd a(dim - 2, dim - 2);
    Eigen::VectorXd c(dim - 2);
    for (int r = 0; r < dim - 2; ++r) {
        c(r) = cov(keep[static_cast<std::size_t>(r)], mi);
        for (int s2 = 0; s2 < dim - 2; ++s2)
            a(r, s2) = cov(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(s2)]);
    }
    return a - (c * c.transpose()) / v;
}

double bosonic_entropy(double nu) {
    if (nu <= 1.0 + 1e-12) return 0.0;
    const double ap = (nu + 1.0) / 2.0, am = (nu - 1.0) / 2.0;
    return ap * std::log2(ap) - am * std::log2(am);
}

}  // namespace

double GaussianState::physicality_defect() const {
    const int dim = 2 * n_modes;
    Eigen::MatrixXcd m = cov.cast<std::complex<double>>();
    m += std::complex<double>(0.0, 1.0) * symplectic_form(n_modes).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues().minCoeff();
    (void)dim;
    return std::max(0.0, -lo);
}

GaussianState tmsv_covariance(double chi) {
    if (!(chi >= 0.0 && chi < 1.0))
        throw std::invalid_argument("tmsv_covariance: chi must be in [0, 1)");
    const double nu = (1.0 + chi * chi) / (1.0 - chi * chi);
    const double c = std::sqrt(nu * nu - 1.0);
    GaussianState gs;
    gs.n_modes = 2;
    gs.cov = Eigen::MatrixXd::Zero(4, 4);
    gs.cov(0, 0) = gs.cov(1, 1) = gs.cov(2, 2) = gs.cov(3, 3) = nu;
    gs.cov(0, 2) = gs.cov(2, 0) = c;
    gs.cov(1, 3) = gs.cov(3, 1) = -c;
    return gs;
}

GaussianState apply_loss(const GaussianState& gs, double eta, int mode) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("apply_loss: eta outside (0, 1]");
    if (mode < 0 || mode >= gs.n_modes)
        throw std::invalid_argument("apply_loss: bad mode index");
    GaussianState out = gs;
    const double rt = std::sqrt(eta);
    for (int q = 0; q < 2; ++q) {
        const int i = 2 * mode + q;
        for (int k = 0; k < 2 * gs.n_modes; ++k) {
            out.cov(i, k) *= rt;
            out.cov(k, i) *= rt;
        }
    }
    out.cov(2 * mode, 2 * mode) += 1.0 - eta;
    out.cov(2 * mode + 1, 2 * mode + 1) += 1.0 - eta;
    return out;
}

GaussianState dhd_swap(const GaussianState& gs1, const GaussianState& gs2) {
    if (gs1.n_modes != 2 || gs2.n_modes != 2)
        throw std::invalid_argument("dhd_swap: both inputs must be 2-mode states");
    // Stack as modes (A, C1, B, C2); mode 1 of each input is measured.
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(8, 8);
    cov.topLeftCorner(4, 4) = gs1.cov;
    cov.bottomRightCorner(4, 4) = gs2.cov;
    const Eigen::MatrixXd s = beam_splitter_5050(4, 1, 3);
    cov = s * cov * s.transpose();
    cov = measure_quadrature(cov, 1, 1);  // p on the first output
    cov = measure_quadrature(cov, 2, 0);  // x on the second (old C2, shifted)
    GaussianState out;
    out.n_modes = 2;
    out.cov = cov;
    return out;
}

std::vector<double> symplectic_eigenvalues(const GaussianState& gs) {
    const Eigen::MatrixXd m = symplectic_form(gs.n_modes) * gs.cov;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    std::vector<double> mags;
    mags.reserve(static_cast<std::size_t>(2 * gs.n_modes));
    for (int i = 0; i < 2 * gs.n_modes; ++i)
        mags.push_back(std::abs(solver.eigenvalues()(i)));
    std::sort(mags.begin(), mags.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(gs.n_modes));
    for (int i = 0; i < gs.n_modes; ++i) out.push_back(mags[static_cast<std::size_t>(2 * i)]);
    return out;
}

double gaussian_rci(const GaussianState& gs) {
    if (gs.n_modes != 2) throw std::invalid_argument("gaussian_rci: needs a 2-mode state");
    if (gs.physicality_defect() > 1e-9)
        throw NonPhysicalResult("gaussian_rci: state violates cov + i*Omega >= 0");
    GaussianState a;
    a.n_modes = 1;
    a.cov = gs.cov.topLeftCorner(2, 2);
    const double nu_a = std::sqrt(std::max(a.cov.determinant(), 1.0));
    double h_ab = 0.0;
    for (double nu : symplectic_eigenvalues(gs)) h_ab += bosonic_entropy(nu);
    return bosonic_entropy(nu_a) - h_ab;
}

double baseline_direct_dhd(double chi, double eta_total) {
    const GaussianState sent = apply_loss(tmsv_covariance(chi), eta_total, 1);
    const GaussianState local = tmsv_covariance(chi);
    return std::max(gaussian_rci(dhd_swap(sent, local)), 0.0);
}

}  // namespace cvrep
