#include "cvrep/fock.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cvrep {

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m, double herm_tol) {
    if (m.rows() != m.cols())
        throw DimensionMismatch("hermitian_eigenvalues: matrix is not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (defect > herm_tol * scale)
        throw NonHermitianInput("hermitian_eigenvalues: Hermiticity defect " +
                                std::to_string(defect / scale) + " exceeds tolerance");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
    Eigen::VectorXd ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const ModeDims& dims, Mode keep) {
    if (rho.rows() != rho.cols() || rho.rows() != dims.joint())
        throw DimensionMismatch("partial_trace: dims do not match the matrix");
    const int da = dims.dim_a, db = dims.dim_b;
    if (keep == Mode::A) {
        ComplexMatrix out = ComplexMatrix::Zero(da, da);
        for (int i = 0; i < da; ++i)
            for (int j = 0; j < da; ++j)
                for (int k = 0; k < db; ++k) out(i, j) += rho(i * db + k, j * db + k);
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(db, db);
    for (int i = 0; i < db; ++i)
        for (int j = 0; j < db; ++j)
            for (int k = 0; k < da; ++k) out(i, j) += rho(k * db + i, k * db + j);
    return out;
}

double von_neumann_entropy(std::span<const double> eigs, double neg_tol) {
    double sum = 0.0;
    for (double v : eigs) sum += v;
    if (!(sum > 0.0))
        throw NegativeEigenvalue("von_neumann_entropy: spectrum has non-positive sum");
    double h = 0.0;
    for (double v : eigs) {
        double lam = v / sum;
        if (lam < -neg_tol)
            throw NegativeEigenvalue("von_neumann_entropy: eigenvalue " +
                                     std::to_string(lam) + " below -tolerance");
        if (lam <= 0.0) continue;  // clamped, contributes 0
        h -= lam * std::log2(lam);
    }
    return std::max(h, 0.0);
}

ComplexMatrix displacement_matrix(Complex gamma, int dim) {
    if (dim < 1) throw DimensionMismatch("displacement_matrix: dim must be >= 1");
    const int buf = dim + static_cast<int>(std::ceil(8.0 * std::abs(gamma))) + 8;

    ComplexMatrix a = ComplexMatrix::Zero(buf, buf);
    for (int k = 1; k < buf; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));

    // The truncated ladder operators are nilpotent, so both exponentials are
    // exact finite series.
    auto expm = [buf](const ComplexMatrix& m) {
        ComplexMatrix out = ComplexMatrix::Identity(buf, buf);
        ComplexMatrix term = ComplexMatrix::Identity(buf, buf);
        for (int k = 1; k <= buf; ++k) {
            term = (term * m / static_cast<double>(k)).eval();
            if (term.cwiseAbs().maxCoeff() == 0.0) break;
            out += term;
        }
        return out;
    };

    ComplexMatrix left = expm(gamma * a.adjoint().eval());
    ComplexMatrix right = expm(-std::conj(gamma) * a);
    ComplexMatrix full = std::exp(-0.5 * std::norm(gamma)) * (left * right);
    return full.topLeftCorner(dim, dim);
}

}  // namespace cvrep
