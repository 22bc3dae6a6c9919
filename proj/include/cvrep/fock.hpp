// Dense complex linear algebra over truncated Fock spaces: Hermitian
// eigendecomposition, partial trace, von Neumann entropy, and displacement
// operator matrices. Everything here is a pure function of its inputs.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace cvrep {

using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

struct NonHermitianInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeEigenvalue : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimensions of a two-mode truncated Fock space. The joint index convention
/// is fixed project-wide: k = n_A * dim_b + n_B (mode A varies slowest).
struct ModeDims {
    int dim_a = 1;
    int dim_b = 1;

    int joint() const { return dim_a * dim_b; }
    int index(int n_a, int n_b) const { return n_a * dim_b + n_b; }
};

enum class Mode { A, B };

/// Eigenvalues of a Hermitian matrix, descending. Throws NonHermitianInput if
/// ||m - m^dag||_max exceeds herm_tol relative to the largest element.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m,
                                          double herm_tol = 1e-9);

/// Trace out one mode of a two-mode operator. Preserves the trace exactly
/// (up to rounding) and Hermiticity of Hermitian inputs.
ComplexMatrix partial_trace(const ComplexMatrix& rho, const ModeDims& dims,
                            Mode keep);

/// H = -sum lambda_i log2 lambda_i in bits. The spectrum is normalized by its
/// sum first; eigenvalues in [-neg_tol, 0] (relative to the sum) are clamped
/// to zero, anything below -neg_tol throws NegativeEigenvalue.
double von_neumann_entropy(std::span<const double> eigs, double neg_tol = 1e-9);

/// Matrix elements of D(gamma) = exp(-|g|^2/2) exp(g c^dag) exp(-g* c) on the
/// dim-truncated Fock space. Built at dim + ceil(8|gamma|) + 8 and cropped so
/// interior elements are accurate despite the truncated ladder operators.
ComplexMatrix displacement_matrix(Complex gamma, int dim);

}  // namespace cvrep
