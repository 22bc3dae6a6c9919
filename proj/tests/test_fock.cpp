#include "cvrep/fock.hpp"

#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

using namespace cvrep;
using Complex = std::complex<double>;

namespace {

std::mt19937 rng(12345);

ComplexMatrix random_hermitian(int dim) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(u(rng), u(rng));
    return 0.5 * (m + m.adjoint().eval());
}

// Characteristic polynomial coefficients via Faddeev-LeVerrier, then
// Durand-Kerner root finding: an eigenvalue oracle independent of any
// eigensolver, practical for dim <= 4.
std::vector<double> charpoly_roots(const ComplexMatrix& h) {
    const int n = static_cast<int>(h.rows());
    std::vector<Complex> coeff(static_cast<std::size_t>(n) + 1);  // c[0] lambda^n ... c[n]
    coeff[0] = 1.0;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        m = (h * m).eval();
        m += coeff[static_cast<std::size_t>(k - 1)] * ComplexMatrix::Identity(n, n);
        coeff[static_cast<std::size_t>(k)] = -(h * m).trace() / static_cast<double>(k);
    }
    // Durand-Kerner on the monic polynomial.
    std::vector<Complex> roots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = std::pow(Complex(0.4, 0.9), i);
    auto eval = [&](Complex x) {
        Complex v = 0.0;
        for (const Complex& c : coeff) v = v * x + c;
        return v;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
            const Complex delta = eval(roots[static_cast<std::size_t>(i)]) / denom;
            roots[static_cast<std::size_t>(i)] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    std::vector<double> out;
    for (const Complex& r : roots) out.push_back(r.real());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

// Closed-form displacement element via associated Laguerre polynomials.
Complex laguerre_displacement(int m, int n, Complex gamma) {
    auto laguerre = [](int k, int a, double x) {
        double lm1 = 1.0, l = 1.0 + a - x;
        if (k == 0) return lm1;
        for (int i = 1; i < k; ++i) {
            const double next = ((2.0 * i + 1.0 + a - x) * l - (i + a) * lm1) / (i + 1.0);
            lm1 = l;
            l = next;
        }
        return l;
    };
    const double x = std::norm(gamma);
    auto fact_ratio_sqrt = [](int lo, int hi) {  // sqrt(lo!/hi!), lo <= hi
        double v = 1.0;
        for (int k = lo + 1; k <= hi; ++k) v /= std::sqrt(static_cast<double>(k));
        return v;
    };
    if (m >= n)
        return fact_ratio_sqrt(n, m) * std::pow(gamma, m - n) * std::exp(-0.5 * x) *
               laguerre(n, m - n, x);
    return fact_ratio_sqrt(m, n) * std::pow(-std::conj(gamma), n - m) * std::exp(-0.5 * x) *
           laguerre(m, n - m, x);
}

}  // namespace

TEST_CASE("hermitian_eigenvalues: identity and diagonal") {
    CHECK(hermitian_eigenvalues(ComplexMatrix::Identity(3, 3)) ==
          std::vector<double>{1.0, 1.0, 1.0});
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 0.7;
    d(1, 1) = 0.3;
    const auto ev = hermitian_eigenvalues(d);
    CHECK(ev[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("hermitian_eigenvalues: matches characteristic polynomial roots (dim <= 4)") {
    for (int dim = 2; dim <= 4; ++dim) {
        for (int rep = 0; rep < 6; ++rep) {
            const ComplexMatrix h = random_hermitian(dim);
            const auto ev = hermitian_eigenvalues(h);
            const auto roots = charpoly_roots(h);
            double trace = 0.0;
            for (int i = 0; i < dim; ++i) {
                CHECK(ev[static_cast<std::size_t>(i)] ==
                      doctest::Approx(roots[static_cast<std::size_t>(i)]).epsilon(1e-8));
                trace += ev[static_cast<std::size_t>(i)];
            }
            CHECK(trace == doctest::Approx(h.trace().real()).epsilon(1e-10));
        }
    }
}

TEST_CASE("hermitian_eigenvalues: rejects non-Hermitian input") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eigenvalues(m), NonHermitianInput);
}

TEST_CASE("hermitian_eigenvalues: block-diagonal spectrum is the union") {
    const ComplexMatrix a = random_hermitian(3);
    const ComplexMatrix b = random_hermitian(2);
    ComplexMatrix blk = ComplexMatrix::Zero(5, 5);
    blk.topLeftCorner(3, 3) = a;
    blk.bottomRightCorner(2, 2) = b;
    auto all = hermitian_eigenvalues(a);
    const auto eb = hermitian_eigenvalues(b);
    all.insert(all.end(), eb.begin(), eb.end());
    std::sort(all.begin(), all.end(), std::greater<>());
    const auto got = hermitian_eigenvalues(blk);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(got[i] == doctest::Approx(all[i]).epsilon(1e-10));
}

TEST_CASE("partial_trace: product state and Bell state") {
    const ComplexMatrix ra = random_hermitian(3);
    const ComplexMatrix rb = random_hermitian(4);
    ComplexMatrix prod(12, 12);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l)
                    prod(i * 4 + k, j * 4 + l) = ra(i, j) * rb(k, l);
    const ComplexMatrix pa = partial_trace(prod, ModeDims{3, 4}, Mode::A);
    CHECK((pa - ra * rb.trace()).cwiseAbs().maxCoeff() < 1e-12);
    const ComplexMatrix pb = partial_trace(prod, ModeDims{3, 4}, Mode::B);
    CHECK((pb - rb * ra.trace()).cwiseAbs().maxCoeff() < 1e-12);

    // (|00> + |11>)(<00| + <11|)/2 on 2x2
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const ComplexMatrix rho = bell * bell.adjoint();
    const ComplexMatrix marg = partial_trace(rho, ModeDims{2, 2}, Mode::A);
    CHECK(marg(0, 0).real() == doctest::Approx(0.5));
    CHECK(marg(1, 1).real() == doctest::Approx(0.5));
    CHECK(std::abs(marg(0, 1)) < 1e-14);
}

TEST_CASE("partial_trace: preserves trace and Hermiticity on random input") {
    for (int rep = 0; rep < 5; ++rep) {
        const ComplexMatrix rho = random_hermitian(12);
        const ModeDims dims{3, 4};
        for (Mode keep : {Mode::A, Mode::B}) {
            const ComplexMatrix r = partial_trace(rho, dims, keep);
            CHECK(std::abs(r.trace() - rho.trace()) < 1e-12);
            CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
        }
        // tracing B then A equals the full trace
        const ComplexMatrix ra = partial_trace(rho, dims, Mode::A);
        CHECK(std::abs(ra.trace() - rho.trace()) < 1e-12);
    }
    CHECK_THROWS_AS(partial_trace(random_hermitian(5), ModeDims{2, 2}, Mode::A),
                    DimensionMismatch);
}

TEST_CASE("von_neumann_entropy: pinned values and clamping") {
    CHECK(von_neumann_entropy(std::array{1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(von_neumann_entropy(std::array{0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(von_neumann_entropy(std::array{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0));
    // tiny negatives are clamped, larger ones rejected
    CHECK(von_neumann_entropy(std::array{1.0, -1e-12}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(von_neumann_entropy(std::array{1.0, -1e-6}), NegativeEigenvalue);
}

TEST_CASE("von_neumann_entropy: permutation invariance and additivity") {
    std::array p{0.5, 0.3, 0.2};
    std::array q{0.9, 0.1};
    const double hp = von_neumann_entropy(p);
    std::array p2{0.2, 0.5, 0.3};
    CHECK(von_neumann_entropy(p2) == doctest::Approx(hp).epsilon(1e-12));
    std::vector<double> joint;
    for (double a : p)
        for (double b : q) joint.push_back(a * b);
    CHECK(von_neumann_entropy(joint) ==
          doctest::Approx(hp + von_neumann_entropy(q)).epsilon(1e-12));
}

TEST_CASE("displacement_matrix: identity at gamma=0 and vacuum overlap") {
    const ComplexMatrix d0 = displacement_matrix(Complex(0.0, 0.0), 6);
    CHECK((d0 - ComplexMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-14);
    for (Complex g : {Complex(0.5, 0.0), Complex(0.3, -0.7), Complex(1.2, 0.4)}) {
        const ComplexMatrix d = displacement_matrix(g, 8);
        CHECK(std::abs(d(0, 0) - std::exp(-0.5 * std::norm(g))) < 1e-13);
    }
}

TEST_CASE("displacement_matrix: agrees with the Laguerre closed form") {
    const Complex g(0.5, 0.0);
    const ComplexMatrix d = displacement_matrix(g, 40);
    double worst = 0.0;
    for (int m = 0; m < 10; ++m)
        for (int n = 0; n < 10; ++n)
            worst = std::max(worst, std::abs(d(m, n) - laguerre_displacement(m, n, g)));
    CHECK(worst < 1e-8);

    // unitarity on the lowest block: ||D^dag D - I||_max < 1e-8
    const ComplexMatrix u = (d.adjoint() * d - ComplexMatrix::Identity(40, 40)).cwiseAbs();
    CHECK(u.topLeftCorner(10, 10).maxCoeff() < 1e-8);
}

TEST_CASE("displacement_matrix: D(g) D(-g) = I on the interior block") {
    for (Complex g : {Complex(1.0, 0.0), Complex(0.4, 0.6), Complex(-0.8, 0.3)}) {
        const int dim = 40;
        const ComplexMatrix prod =
            displacement_matrix(g, dim) * displacement_matrix(-g, dim);
        const int inner = dim - dim / 4;  // outer 25% of rows/cols excluded
        const ComplexMatrix defect =
            (prod - ComplexMatrix::Identity(dim, dim)).topLeftCorner(inner, inner);
        CHECK(defect.cwiseAbs().maxCoeff() < 1e-8);
    }
}
