#pragma once

// Dense complex kernels with explicit accuracy contracts: eigendecomposition
// of non-Hermitian matrices and LU solves with singularity detection.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "wgqed/errors.hpp"

namespace wgqed {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr cplx I_unit{0.0, 1.0};

namespace linalg {

inline bool all_finite(const ComplexMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    return true;
}

inline void require_square_finite(const ComplexMatrix& a, const char* who) {
    if (a.rows() != a.cols())
        throw ConfigError(std::string(who) + ": matrix must be square");
    if (!all_finite(a))
        throw ConfigError(std::string(who) + ": matrix has non-finite entries");
}

// Rotates v so that its largest-magnitude component is real and positive.
// Ties go to the lowest index, which keeps the choice deterministic.
inline void fix_phase(Eigen::Ref<ComplexVector> v) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best_abs * (1.0 + 1e-12)) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

}  // namespace linalg

struct EigenDecomposition {
    ComplexVector values;    // sorted by descending -Im (most subradiant last)
    ComplexMatrix vectors;   // unit Euclidean norm columns, phase fixed
    double backward_error = 0.0;  // max_k |A v_k - l_k v_k| / |A|_F
};

// General dense eigendecomposition. Throws NumericalError when the solver does
// not converge or when any pair violates the backward-error bound.
inline EigenDecomposition eig(const ComplexMatrix& a, double tol = 1e-10) {
    linalg::require_square_finite(a, "eig");
    const Eigen::Index n = a.rows();
    EigenDecomposition out;
    if (n == 0) return out;

    Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eig: QR iteration did not converge");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const ComplexVector& lam = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        if (lam(x).imag() != lam(y).imag()) return lam(x).imag() < lam(y).imag();
        return lam(x).real() < lam(y).real();
    });

    out.values.resize(n);
    out.vectors.resize(n, n);
    const double anorm = a.norm();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = lam(src);
        ComplexVector v = solver.eigenvectors().col(src);
        const double vn = v.norm();
        if (!(vn > 0.0)) throw NumericalError("eig: zero eigenvector returned");
        v /= vn;
        linalg::fix_phase(v);
        out.vectors.col(k) = v;
        const double r = (a * v - lam(src) * v).norm();
        worst = std::max(worst, anorm > 0.0 ? r / anorm : r);
    }
    out.backward_error = worst;
    if (!(worst <= tol))
        throw NumericalError("eig: backward error " + std::to_string(worst) +
                             " exceeds tolerance " + std::to_string(tol));
    return out;
}

// LU factorization reused across right-hand sides. Construction fails on a
// matrix that is singular to working precision.
class LuSolver {
public:
    explicit LuSolver(const ComplexMatrix& a, double min_rcond = 1e-14) : lu_(a), anorm_(a.norm()) {
        linalg::require_square_finite(a, "solve");
        const double rc = lu_.rcond();
        if (!(rc > min_rcond))
            throw SingularMatrixError("solve: matrix singular to working precision",
                                      rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
        condition_ = 1.0 / rc;
    }

    template <class Rhs>
    ComplexMatrix solve(const Rhs& b) const {
        if (b.rows() != lu_.matrixLU().rows()) throw ConfigError("solve: rhs not conformable");
        return lu_.solve(b);
    }

    double condition() const noexcept { return condition_; }
    double matrix_norm() const noexcept { return anorm_; }

private:
    Eigen::PartialPivLU<ComplexMatrix> lu_;
    double anorm_;
    double condition_ = 1.0;
};

// Solves a x = b. Post: |a x - b| <= 1e-10 |a| |x| (Frobenius norms).
inline ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    LuSolver lu(a);
    ComplexMatrix x = lu.solve(b);
    const double resid = (a * x - b).norm();
    const double bound = 1e-10 * lu.matrix_norm() * x.norm();
    if (resid > bound && resid > std::numeric_limits<double>::min())
        throw SingularMatrixError("solve: residual bound violated", lu.condition());
    return x;
}

inline ComplexMatrix inverse(const ComplexMatrix& a) {
    return solve(a, ComplexMatrix::Identity(a.rows(), a.cols()));
}

}  // namespace wgqed
