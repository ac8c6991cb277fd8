// Copyright 2026 The boca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex-matrix kernel shared by every other module: Hermitian
// eigendecomposition, rank-revealing orthonormalization, isometry completion
// and the global tolerance policy.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "boca/error.hpp"

namespace boca {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// One tolerance policy threaded through every construction, so that rank
/// decisions made in different modules agree.
struct Tolerances {
    double eig_tol = 1e-10;   // eigenvalue cutoff, relative to the largest magnitude
    double rank_tol = 1e-9;   // singular-value cutoff, relative to the largest
    double check_tol = 1e-8;  // bound on identity-verification residuals

    void validate() const {
        auto ok = [](double t) { return t > 0.0 && t < 1e-3; };
        if (!ok(eig_tol) || !ok(rank_tol) || !ok(check_tol)) {
            throw ShapeError("Tolerances", "every tolerance must lie in (0, 1e-3)");
        }
    }
};

/// Frobenius norm; used for every residual in the library.
inline double norm(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

inline bool all_finite(const CMatrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
                return false;
            }
        }
    }
    return true;
}

inline double hermitian_residual(const CMatrix& m) { return norm(m - m.adjoint()); }

/// Residual of V*V against the identity.
inline double isometry_residual(const CMatrix& v) {
    return norm(v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols()));
}

inline CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
    CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Linear combination sum_k coeffs[k] * mats[k]; `rows`/`cols` give the shape
/// when `mats` is empty.
inline CMatrix combine(const std::vector<CMatrix>& mats, const CVector& coeffs, Index rows, Index cols) {
    CMatrix out = CMatrix::Zero(rows, cols);
    for (std::size_t k = 0; k < mats.size(); ++k) {
        const Complex c = coeffs(static_cast<Index>(k));
        if (c != Complex(0.0, 0.0)) {
            out.noalias() += c * mats[k];
        }
    }
    return out;
}

struct EigenDecomposition {
    RVector values;   // ascending
    CMatrix vectors;  // unitary, columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// the solve; inputs further than check_tol * ||M|| from Hermitian are rejected.
inline EigenDecomposition eigh_hermitian(const CMatrix& m, const Tolerances& tol = {}) {
    if (m.rows() != m.cols()) {
        throw ShapeError("eigh_hermitian", "matrix is not square");
    }
    if (m.rows() == 0) {
        return {RVector(0), CMatrix(0, 0)};
    }
    const double asym = hermitian_residual(m);
    if (asym > tol.check_tol * std::max(norm(m), 1e-300)) {
        throw HypothesisError("eigh_hermitian", "input is not Hermitian", asym);
    }
    const CMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw InternalError("eigh_hermitian", "eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const CMatrix& hermitian, const Tolerances& tol = {}) {
    if (hermitian.rows() == 0) {
        return 0.0;
    }
    return eigh_hermitian(hermitian, tol).values(0);
}

namespace detail {

// Multiplies each column by a phase so that its first component of magnitude
// above 1e-10 becomes real positive.
inline void fix_column_phases(CMatrix& q) {
    for (Index j = 0; j < q.cols(); ++j) {
        for (Index i = 0; i < q.rows(); ++i) {
            const double mag = std::abs(q(i, j));
            if (mag > 1e-10) {
                q.col(j) *= std::conj(q(i, j)) / mag;
                q(i, j) = Complex(q(i, j).real(), 0.0);
                break;
            }
        }
    }
}

// Gram-Schmidt (two passes) extending the orthonormal columns of `basis` by
// the columns of `candidates`, in order. A candidate is kept when its residual
// norm exceeds `cutoff`.
inline CMatrix extend_orthonormal(const CMatrix& basis, const CMatrix& candidates, double cutoff) {
    const Index rows = basis.cols() > 0 ? basis.rows() : candidates.rows();
    CMatrix q(rows, basis.cols() + candidates.cols());
    Index count = basis.cols();
    if (count > 0) {
        q.leftCols(count) = basis;
    }
    for (Index j = 0; j < candidates.cols(); ++j) {
        CVector v = candidates.col(j);
        for (int pass = 0; pass < 2 && count > 0; ++pass) {
            v -= q.leftCols(count) * (q.leftCols(count).adjoint() * v);
        }
        const double r = v.norm();
        if (r > cutoff) {
            q.col(count++) = v / r;
        }
    }
    return q.leftCols(count);
}

inline double largest_singular_value(const CMatrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    // Square root of the top eigenvalue of the smaller Gram matrix; only the
    // largest value is needed, so squaring costs no relative accuracy.
    const CMatrix gram = m.rows() < m.cols() ? CMatrix(m * m.adjoint()) : CMatrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, solver.eigenvalues()(solver.eigenvalues().size() - 1)));
}

} // namespace detail

struct RangeBasis {
    CMatrix q;       // isometry whose range is the numerical range of the input
    Index rank = 0;
};

/// Rank-revealing orthonormal basis of range(M). Columns are processed in
/// input order; a column is dropped when its residual against the columns
/// already kept is at most rank_tol times the largest singular value of M.
/// Each output column has its first nonzero component real positive, so the
/// result is a deterministic function of the input.
inline RangeBasis orthonormal_columns(const CMatrix& m, const Tolerances& tol = {}) {
    const double smax = detail::largest_singular_value(m);
    if (smax == 0.0) {
        return {CMatrix(m.rows(), 0), 0};
    }
    CMatrix q = detail::extend_orthonormal(CMatrix(m.rows(), 0), m, tol.rank_tol * smax);
    detail::fix_column_phases(q);
    const Index r = q.cols();
    return {std::move(q), r};
}

/// Orthonormal basis W of the orthogonal complement of range(V), so that
/// [V | W] is unitary.
inline CMatrix complete_isometry(const CMatrix& v, const Tolerances& tol = {}) {
    const Index n = v.rows();
    const Index k = v.cols();
    if (k > n) {
        throw ShapeError("complete_isometry", "more columns than rows");
    }
    const double res = isometry_residual(v);
    if (res > tol.check_tol) {
        throw HypothesisError("complete_isometry", "input is not an isometry", res);
    }
    if (k == n) {
        return CMatrix(n, 0);
    }
    if (k == 0) {
        return CMatrix::Identity(n, n);
    }
    Eigen::HouseholderQR<CMatrix> qr(v);
    CMatrix full = qr.householderQ() * CMatrix::Identity(n, n);
    CMatrix w = full.rightCols(n - k);
    // One projection pass keeps W orthogonal to V at working precision.
    w -= v * (v.adjoint() * w);
    Eigen::HouseholderQR<CMatrix> qr2(w);
    w = qr2.householderQ() * CMatrix::Identity(n, n - k);
    detail::fix_column_phases(w);
    return w;
}

/// Polar part X (X*X)^{-1/2} of an injective matrix.
inline CMatrix polar_isometry(const CMatrix& x, const Tolerances& tol = {}) {
    if (x.cols() == 0) {
        return x;
    }
    const CMatrix gram = x.adjoint() * x;
    const EigenDecomposition eig = eigh_hermitian(gram, tol);
    const double top = eig.values.cwiseAbs().maxCoeff();
    if (eig.values(0) <= tol.eig_tol * top) {
        throw HypothesisError("polar_isometry", "matrix is not injective", eig.values(0));
    }
    RVector inv_sqrt = eig.values.cwiseSqrt().cwiseInverse();
    return x * (eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.adjoint());
}

} // namespace boca
