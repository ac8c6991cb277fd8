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

// Conditional expectations of an algebra onto the image of an embedding.

#pragma once

#include <vector>

#include "boca/cpmap.hpp"

namespace boca {

struct ConditionalExpectation {
    AlgebraPtr algebra;      // A
    StarEmbedding embedding; // e: B -> A
    CMatrix matrix;          // E on A-coordinates, range e(B)
    CMatrix to_source;       // e^{-1} o E : A-coordinates -> B-coordinates

    CVector operator()(const CVector& a) const { return matrix * a; }
    CVector source_part(const CVector& a) const { return to_source * a; }
};

struct ExpectationResiduals {
    double idempotent = 0.0;
    double fixes_source = 0.0;
    double range = 0.0;
    double bimodule = 0.0;
    double unital = 0.0;
    double cp_min_eigenvalue = 0.0;
    double gram_norm = 0.0;
};

/// E viewed as a map of A into B(C^n) through A's ambient matrices.
inline CPMap expectation_as_cpmap(const ConditionalExpectation& e) {
    const FiniteCStarAlgebra& a = *e.algebra;
    CPMap out{e.algebra, a.ambient_dim(), {}};
    for (Index p = 0; p < a.dim(); ++p) {
        out.action.push_back(a.element(e.matrix.col(p)));
    }
    return out;
}

inline ExpectationResiduals expectation_residuals(const ConditionalExpectation& e) {
    const FiniteCStarAlgebra& a = *e.algebra;
    const CMatrix& m = e.matrix;
    const CMatrix& em = e.embedding.matrix;
    ExpectationResiduals r;
    r.idempotent = norm(m * m - m);
    r.fixes_source = norm(m * em - em);
    const CMatrix range = orthonormal_columns(em).q;
    r.range = norm(m - range * (range.adjoint() * m));
    for (Index s = 0; s < em.cols(); ++s) {
        const CMatrix left = a.left_mult(CVector(em.col(s)));
        for (Index t = 0; t < em.cols(); ++t) {
            for (Index p = 0; p < a.dim(); ++p) {
                // E(e(b_s) a_p e(b_t)) against e(b_s) E(a_p) e(b_t)
                const CVector inside = a.multiply(left * CVector::Unit(a.dim(), p), em.col(t));
                const CVector outside = a.multiply(left * m.col(p), em.col(t));
                r.bimodule = std::max(r.bimodule, norm(m * inside - outside));
            }
        }
    }
    const UcpResiduals ucp = ucp_residuals(expectation_as_cpmap(e));
    r.unital = ucp.unital;
    r.cp_min_eigenvalue = ucp.cp_min_eigenvalue;
    r.gram_norm = ucp.gram_norm;
    return r;
}

/// Validated conditional expectation from its matrix on A-coordinates.
inline ConditionalExpectation make_expectation(const StarEmbedding& e, const CMatrix& matrix,
                                               const Tolerances& tol = {}) {
    const char* op = "make_expectation";
    const Index d = e.target->dim();
    if (matrix.rows() != d || matrix.cols() != d) {
        throw ShapeError(op, "matrix has the wrong shape");
    }
    const CMatrix& em = e.matrix;
    const CMatrix left_inverse = (em.adjoint() * em).ldlt().solve(em.adjoint());
    ConditionalExpectation out{e.target, e, matrix, left_inverse * matrix};
    const ExpectationResiduals r = expectation_residuals(out);
    const double worst = std::max({r.idempotent, r.fixes_source, r.range, r.bimodule, r.unital});
    if (worst > tol.check_tol) {
        throw HypothesisError(op, "not an idempotent unital B-bimodule projection onto B", worst);
    }
    if (r.cp_min_eigenvalue < -tol.check_tol * std::max(r.gram_norm, 1e-300)) {
        throw HypothesisError(op, "not completely positive", -r.cp_min_eigenvalue);
    }
    return out;
}

/// Expectation determined by its values E(x_k) on a spanning set of A.
inline ConditionalExpectation make_expectation_from_pairs(const StarEmbedding& e, const std::vector<CMatrix>& elements,
                                                          const std::vector<CMatrix>& values,
                                                          const Tolerances& tol = {}) {
    const char* op = "make_expectation";
    const FiniteCStarAlgebra& a = *e.target;
    if (elements.size() != values.size() || elements.empty()) {
        throw ShapeError(op, "elements and values must be nonempty lists of equal length");
    }
    const Index m = static_cast<Index>(elements.size());
    CMatrix src(a.dim(), m);
    CMatrix dst(a.dim(), m);
    for (Index k = 0; k < m; ++k) {
        const CMatrix& x = elements[static_cast<std::size_t>(k)];
        const CMatrix& y = values[static_cast<std::size_t>(k)];
        if (x.rows() != a.ambient_dim() || x.cols() != a.ambient_dim() || y.rows() != a.ambient_dim() ||
            y.cols() != a.ambient_dim()) {
            throw ShapeError(op, "element or value has the wrong shape");
        }
        src.col(k) = a.coords(x);
        dst.col(k) = a.coords(y);
    }
    if (orthonormal_columns(src, tol).rank != a.dim()) {
        throw HypothesisError(op, "elements do not span the algebra");
    }
    const CMatrix matrix = src.transpose().colPivHouseholderQr().solve(dst.transpose()).transpose();
    return make_expectation(e, matrix, tol);
}

/// Trace-preserving conditional expectation: the orthogonal projection of A
/// onto e(B) in the normalized Hilbert-Schmidt inner product.
inline ConditionalExpectation canonical_expectation(const StarEmbedding& e, const Tolerances& tol = {}) {
    const CMatrix q = orthonormal_columns(e.matrix, tol).q;
    return make_expectation(e, q * q.adjoint(), tol);
}

/// Coordinates (columns) of an orthonormal basis of ker E.
inline CMatrix expectation_kernel_coords(const ConditionalExpectation& e, const Tolerances& tol = {}) {
    const Index d = e.algebra->dim();
    const CMatrix comp = CMatrix::Identity(d, d) - e.matrix;
    // comp is idempotent, so its nonzero singular values are at least 1; a
    // cutoff relative to its own norm would promote round-off when E = I.
    if (detail::largest_singular_value(comp) < 0.5) return CMatrix(d, 0);
    return orthonormal_columns(comp, tol).q;
}

/// HS-orthonormal basis of ker E as ambient matrices.
inline std::vector<CMatrix> expectation_kernel_basis(const ConditionalExpectation& e, const Tolerances& tol = {}) {
    const CMatrix k = expectation_kernel_coords(e, tol);
    std::vector<CMatrix> out;
    for (Index j = 0; j < k.cols(); ++j) {
        out.push_back(e.algebra->element(k.col(j)));
    }
    return out;
}

} // namespace boca
