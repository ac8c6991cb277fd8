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

// Unital completely positive maps, the Gram-Choi positivity test, minimal
// Stinespring dilations built by GNS on the Gram form, and the reducing
// subspace / uniqueness-unitary machinery used when dilations are glued.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "boca/algebra.hpp"

namespace boca {

/// Linear map from `domain` into B(C^h), stored by its values on the basis.
struct CPMap {
    AlgebraPtr domain;
    Index target_dim = 0;
    std::vector<CMatrix> action;

    CMatrix operator()(const CVector& coords) const { return combine(action, coords, target_dim, target_dim); }
    const CMatrix& value(Index p) const { return action[static_cast<std::size_t>(p)]; }
};

/// Block matrix G with G[p][q] = Phi(b_p* b_q), rows indexed by p * h + row.
inline CMatrix gram_choi(const CPMap& phi) {
    const Index d = phi.domain->dim();
    const Index h = phi.target_dim;
    CMatrix g(d * h, d * h);
    for (Index p = 0; p < d; ++p) {
        for (Index q = 0; q < d; ++q) {
            g.block(p * h, q * h, h, h) = phi(phi.domain->adjoint_product(p, q));
        }
    }
    return g;
}

struct UcpResiduals {
    double unital = 0.0;
    double star = 0.0;
    double cp_min_eigenvalue = 0.0;  // most negative Gram-Choi eigenvalue (or the minimum)
    double gram_norm = 0.0;
};

inline UcpResiduals ucp_residuals(const CPMap& phi) {
    const FiniteCStarAlgebra& a = *phi.domain;
    UcpResiduals r;
    r.unital = norm(phi(a.unit_coords()) - CMatrix::Identity(phi.target_dim, phi.target_dim));
    for (Index p = 0; p < a.dim(); ++p) {
        r.star = std::max(r.star, norm(phi(a.adjoint(CVector::Unit(a.dim(), p))) - phi.value(p).adjoint()));
    }
    const CMatrix g = gram_choi(phi);
    r.gram_norm = norm(g);
    // Hermiticity of G follows from *-preservation, which was measured above.
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
    r.cp_min_eigenvalue = g.rows() > 0 ? solver.eigenvalues()(0) : 0.0;
    return r;
}

/// Validated UCP map.
inline CPMap make_ucp(AlgebraPtr domain, Index target_dim, std::vector<CMatrix> action, const Tolerances& tol = {}) {
    const char* op = "make_ucp";
    if (target_dim <= 0) {
        throw ShapeError(op, "target dimension must be positive");
    }
    if (static_cast<Index>(action.size()) != domain->dim()) {
        throw ShapeError(op, "need one value per domain basis element");
    }
    for (const CMatrix& m : action) {
        if (m.rows() != target_dim || m.cols() != target_dim || !all_finite(m)) {
            throw ShapeError(op, "value has the wrong shape or non-finite entries");
        }
    }
    CPMap phi{std::move(domain), target_dim, std::move(action)};
    const UcpResiduals r = ucp_residuals(phi);
    if (r.unital > tol.check_tol) {
        throw HypothesisError(op, "map is not unital: ||Phi(1) - I||", r.unital);
    }
    if (r.star > tol.check_tol) {
        throw HypothesisError(op, "map is not *-preserving", r.star);
    }
    if (r.cp_min_eigenvalue < -tol.check_tol * std::max(r.gram_norm, 1e-300)) {
        throw HypothesisError(op, "map is not completely positive: most negative Gram-Choi eigenvalue " +
                                      std::to_string(r.cp_min_eigenvalue),
                              -r.cp_min_eigenvalue);
    }
    return phi;
}

/// Phi o e as a map on e.source.
inline CPMap restrict_to(const CPMap& phi, const StarEmbedding& e) {
    if (phi.domain != e.target) {
        throw ShapeError("restrict_to", "embedding does not land in the map's domain");
    }
    CPMap out{e.source, phi.target_dim, {}};
    for (Index p = 0; p < e.source->dim(); ++p) {
        out.action.push_back(phi(e.matrix.col(p)));
    }
    return out;
}

inline CPMap as_cpmap(const Representation& r) { return {r.algebra, r.dim, r.images}; }

inline Representation as_representation(const CPMap& phi) { return {phi.domain, phi.target_dim, phi.action}; }

struct RepCheck {
    bool is_rep = false;
    double residual = 0.0;
};

/// Whether Phi o e is a unital *-representation of e.source.
inline RepCheck is_rep_on_B(const CPMap& phi, const StarEmbedding& e, const Tolerances& tol = {}) {
    const double res = representation_residual(as_representation(restrict_to(phi, e)));
    return {res <= tol.check_tol, res};
}

// ---------------------------------------------------------------------------
// Stinespring

/// pi on C^{h + h'} with Phi(a) the top-left h x h block of pi(a).
struct StinespringDilation {
    CPMap map;
    Index total_dim = 0;
    std::vector<CMatrix> rep;
    bool minimal = false;

    Index h() const noexcept { return map.target_dim; }
    Index complement_dim() const noexcept { return total_dim - map.target_dim; }
    CMatrix operator()(const CVector& coords) const { return combine(rep, coords, total_dim, total_dim); }
    Representation representation() const { return {map.domain, total_dim, rep}; }
};

/// Residuals of a dilation: representation property and compression identity.
inline std::pair<double, double> dilation_residuals(const StinespringDilation& d) {
    const double rep = representation_residual(d.representation());
    double compression = 0.0;
    for (Index p = 0; p < d.map.domain->dim(); ++p) {
        compression =
            std::max(compression, norm(d.rep[static_cast<std::size_t>(p)].topLeftCorner(d.h(), d.h()) - d.map.value(p)));
    }
    return {rep, compression};
}

/// Minimal Stinespring dilation of a UCP map by the GNS construction on
/// <a (x) xi, a' (x) xi'> = <xi, Phi(a* a') xi'>. The numerical kernel of
/// the Gram-Choi matrix is quotiented out, left multiplication is transported
/// through the structure constants, and the space is rotated so that the
/// classes [1 (x) xi] occupy the first h coordinates.
inline StinespringDilation stinespring_gns(const CPMap& phi, const Tolerances& tol = {}) {
    const char* op = "stinespring_gns";
    const FiniteCStarAlgebra& a = *phi.domain;
    const Index d = a.dim();
    const Index h = phi.target_dim;
    const CMatrix g = gram_choi(phi);
    const EigenDecomposition eig = eigh_hermitian(g, tol);
    const double top = eig.values.cwiseAbs().maxCoeff();
    if (eig.values(0) < -tol.check_tol * std::max(norm(g), 1e-300)) {
        throw HypothesisError(op, "Gram-Choi matrix is not positive semidefinite", -eig.values(0));
    }
    std::vector<Index> keep;
    for (Index k = 0; k < eig.values.size(); ++k) {
        if (eig.values(k) > tol.rank_tol * top) {
            keep.push_back(k);
        }
    }
    const Index r = static_cast<Index>(keep.size());
    // Rows of `to_gns` map coefficient vectors over basis (x) C^h to GNS
    // coordinates; columns of `from_gns` are representatives of the GNS basis.
    CMatrix to_gns(r, d * h);
    CMatrix from_gns(d * h, r);
    for (Index m = 0; m < r; ++m) {
        const Index k = keep[static_cast<std::size_t>(m)];
        const double lam = eig.values(k);
        to_gns.row(m) = std::sqrt(lam) * eig.vectors.col(k).adjoint();
        from_gns.col(m) = eig.vectors.col(k) / std::sqrt(lam);
    }
    const CMatrix id_h = CMatrix::Identity(h, h);
    const CMatrix home = to_gns * kron(a.unit_coords(), id_h);
    const double iso = isometry_residual(home);
    if (iso > tol.check_tol) {
        throw HypothesisError(op, "H does not embed isometrically (map not unital?)", iso);
    }
    CMatrix frame(r, r);
    frame.leftCols(h) = home;
    frame.rightCols(r - h) = complete_isometry(home, tol);
    const CMatrix to_frame = frame.adjoint() * to_gns;
    const CMatrix from_frame = from_gns * frame;

    StinespringDilation out{phi, r, {}, true};
    out.rep.reserve(static_cast<std::size_t>(d));
    for (Index s = 0; s < d; ++s) {
        out.rep.push_back(to_frame * (kron(a.left_mult(s), id_h) * from_frame));
    }
    const auto [rep_res, comp_res] = dilation_residuals(out);
    if (rep_res > tol.check_tol || comp_res > tol.check_tol) {
        throw InternalError(op, "GNS dilation failed its verification", std::max(rep_res, comp_res));
    }
    return out;
}

struct ReducingSplit {
    Representation on_h;        // rho_0 = Phi o e on H
    Representation complement;  // the restriction of pi o e to H'
    double off_diagonal = 0.0;
};

/// When Phi o e is multiplicative, H reduces pi(e(B)); splits pi o e into its
/// two diagonal blocks.
inline ReducingSplit reducing_split(const StinespringDilation& dil, const StarEmbedding& e,
                                    const Tolerances& tol = {}) {
    const char* op = "reducing_split";
    if (dil.map.domain != e.target) {
        throw ShapeError(op, "embedding does not land in the dilated algebra");
    }
    const Index h = dil.h();
    const Index c = dil.complement_dim();
    ReducingSplit out{{e.source, h, {}}, {e.source, c, {}}, 0.0};
    for (Index t = 0; t < e.source->dim(); ++t) {
        const CMatrix m = dil(e.matrix.col(t));
        out.off_diagonal = std::max(out.off_diagonal, norm(m.topRightCorner(h, c)));
        out.off_diagonal = std::max(out.off_diagonal, norm(m.bottomLeftCorner(c, h)));
        out.on_h.images.push_back(m.topLeftCorner(h, h));
        out.complement.images.push_back(m.bottomRightCorner(c, c));
    }
    if (out.off_diagonal > tol.check_tol) {
        throw HypothesisError(op, "H does not reduce pi(B): restriction to B is not multiplicative",
                              out.off_diagonal);
    }
    return out;
}

struct RestrictionDilation {
    CMatrix isometry;    // columns span M inside the dilation space; first h columns are H
    Representation rep;  // compression of pi o e to M
};

/// The minimal reducing subspace M = span pi(e(B)) H and the representation of
/// B it carries; a minimal Stinespring dilation of Phi o e.
inline RestrictionDilation minimal_b_restriction_dilation(const StinespringDilation& dil, const StarEmbedding& e,
                                                          const Tolerances& tol = {}) {
    const char* op = "minimal_b_restriction_dilation";
    if (dil.map.domain != e.target) {
        throw ShapeError(op, "embedding does not land in the dilated algebra");
    }
    const Index h = dil.h();
    const Index nb = e.source->dim();
    // Unit first, so that H comes out as the leading columns.
    CMatrix orbit(dil.total_dim, (nb + 1) * h);
    orbit.leftCols(h) = dil(e.matrix * e.source->unit_coords()).leftCols(h);
    for (Index t = 0; t < nb; ++t) {
        orbit.middleCols((t + 1) * h, h) = dil(e.matrix.col(t)).leftCols(h);
    }
    CMatrix m = orthonormal_columns(orbit, tol).q;
    const double h_res = norm(m.leftCols(h) - CMatrix::Identity(dil.total_dim, h));
    if (h_res > tol.check_tol) {
        throw InternalError(op, "H is not the leading part of M", h_res);
    }
    m.leftCols(h) = CMatrix::Identity(dil.total_dim, h);
    Representation rho{e.source, m.cols(), {}};
    for (Index t = 0; t < nb; ++t) {
        rho.images.push_back(m.adjoint() * dil(e.matrix.col(t)) * m);
    }
    const double res = representation_residual(rho);
    if (res > tol.check_tol) {
        throw InternalError(op, "compression to M is not a representation (check rank_tol)", res);
    }
    return {std::move(m), std::move(rho)};
}

/// Unitary U: M1 -> M2 with U|_H = I and U rho1(b) = rho2(b) U, for two minimal
/// dilations of the same UCP map whose first h coordinates are H. Obtained by
/// sending rho1(b) e_k to rho2(b) e_k and taking the polar part.
inline CMatrix minimal_dilation_unitary(const Representation& rho1, const Representation& rho2, Index h,
                                        const Tolerances& tol = {}) {
    const char* op = "minimal_dilation_unitary";
    if (rho1.algebra != rho2.algebra) {
        throw ShapeError(op, "representations of different algebras");
    }
    if (rho1.dim != rho2.dim) {
        throw HypothesisError(op, "dilation dimensions differ: " + std::to_string(rho1.dim) + " vs " +
                                      std::to_string(rho2.dim));
    }
    if (h > rho1.dim || h <= 0) {
        throw ShapeError(op, "common subspace dimension out of range");
    }
    const Index m = rho1.dim;
    const Index nb = rho1.algebra->dim();
    CMatrix x1(m, nb * h);
    CMatrix x2(m, nb * h);
    for (Index t = 0; t < nb; ++t) {
        x1.middleCols(t * h, h) = rho1.image(t).leftCols(h);
        x2.middleCols(t * h, h) = rho2.image(t).leftCols(h);
    }
    const double gram = norm(x1.adjoint() * x1 - x2.adjoint() * x2);
    if (gram > tol.check_tol * std::max(1.0, norm(x1.adjoint() * x1))) {
        throw HypothesisError(op, "inputs do not compress to the same map", gram);
    }
    if (orthonormal_columns(x1, tol).rank != m || orthonormal_columns(x2, tol).rank != m) {
        throw HypothesisError(op, "inputs are not minimal dilations");
    }
    const CMatrix raw = x1.transpose().colPivHouseholderQr().solve(x2.transpose()).transpose();
    const CMatrix u = polar_isometry(raw, tol);
    const double unitary = isometry_residual(u);
    const double on_h = norm(u.leftCols(h) - CMatrix::Identity(m, h));
    double intertwine = 0.0;
    for (Index t = 0; t < nb; ++t) {
        intertwine = std::max(intertwine, norm(u * rho1.image(t) - rho2.image(t) * u));
    }
    const double worst = std::max({unitary, on_h, intertwine});
    if (worst > tol.check_tol) {
        throw HypothesisError(op, "no intertwining unitary fixing H", worst);
    }
    return u;
}

} // namespace boca
