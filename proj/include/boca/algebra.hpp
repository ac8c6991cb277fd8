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

// Finite-dimensional C*-algebras realized as unital *-subalgebras of M_n,
// unital *-embeddings between them, representations, and intertwiners.
//
// Every algebra carries a basis that is orthonormal for the normalized
// Hilbert-Schmidt inner product <x, y> = tr(x* y) / n. Elements are handled
// through their coordinate vectors in that basis; the first basis element is
// always the identity.

#pragma once

#include <limits>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "boca/mcore.hpp"

namespace boca {

class FiniteCStarAlgebra;
using AlgebraPtr = std::shared_ptr<const FiniteCStarAlgebra>;

class FiniteCStarAlgebra {
public:
    Index ambient_dim() const noexcept { return ambient_; }
    Index dim() const noexcept { return static_cast<Index>(basis_.size()); }
    const std::string& name() const noexcept { return name_; }
    const std::vector<CMatrix>& basis() const noexcept { return basis_; }
    const CMatrix& basis(Index p) const { return basis_[static_cast<std::size_t>(p)]; }
    const CVector& unit_coords() const noexcept { return unit_; }

    /// tr(x* y) / n on ambient matrices.
    Complex inner(const CMatrix& x, const CMatrix& y) const {
        return (x.adjoint() * y).trace() / static_cast<double>(ambient_);
    }

    /// Coordinates of the orthogonal projection of x onto the algebra.
    CVector coords(const CMatrix& x) const {
        CVector c(dim());
        for (Index p = 0; p < dim(); ++p) {
            c(p) = inner(basis(p), x);
        }
        return c;
    }

    CMatrix element(const CVector& c) const { return combine(basis_, c, ambient_, ambient_); }

    /// HS distance from x to the algebra.
    double span_residual(const CMatrix& x) const {
        return std::sqrt(std::max(0.0, inner(x - element(coords(x)), x - element(coords(x))).real()));
    }

    /// Left-multiplication matrix of basis element p: L_p(r, q) = c[p][q][r].
    const CMatrix& left_mult(Index p) const { return left_[static_cast<std::size_t>(p)]; }

    Complex structure_constant(Index p, Index q, Index r) const { return left_mult(p)(r, q); }

    CMatrix left_mult(const CVector& x) const { return combine(left_, x, dim(), dim()); }

    CVector multiply(const CVector& x, const CVector& y) const { return left_mult(x) * y; }

    /// Coordinates of x* given the coordinates of x.
    CVector adjoint(const CVector& x) const { return star_ * x.conjugate(); }

    /// Coordinates of b_p* b_q.
    const CVector& adjoint_product(Index p, Index q) const {
        return adjoint_products_[static_cast<std::size_t>(p * dim() + q)];
    }

    /// Largest residual among the algebra invariants (closure under adjoint
    /// and product, unit membership, orthonormality of the basis).
    double invariant_residual() const {
        double worst = 0.0;
        CMatrix gram(dim(), dim());
        for (Index p = 0; p < dim(); ++p) {
            worst = std::max(worst, span_residual(basis(p).adjoint()));
            for (Index q = 0; q < dim(); ++q) {
                gram(p, q) = inner(basis(p), basis(q));
                const CMatrix prod = basis(p) * basis(q);
                CMatrix expansion = CMatrix::Zero(ambient_, ambient_);
                for (Index r = 0; r < dim(); ++r) {
                    expansion += structure_constant(p, q, r) * basis(r);
                }
                worst = std::max(worst, norm(prod - expansion));
            }
        }
        worst = std::max(worst, norm(element(unit_) - CMatrix::Identity(ambient_, ambient_)));
        worst = std::max(worst, norm(gram - CMatrix::Identity(dim(), dim())));
        return worst;
    }

    struct Key {};  // restricts construction to the factories below
    FiniteCStarAlgebra(Key, std::string name, Index ambient, std::vector<CMatrix> elements)
        : name_(std::move(name)), ambient_(ambient), basis_(std::move(elements)) {
        const Index d = dim();
        left_.assign(static_cast<std::size_t>(d), CMatrix::Zero(d, d));
        for (Index p = 0; p < d; ++p) {
            for (Index q = 0; q < d; ++q) {
                left_[static_cast<std::size_t>(p)].col(q) = coords(basis(p) * basis(q));
            }
        }
        star_.resize(d, d);
        adjoint_products_.reserve(static_cast<std::size_t>(d * d));
        for (Index p = 0; p < d; ++p) {
            star_.col(p) = coords(basis(p).adjoint());
            for (Index q = 0; q < d; ++q) {
                adjoint_products_.push_back(coords(basis(p).adjoint() * basis(q)));
            }
        }
        unit_ = coords(CMatrix::Identity(ambient_, ambient_));
    }

private:
    std::string name_;
    Index ambient_ = 0;
    std::vector<CMatrix> basis_;
    std::vector<CMatrix> left_;
    CMatrix star_;
    std::vector<CVector> adjoint_products_;
    CVector unit_;
};

struct AlgebraOptions {
    Tolerances tol{};
    Index dimension_cap = 64;
    std::string name = "A";
};

namespace detail {

inline CVector vec_hs(const CMatrix& x) {
    return Eigen::Map<const CVector>(x.data(), x.size()) / std::sqrt(static_cast<double>(x.rows()));
}

inline CMatrix unvec_hs(const CVector& v, Index n) {
    return Eigen::Map<const CMatrix>(v.data(), n, n) * std::sqrt(static_cast<double>(n));
}

} // namespace detail

/// Smallest unital *-subalgebra of M_n containing the spanning set. The
/// closure is computed by adding adjoints and pairwise products of the current
/// basis and re-orthonormalizing until the dimension stabilizes.
inline AlgebraPtr make_algebra(Index ambient_dim, const std::vector<CMatrix>& spanning_set,
                               const AlgebraOptions& opts = {}) {
    const char* op = "make_algebra";
    if (ambient_dim <= 0) {
        throw ShapeError(op, "ambient dimension must be positive");
    }
    if (spanning_set.empty()) {
        throw ShapeError(op, "spanning set is empty");
    }
    const Index n = ambient_dim;
    const Index n2 = n * n;
    CMatrix candidates(n2, 1 + 2 * static_cast<Index>(spanning_set.size()));
    candidates.col(0) = detail::vec_hs(CMatrix::Identity(n, n));
    Index col = 1;
    for (const CMatrix& x : spanning_set) {
        if (x.rows() != n || x.cols() != n) {
            throw ShapeError(op, "spanning matrix has the wrong shape");
        }
        if (!all_finite(x)) {
            throw ShapeError(op, "spanning matrix has non-finite entries");
        }
        candidates.col(col++) = detail::vec_hs(x);
        candidates.col(col++) = detail::vec_hs(x.adjoint());
    }
    auto cutoff = [&](const CMatrix& c) {
        double scale = 0.0;
        for (Index j = 0; j < c.cols(); ++j) {
            scale = std::max(scale, c.col(j).norm());
        }
        return opts.tol.rank_tol * std::max(scale, 1.0);
    };
    CMatrix q = detail::extend_orthonormal(CMatrix(n2, 0), candidates, cutoff(candidates));
    detail::fix_column_phases(q);
    while (true) {
        if (q.cols() > opts.dimension_cap) {
            throw CapacityError(op, "closure exceeds the dimension cap of " + std::to_string(opts.dimension_cap));
        }
        const Index d = q.cols();
        CMatrix products(n2, d * d);
        for (Index p = 0; p < d; ++p) {
            const CMatrix bp = detail::unvec_hs(q.col(p), n);
            for (Index r = 0; r < d; ++r) {
                products.col(p * d + r) = detail::vec_hs(bp * detail::unvec_hs(q.col(r), n));
            }
        }
        CMatrix grown = detail::extend_orthonormal(q, products, cutoff(products));
        if (grown.cols() == d) {
            break;
        }
        CMatrix fresh = grown.rightCols(grown.cols() - d);
        detail::fix_column_phases(fresh);
        grown.rightCols(grown.cols() - d) = fresh;
        q = std::move(grown);
    }
    std::vector<CMatrix> basis;
    basis.reserve(static_cast<std::size_t>(q.cols()));
    for (Index p = 0; p < q.cols(); ++p) {
        basis.push_back(detail::unvec_hs(q.col(p), n));
    }
    basis[0] = CMatrix::Identity(n, n);
    auto alg = std::make_shared<const FiniteCStarAlgebra>(FiniteCStarAlgebra::Key{}, opts.name, n, std::move(basis));
    const double res = alg->invariant_residual();
    if (res > opts.tol.check_tol) {
        throw InternalError(op, "closure failed its invariant check", res);
    }
    return alg;
}

/// Block-diagonal algebra M_{k_1} + ... + M_{k_m} inside M_{k_1 + ... + k_m}.
inline AlgebraPtr make_block_algebra(const std::vector<Index>& blocks, const AlgebraOptions& opts = {}) {
    if (blocks.empty()) {
        throw ShapeError("make_block_algebra", "block list is empty");
    }
    Index n = 0;
    for (Index k : blocks) {
        if (k <= 0) {
            throw ShapeError("make_block_algebra", "block sizes must be positive");
        }
        n += k;
    }
    std::vector<CMatrix> units;
    Index offset = 0;
    for (Index k : blocks) {
        for (Index i = 0; i < k; ++i) {
            for (Index j = 0; j < k; ++j) {
                CMatrix e = CMatrix::Zero(n, n);
                e(offset + i, offset + j) = 1.0;
                units.push_back(std::move(e));
            }
        }
        offset += k;
    }
    return make_algebra(n, units, opts);
}

// ---------------------------------------------------------------------------
// *-embeddings

struct StarEmbedding {
    AlgebraPtr source;  // B
    AlgebraPtr target;  // A
    CMatrix matrix;     // target coordinates of the image of each source basis element

    CVector operator()(const CVector& b) const { return matrix * b; }
    CMatrix image(Index p) const { return target->element(matrix.col(p)); }
};

/// Worst violation of the *-homomorphism identities; `where` receives the
/// offending basis pair.
inline double embedding_residual(const StarEmbedding& e, std::pair<Index, Index>* where = nullptr,
                                 std::string* what = nullptr) {
    const FiniteCStarAlgebra& b = *e.source;
    const FiniteCStarAlgebra& a = *e.target;
    double worst = norm(e.matrix * b.unit_coords() - a.unit_coords());
    if (what) *what = "not unital";
    if (where) *where = {0, 0};
    for (Index p = 0; p < b.dim(); ++p) {
        const CVector ep = e.matrix.col(p);
        const CVector unit_p = CVector::Unit(b.dim(), p);
        const double star = norm(e.matrix * b.adjoint(unit_p) - a.adjoint(ep));
        if (star > worst) {
            worst = star;
            if (what) *what = "not *-preserving";
            if (where) *where = {p, p};
        }
        for (Index q = 0; q < b.dim(); ++q) {
            const double mult = norm(e.matrix * b.left_mult(p).col(q) - a.multiply(ep, e.matrix.col(q)));
            if (mult > worst) {
                worst = mult;
                if (what) *what = "not multiplicative";
                if (where) *where = {p, q};
            }
        }
    }
    return worst;
}

/// Validated unital *-embedding from the image of each source basis element.
inline StarEmbedding make_embedding(AlgebraPtr source, AlgebraPtr target, const std::vector<CMatrix>& images,
                                    const Tolerances& tol = {}) {
    const char* op = "make_embedding";
    if (static_cast<Index>(images.size()) != source->dim()) {
        throw ShapeError(op, "need one image per source basis element");
    }
    StarEmbedding e{source, target, CMatrix(target->dim(), source->dim())};
    for (Index p = 0; p < source->dim(); ++p) {
        const CMatrix& x = images[static_cast<std::size_t>(p)];
        if (x.rows() != target->ambient_dim() || x.cols() != target->ambient_dim()) {
            throw ShapeError(op, "image has the wrong shape");
        }
        const double out = target->span_residual(x);
        if (out > tol.check_tol) {
            throw HypothesisError(op, "image of basis element " + std::to_string(p) + " lies outside the target", out);
        }
        e.matrix.col(p) = target->coords(x);
    }
    std::pair<Index, Index> where;
    std::string what;
    const double res = embedding_residual(e, &where, &what);
    if (res > tol.check_tol) {
        throw HypothesisError(op, what + " at basis pair (" + std::to_string(where.first) + ", " +
                                      std::to_string(where.second) + ")",
                              res);
    }
    if (orthonormal_columns(e.matrix, tol).rank != source->dim()) {
        throw HypothesisError(op, "map is not injective");
    }
    return e;
}

/// Embedding determined by its values on a linearly spanning set of the source.
inline StarEmbedding make_embedding_from_pairs(AlgebraPtr source, AlgebraPtr target,
                                               const std::vector<CMatrix>& elements,
                                               const std::vector<CMatrix>& images, const Tolerances& tol = {}) {
    const char* op = "make_embedding";
    if (elements.size() != images.size() || elements.empty()) {
        throw ShapeError(op, "elements and images must be nonempty lists of equal length");
    }
    const Index m = static_cast<Index>(elements.size());
    CMatrix src(source->dim(), m);
    CMatrix dst(target->dim(), m);
    for (Index k = 0; k < m; ++k) {
        const CMatrix& x = elements[static_cast<std::size_t>(k)];
        const CMatrix& y = images[static_cast<std::size_t>(k)];
        if (x.rows() != source->ambient_dim() || x.cols() != source->ambient_dim() ||
            y.rows() != target->ambient_dim() || y.cols() != target->ambient_dim()) {
            throw ShapeError(op, "element or image has the wrong shape");
        }
        const double out = source->span_residual(x);
        if (out > tol.check_tol) {
            throw HypothesisError(op, "element " + std::to_string(k) + " lies outside the source", out);
        }
        src.col(k) = source->coords(x);
        dst.col(k) = target->coords(y);
    }
    if (orthonormal_columns(src, tol).rank != source->dim()) {
        throw HypothesisError(op, "elements do not span the source algebra");
    }
    const CMatrix map = src.transpose().colPivHouseholderQr().solve(dst.transpose()).transpose();
    const double fit = norm(map * src - dst);
    if (fit > tol.check_tol * std::max(1.0, norm(dst))) {
        throw HypothesisError(op, "values are not consistent with a linear map", fit);
    }
    std::vector<CMatrix> basis_images;
    for (Index p = 0; p < source->dim(); ++p) {
        basis_images.push_back(target->element(map.col(p)));
    }
    return make_embedding(std::move(source), std::move(target), basis_images, tol);
}

inline StarEmbedding compose(const StarEmbedding& outer, const StarEmbedding& inner) {
    if (outer.source != inner.target) {
        throw ShapeError("compose", "embeddings are not composable");
    }
    return {inner.source, outer.target, outer.matrix * inner.matrix};
}

inline StarEmbedding identity_embedding(const AlgebraPtr& a) {
    return {a, a, CMatrix::Identity(a->dim(), a->dim())};
}

// ---------------------------------------------------------------------------
// Representations

/// Linear map from an algebra into operators on C^dim, stored by its values on
/// the basis. Zero-dimensional representations are legal.
struct Representation {
    AlgebraPtr algebra;
    Index dim = 0;
    std::vector<CMatrix> images;

    CMatrix operator()(const CVector& coords) const { return combine(images, coords, dim, dim); }
    const CMatrix& image(Index p) const { return images[static_cast<std::size_t>(p)]; }
};

/// Worst violation of unitality, *-preservation and multiplicativity. Above
/// `exact_cutoff` the identities are tested on a fixed random probe block,
/// which detects any nonzero defect with probability one.
inline double representation_residual(const Representation& r, Index exact_cutoff = 64) {
    const FiniteCStarAlgebra& a = *r.algebra;
    if (r.dim == 0) {
        return 0.0;
    }
    if (r.dim <= exact_cutoff) {
        double worst = norm(r(a.unit_coords()) - CMatrix::Identity(r.dim, r.dim));
        for (Index p = 0; p < a.dim(); ++p) {
            worst = std::max(worst, norm(r(a.adjoint(CVector::Unit(a.dim(), p))) - r.image(p).adjoint()));
            for (Index q = 0; q < a.dim(); ++q) {
                worst = std::max(worst, norm(r.image(p) * r.image(q) - r(a.left_mult(p).col(q))));
            }
        }
        return worst;
    }
    std::mt19937_64 gen(0x5eed);
    const auto draw = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5; };
    CMatrix x(r.dim, 2);
    for (Index c = 0; c < x.cols(); ++c) {
        for (Index k = 0; k < r.dim; ++k) x(k, c) = Complex(draw(), draw());
        x.col(c).normalize();
    }
    std::vector<CMatrix> y;
    y.reserve(static_cast<std::size_t>(a.dim()));
    for (Index q = 0; q < a.dim(); ++q) y.push_back(r.image(q) * x);
    const auto apply = [&](const CVector& c) {
        CMatrix out = CMatrix::Zero(r.dim, x.cols());
        for (Index k = 0; k < c.size(); ++k) {
            if (c(k) != Complex(0.0)) out += c(k) * y[static_cast<std::size_t>(k)];
        }
        return out;
    };
    double worst = norm(apply(a.unit_coords()) - x);
    for (Index p = 0; p < a.dim(); ++p) {
        worst = std::max(worst, norm(apply(a.adjoint(CVector::Unit(a.dim(), p))) - r.image(p).adjoint() * x));
        for (Index q = 0; q < a.dim(); ++q) {
            worst = std::max(worst, norm(r.image(p) * y[static_cast<std::size_t>(q)] - apply(a.left_mult(p).col(q))));
        }
    }
    return worst;
}

inline Representation make_representation(AlgebraPtr algebra, Index dim, std::vector<CMatrix> images,
                                          const Tolerances& tol = {}) {
    const char* op = "make_representation";
    if (static_cast<Index>(images.size()) != algebra->dim()) {
        throw ShapeError(op, "need one image per basis element");
    }
    for (const CMatrix& m : images) {
        if (m.rows() != dim || m.cols() != dim || !all_finite(m)) {
            throw ShapeError(op, "image has the wrong shape or non-finite entries");
        }
    }
    Representation r{std::move(algebra), dim, std::move(images)};
    const double res = representation_residual(r);
    if (res > tol.check_tol) {
        throw HypothesisError(op, "map is not a unital *-representation", res);
    }
    return r;
}

/// Identity representation of A on its ambient space, amplified `multiplicity`
/// times: a -> a (x) I.
inline Representation identity_representation(const AlgebraPtr& a, Index multiplicity = 1) {
    Representation r{a, a->ambient_dim() * multiplicity, {}};
    const CMatrix id = CMatrix::Identity(multiplicity, multiplicity);
    for (const CMatrix& b : a->basis()) {
        r.images.push_back(kron(b, id));
    }
    return r;
}

/// r o e, a representation of e.source.
inline Representation pullback(const Representation& r, const StarEmbedding& e) {
    if (r.algebra != e.target) {
        throw ShapeError("pullback", "embedding does not land in the representation's algebra");
    }
    Representation out{e.source, r.dim, {}};
    for (Index p = 0; p < e.source->dim(); ++p) {
        out.images.push_back(r(e.matrix.col(p)));
    }
    return out;
}

inline double max_difference(const Representation& x, const Representation& y) {
    if (x.algebra != y.algebra || x.dim != y.dim) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t p = 0; p < x.images.size(); ++p) {
        worst = std::max(worst, norm(x.images[p] - y.images[p]));
    }
    return worst;
}

/// Basis of the intertwiner space {X : X rho(b) = pi(b) X for all b}.
inline std::vector<CMatrix> rep_intertwiners(const Representation& rho, const Representation& pi,
                                             const Tolerances& tol = {}) {
    if (rho.algebra != pi.algebra) {
        throw ShapeError("rep_intertwiners", "representations of different algebras");
    }
    const Index d1 = rho.dim;
    const Index d2 = pi.dim;
    if (d1 == 0 || d2 == 0) {
        return {};
    }
    const Index nb = rho.algebra->dim();
    const Index unknowns = d1 * d2;
    // vec(X rho - pi X) = (rho^T (x) I - I (x) pi) vec(X), column-major vec.
    CMatrix system(nb * unknowns, unknowns);
    for (Index p = 0; p < nb; ++p) {
        system.middleRows(p * unknowns, unknowns) =
            kron(rho.image(p).transpose(), CMatrix::Identity(d2, d2)) - kron(CMatrix::Identity(d1, d1), pi.image(p));
    }
    // JacobiSVD: the divide-and-conquer solver has returned spurious null vectors here.
    Eigen::JacobiSVD<CMatrix> svd(system, Eigen::ComputeFullV);
    const RVector& s = svd.singularValues();
    const double top = s.size() > 0 ? s(0) : 0.0;
    Index rank = 0;
    for (Index k = 0; k < s.size(); ++k) {
        if (s(k) > tol.rank_tol * std::max(top, 1.0)) {
            ++rank;
        }
    }
    CMatrix null = svd.matrixV().rightCols(unknowns - rank);
    if (null.cols() == 0) {
        return {};
    }
    null = orthonormal_columns(null, tol).q;
    std::vector<CMatrix> out;
    for (Index k = 0; k < null.cols(); ++k) {
        out.emplace_back(Eigen::Map<const CMatrix>(null.col(k).data(), d2, d1));
    }
    return out;
}

} // namespace boca
