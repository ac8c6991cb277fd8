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

// Extensions of UCP maps Phi_i : A_i -> B(H) to the amalgamated free
// product, realized as compressions of representations tau_i = sigma_i + pi_i
// on H + K, where sigma_i is the minimal Stinespring dilation of Phi_i and
// pi_i comes from the dilation tower.
//
// Word convention: a word [x_1, ..., x_n] is the product x_1 x_2 ... x_n, so
// the rightmost letter acts first: Phi(x_1 ... x_n) = P_H tau(x_1) ... tau(x_n)|_H.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "boca/freeprod.hpp"
#include "boca/tower.hpp"

namespace boca {

/// A block vector on H + K: `home` holds the H coordinates, `blocks` the
/// H_w coordinates. All parts share the same column count.
struct TowerState {
    CMatrix home;
    BlockVector blocks;
};

namespace detail {

// tau_i(a) = dilation_i(a) on H + H_i, and pi_i(a) on the rest of K.
inline TowerState apply_tau(const DilationTower& tower, const StinespringDilation& dilation, int i, const CVector& a,
                            const TowerState& v) {
    const Index inner = dilation.h();
    const Index seed = dilation.complement_dim();
    const Index cols = v.home.cols();
    const Word own = Word::letter(i);
    CMatrix local(inner + seed, cols);
    local.topRows(inner) = v.home;
    if (auto it = v.blocks.find(own); it != v.blocks.end()) {
        local.bottomRows(seed) = it->second;
    } else {
        local.bottomRows(seed).setZero();
    }
    BlockVector rest;
    for (const auto& [w, block] : v.blocks) {
        if (!(w == own)) rest.emplace(w, block);
    }
    TowerState out;
    out.home = CMatrix::Zero(inner, cols);
    CMatrix mixed = CMatrix::Zero(inner + seed, cols);
    for (Index s = 0; s < a.size(); ++s) {
        if (a(s) != Complex(0.0, 0.0)) {
            mixed.noalias() += a(s) * (dilation.rep[static_cast<std::size_t>(s)] * local);
        }
    }
    out.home = mixed.topRows(inner);
    out.blocks = apply_pi(tower, i, a, rest);
    out.blocks[own] = mixed.bottomRows(seed);
    return out;
}

inline std::string describe(const FreeWord& w) {
    std::string s = "[";
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k > 0) s += ' ';
        s += "A" + std::to_string(w[k].index + 1);
    }
    return s + "]";
}

} // namespace detail

/// A UCP map on the free product, stored through its dilation data.
class UcpExtension {
public:
    const ContextPtr& context() const noexcept { return ctx_; }
    const DilationTower& tower() const noexcept { return tower_; }
    const std::vector<CPMap>& maps() const noexcept { return maps_; }
    const std::vector<StinespringDilation>& seeds() const noexcept { return seeds_; }
    const Representation& rho0() const noexcept { return rho0_; }
    int depth() const noexcept { return tower_.depth(); }
    int size() const noexcept { return static_cast<int>(maps_.size()); }
    Index h() const noexcept { return h_; }
    Index inner_dim() const noexcept { return rho0_.dim; }
    bool linear_path() const noexcept { return linear_; }
    /// U_i and the M_i isometries of the linear-agreement construction (empty otherwise).
    const std::vector<CMatrix>& unitaries() const noexcept { return unitaries_; }
    const std::vector<Index>& reducing_dims() const noexcept { return reducing_dims_; }
    double restriction_residual() const noexcept { return restriction_residual_; }

    /// tau_i(a) applied to a block vector.
    TowerState apply_tau(int i, const CVector& a, const TowerState& v) const {
        if (i < 0 || i >= size()) {
            throw ShapeError("apply_tau", "algebra index out of range");
        }
        return detail::apply_tau(tower_, seeds_[static_cast<std::size_t>(i)], i, a, v);
    }

    friend UcpExtension boca_extend(const std::vector<CPMap>&, const std::vector<StarEmbedding>&,
                                    const std::vector<std::optional<ConditionalExpectation>>&, int,
                                    const Tolerances&, Index);
    friend UcpExtension boca_extend_linear(const std::vector<CPMap>&, const std::vector<StarEmbedding>&, int,
                                           const Tolerances&, Index);

private:
    ContextPtr ctx_;
    std::vector<CPMap> maps_;
    std::vector<StinespringDilation> seeds_;
    Representation rho0_;
    DilationTower tower_;
    Index h_ = 0;
    bool linear_ = false;
    std::vector<CMatrix> unitaries_;
    std::vector<Index> reducing_dims_;
    double restriction_residual_ = 0.0;
    Tolerances tol_{};
};

struct EvalReport {
    CMatrix value;
    int depth_used = 0;
    std::size_t blocks_touched = 0;
    double max_leak = 0.0;  // largest norm left outside H before compression
};

/// Phi(x) = compression to H of tau applied letter by letter, plus rho_0 on the B-part.
inline EvalReport evaluate_phi(const UcpExtension& ext, const FreeElement& x) {
    const char* op = "evaluate_phi";
    if (!ext.context()->compatible(*x.context())) {
        throw ShapeError(op, "element belongs to a different free product");
    }
    const Index h = ext.h();
    const Index inner = ext.inner_dim();
    EvalReport rep;
    rep.value = ext.rho0()(x.b_part()).topLeftCorner(h, h);
    std::set<Word> touched;
    for (const FreeTerm& t : x.terms()) {
        if (static_cast<int>(t.word.size()) > ext.depth()) {
            throw DepthError(op, "insufficient depth for word " + detail::describe(t.word) + " of length " +
                                     std::to_string(t.word.size()) + " (depth " + std::to_string(ext.depth()) + ")");
        }
        rep.depth_used = std::max(rep.depth_used, static_cast<int>(t.word.size()));
        TowerState v{CMatrix::Identity(inner, h), {}};
        for (auto it = t.word.rbegin(); it != t.word.rend(); ++it) {
            v = ext.apply_tau(it->index, it->coords, v);
        }
        for (const auto& [w, block] : v.blocks) {
            touched.insert(w);
            rep.max_leak = std::max(rep.max_leak, norm(block));
        }
        rep.max_leak = std::max(rep.max_leak, norm(v.home.bottomRows(inner - h)));
        rep.value += t.coeff * v.home.topRows(h);
    }
    rep.blocks_touched = touched.size();
    return rep;
}

namespace detail {

inline void validate_family(const char* op, const std::vector<CPMap>& maps, const std::vector<StarEmbedding>& emb,
                            const Tolerances& tol) {
    if (maps.empty() || maps.size() != emb.size()) {
        throw ShapeError(op, "need one map and one embedding per algebra");
    }
    for (std::size_t i = 0; i < maps.size(); ++i) {
        if (maps[i].domain != emb[i].target) {
            throw ShapeError(op, "map " + std::to_string(i + 1) + " is not defined on the target of its embedding");
        }
        if (emb[i].source != emb.front().source) {
            throw ShapeError(op, "embeddings do not share their source");
        }
        if (maps[i].target_dim != maps.front().target_dim) {
            throw ShapeError(op, "maps have different target dimensions");
        }
        make_ucp(maps[i].domain, maps[i].target_dim, maps[i].action, tol);
    }
    const CPMap first = restrict_to(maps.front(), emb.front());
    for (std::size_t i = 1; i < maps.size(); ++i) {
        const CPMap other = restrict_to(maps[i], emb[i]);
        double diff = 0.0;
        for (std::size_t p = 0; p < first.action.size(); ++p) {
            diff = std::max(diff, norm(first.action[p] - other.action[p]));
        }
        if (diff > tol.check_tol) {
            throw HypothesisError(op, "restrictions to B of maps 1 and " + std::to_string(i + 1) + " differ", diff);
        }
    }
}

} // namespace detail

/// Extension of UCP maps restricting to a common *-representation of B.
/// `expectations` may be empty or hold one optional entry per algebra; the
/// canonical trace-preserving expectation is used wherever none is given.
inline UcpExtension boca_extend(const std::vector<CPMap>& maps, const std::vector<StarEmbedding>& embeddings,
                                const std::vector<std::optional<ConditionalExpectation>>& expectations, int depth,
                                const Tolerances& tol = {}, Index dimension_cap = 20000) {
    const char* op = "boca_extend";
    detail::validate_family(op, maps, embeddings, tol);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const RepCheck rc = is_rep_on_B(maps[i], embeddings[i], tol);
        if (!rc.is_rep) {
            throw HypothesisError(op, "multiplicativity fails: restriction of map " + std::to_string(i + 1) +
                                          " to B is not a *-representation",
                                  rc.residual);
        }
    }
    UcpExtension ext;
    ext.tol_ = tol;
    ext.maps_ = maps;
    ext.h_ = maps.front().target_dim;
    TowerSpec spec;
    spec.embeddings = embeddings;
    spec.expectations = expectations;
    spec.depth = depth;
    spec.tol = tol;
    spec.dimension_cap = dimension_cap;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        StinespringDilation dil = stinespring_gns(maps[i], tol);
        ReducingSplit split = reducing_split(dil, embeddings[i], tol);
        if (i == 0) ext.rho0_ = split.on_h;
        spec.seeds.push_back(std::move(split.complement));
        ext.seeds_.push_back(std::move(dil));
    }
    ext.tower_ = build_tower(spec);
    std::vector<std::optional<ConditionalExpectation>> used;
    for (const ConditionalExpectation& e : ext.tower_.expectations()) used.emplace_back(e);
    ext.ctx_ = make_context(embeddings, used, tol);
    for (int i = 0; i < ext.size(); ++i) {
        const CPMap& phi = maps[static_cast<std::size_t>(i)];
        for (Index p = 0; p < phi.domain->dim(); ++p) {
            const FreeElement letter = FreeElement::letter(ext.ctx_, i, CVector::Unit(phi.domain->dim(), p));
            ext.restriction_residual_ =
                std::max(ext.restriction_residual_, norm(evaluate_phi(ext, letter).value - phi.value(p)));
        }
    }
    if (ext.restriction_residual_ > tol.check_tol) {
        throw InternalError(op, "extension does not restrict to the given maps", ext.restriction_residual_);
    }
    return ext;
}

/// Extension of UCP maps whose restrictions to B agree only as linear maps.
/// Each Phi_i is replaced by Psi_i = U_i* P_{M_i} sigma_i(.) U_i on the common
/// minimal dilation space M_1 of Phi o e, whose restriction to B is a
/// representation; the result is the compression to H of the extension of the Psi_i.
inline UcpExtension boca_extend_linear(const std::vector<CPMap>& maps, const std::vector<StarEmbedding>& embeddings,
                                       int depth, const Tolerances& tol = {}, Index dimension_cap = 20000) {
    const char* op = "boca_extend_linear";
    detail::validate_family(op, maps, embeddings, tol);
    const Index h = maps.front().target_dim;
    std::vector<StinespringDilation> sigma;
    std::vector<RestrictionDilation> reducing;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        sigma.push_back(stinespring_gns(maps[i], tol));
        reducing.push_back(minimal_b_restriction_dilation(sigma.back(), embeddings[i], tol));
    }
    std::vector<CMatrix> unitaries;
    std::vector<CPMap> psi;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        CMatrix u = minimal_dilation_unitary(reducing.front().rep, reducing[i].rep, h, tol);
        const CMatrix frame = reducing[i].isometry * u;
        std::vector<CMatrix> action;
        for (const CMatrix& s : sigma[i].rep) action.push_back(frame.adjoint() * s * frame);
        psi.push_back(make_ucp(maps[i].domain, frame.cols(), std::move(action), tol));
        unitaries.push_back(std::move(u));
    }
    UcpExtension ext = boca_extend(psi, embeddings, {}, depth, tol, dimension_cap);
    ext.maps_ = maps;
    ext.h_ = h;
    ext.linear_ = true;
    ext.unitaries_ = std::move(unitaries);
    for (const RestrictionDilation& r : reducing) ext.reducing_dims_.push_back(r.rep.dim);
    ext.restriction_residual_ = 0.0;
    for (int i = 0; i < ext.size(); ++i) {
        const CPMap& phi = maps[static_cast<std::size_t>(i)];
        for (Index p = 0; p < phi.domain->dim(); ++p) {
            const FreeElement letter = FreeElement::letter(ext.ctx_, i, CVector::Unit(phi.domain->dim(), p));
            ext.restriction_residual_ =
                std::max(ext.restriction_residual_, norm(evaluate_phi(ext, letter).value - phi.value(p)));
        }
    }
    if (ext.restriction_residual_ > tol.check_tol) {
        throw InternalError(op, "compressed extension does not restrict to the given maps", ext.restriction_residual_);
    }
    return ext;
}

/// || Phi(a_1 ... a_n) - Phi_{j_1}(a_1) ... Phi_{j_n}(a_n) || for an alternating
/// word of centered letters.
inline double verify_product_formula(const UcpExtension& ext, const FreeWord& word, const Tolerances& tol = {}) {
    const char* op = "verify_product_formula";
    if (ext.linear_path()) {
        throw HypothesisError(op, "the product formula needs maps restricting to a common *-representation");
    }
    if (word.empty()) {
        throw ShapeError(op, "word is empty");
    }
    const FreeProductContext& ctx = *ext.context();
    CMatrix product = CMatrix::Identity(ext.h(), ext.h());
    for (std::size_t k = 0; k < word.size(); ++k) {
        const FreeLetter& l = word[k];
        if (l.index < 0 || l.index >= ctx.size()) {
            throw ShapeError(op, "letter index out of range");
        }
        if (k > 0 && word[k - 1].index == l.index) {
            throw HypothesisError(op, "word " + detail::describe(word) + " does not alternate");
        }
        const double off = norm(ctx.expectation(l.index)(l.coords));
        if (off > tol.check_tol * std::max(1.0, l.coords.norm())) {
            throw HypothesisError(op, "letter " + std::to_string(k + 1) + " is not in the kernel of E_" +
                                          std::to_string(l.index + 1),
                                  off);
        }
        product = product * ext.maps()[static_cast<std::size_t>(l.index)](l.coords);
    }
    const FreeElement x = FreeElement::from_word(ext.context(), word);
    return norm(evaluate_phi(ext, x).value - product);
}

struct GramWitness {
    double min_eigenvalue = 0.0;
    double hermiticity_residual = 0.0;
    Index size = 0;
};

/// Minimum eigenvalue of [Phi(w_p* w_q)]_{p,q}; nonnegative when Phi is CP.
inline GramWitness ucp_gram_check(const UcpExtension& ext, const std::vector<FreeElement>& words) {
    const Index h = ext.h();
    const Index n = static_cast<Index>(words.size());
    CMatrix g(n * h, n * h);
    std::vector<FreeElement> adjoints;
    for (const FreeElement& w : words) adjoints.push_back(free_adjoint(w));
    for (Index p = 0; p < n; ++p) {
        for (Index q = 0; q < n; ++q) {
            const FreeElement prod =
                free_multiply(adjoints[static_cast<std::size_t>(p)], words[static_cast<std::size_t>(q)]);
            g.block(p * h, q * h, h, h) = evaluate_phi(ext, prod).value;
        }
    }
    GramWitness out;
    out.size = n * h;
    out.hermiticity_residual = hermitian_residual(g);
    if (n == 0) return out;
    // Symmetrized; the asymmetry is reported rather than rejected.
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
    out.min_eigenvalue = solver.eigenvalues()(0);
    return out;
}

// ---------------------------------------------------------------------------
// Extending a family of representations from subalgebras C_i to A_i.

class RepresentationFamily {
public:
    Index h() const noexcept { return h_; }
    const DilationTower& tower() const noexcept { return tower_; }
    const std::vector<StinespringDilation>& extended() const noexcept { return extended_; }
    const std::vector<StarEmbedding>& composite_embeddings() const noexcept { return composite_; }
    const std::vector<StarEmbedding>& inclusions() const noexcept { return inclusions_; }
    const std::vector<Representation>& sigma() const noexcept { return sigma_; }
    double agreement_residual() const noexcept { return agreement_; }
    double compression_residual() const noexcept { return compression_; }

    TowerState apply_tau(int i, const CVector& a, const TowerState& v) const {
        return detail::apply_tau(tower_, extended_.at(static_cast<std::size_t>(i)), i, a, v);
    }

    friend RepresentationFamily extend_representations(const std::vector<Representation>&,
                                                       const std::vector<StarEmbedding>&,
                                                       const std::vector<StarEmbedding>&, int, const Tolerances&);

private:
    Index h_ = 0;
    std::vector<Representation> sigma_;
    std::vector<StarEmbedding> inclusions_;
    std::vector<StarEmbedding> composite_;
    std::vector<StinespringDilation> extended_;
    DilationTower tower_;
    double agreement_ = 0.0;
    double compression_ = 0.0;
};

namespace detail {

// Deviation of tau_i(e(b)) from the block-diagonal operator with the given
// blocks on H and on every word block it can act on at this depth.
inline double block_diagonal_deviation(const RepresentationFamily& f, int i, const CVector& a,
                                       const CMatrix& on_h, const DilationTower& t, const CVector& b) {
    const Index h = f.h();
    double worst = 0.0;
    auto compare = [&](const TowerState& out, const std::optional<Word>& where, const CMatrix& expected) {
        double dev = 0.0;
        dev = std::max(dev, where ? norm(out.home) : norm(out.home - expected));
        for (const auto& [w, block] : out.blocks) {
            dev = std::max(dev, (where && *where == w) ? norm(block - expected) : norm(block));
        }
        return dev;
    };
    {
        TowerState v{CMatrix::Identity(h, h), {}};
        worst = std::max(worst, compare(f.apply_tau(i, a, v), std::nullopt, on_h));
    }
    for (const Word& u : t.words()) {
        const bool reachable = static_cast<int>(u.size()) < t.depth() || u.last() == i;
        if (!reachable) continue;
        const Index d = t.dim(u);
        TowerState v{CMatrix::Zero(h, d), {}};
        v.blocks[u] = CMatrix::Identity(d, d);
        worst = std::max(worst, compare(f.apply_tau(i, a, v), u, t.rho(u)(b)));
    }
    return worst;
}

} // namespace detail

/// Given representations sigma_i of C_i on a common H agreeing on B, builds
/// representations tau_i of A_i on H + K that agree on B and restrict on H to
/// the sigma_i. sigma_i is first extended to the UCP map sigma_i o E (E the
/// canonical expectation of A_i onto C_i) and dilated.
inline RepresentationFamily extend_representations(const std::vector<Representation>& sigma,
                                                   const std::vector<StarEmbedding>& inclusions,
                                                   const std::vector<StarEmbedding>& embeddings, int depth,
                                                   const Tolerances& tol = {}) {
    const char* op = "extend_representations";
    const std::size_t n = sigma.size();
    if (n == 0 || inclusions.size() != n || embeddings.size() != n) {
        throw ShapeError(op, "need one representation, inclusion and embedding per algebra");
    }
    RepresentationFamily f;
    f.h_ = sigma.front().dim;
    TowerSpec spec;
    spec.depth = depth;
    spec.tol = tol;
    for (std::size_t i = 0; i < n; ++i) {
        if (sigma[i].algebra != inclusions[i].source || embeddings[i].target != inclusions[i].source) {
            throw ShapeError(op, "representation, inclusion and embedding " + std::to_string(i + 1) + " do not match");
        }
        if (sigma[i].dim != f.h_) {
            throw ShapeError(op, "representations act on different spaces");
        }
        const double res = representation_residual(sigma[i]);
        if (res > tol.check_tol) {
            throw HypothesisError(op, "sigma_" + std::to_string(i + 1) + " is not multiplicative", res);
        }
        const double diff = max_difference(pullback(sigma[i], embeddings[i]), pullback(sigma.front(), embeddings.front()));
        if (diff > tol.check_tol) {
            throw HypothesisError(op, "sigma_1 and sigma_" + std::to_string(i + 1) + " disagree on B", diff);
        }
        const ConditionalExpectation onto_c = canonical_expectation(inclusions[i], tol);
        CPMap lifted{inclusions[i].target, f.h_, {}};
        for (Index s = 0; s < inclusions[i].target->dim(); ++s) {
            lifted.action.push_back(sigma[i](onto_c.to_source.col(s)));
        }
        StinespringDilation dil = stinespring_gns(lifted, tol);
        StarEmbedding composite = compose(inclusions[i], embeddings[i]);
        ReducingSplit split = reducing_split(dil, composite, tol);
        spec.embeddings.push_back(composite);
        spec.seeds.push_back(std::move(split.complement));
        f.extended_.push_back(std::move(dil));
        f.composite_.push_back(std::move(composite));
    }
    f.sigma_ = sigma;
    f.inclusions_ = inclusions;
    f.tower_ = build_tower(spec);

    const AlgebraPtr& base = spec.embeddings.front().source;
    const Representation shared_h = pullback(sigma.front(), embeddings.front());
    for (std::size_t i = 0; i < n; ++i) {
        const int ii = static_cast<int>(i);
        for (Index t = 0; t < base->dim(); ++t) {
            const CVector b = CVector::Unit(base->dim(), t);
            f.agreement_ = std::max(f.agreement_, detail::block_diagonal_deviation(
                                                      f, ii, f.composite_[i](b), shared_h.image(t), f.tower_, b));
        }
        const FiniteCStarAlgebra& c = *inclusions[i].source;
        const Index seed = f.extended_[i].complement_dim();
        for (Index p = 0; p < c.dim(); ++p) {
            const CVector a = inclusions[i](CVector::Unit(c.dim(), p));
            const TowerState from_h = f.apply_tau(ii, a, TowerState{CMatrix::Identity(f.h_, f.h_), {}});
            double dev = norm(from_h.home - sigma[i].image(p));
            dev = std::max(dev, norm(from_h.blocks.at(Word::letter(ii))));
            TowerState seed_in{CMatrix::Zero(f.h_, seed), {}};
            seed_in.blocks[Word::letter(ii)] = CMatrix::Identity(seed, seed);
            dev = std::max(dev, norm(f.apply_tau(ii, a, seed_in).home));
            f.compression_ = std::max(f.compression_, dev);
        }
    }
    if (f.agreement_ > tol.check_tol || f.compression_ > tol.check_tol) {
        throw InternalError(op, "extended family fails its verification", std::max(f.agreement_, f.compression_));
    }
    return f;
}

} // namespace boca
