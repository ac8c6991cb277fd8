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

// Word-indexed dilation tower.
//
// For every reduced word w (no two equal adjacent letters) the tower holds a
// space H_w with a representation rho_w of B, and for every letter i != s(w)
// a representation pi_{i,w} of A_i on H_w + H_{wi} built as the minimal
// Stinespring dilation of rho_w o E_i. Because E_i kills its kernel, the
// H_w -> H_w block of pi_{i,w}(a) vanishes for centered a.
//
// The tower is truncated at depth L: words of length L carry a space and a
// representation of B but no outgoing edges.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boca/expectation.hpp"

namespace boca {

/// Nonempty reduced word over the letters 0, 1, ..., |I|-1.
class Word {
public:
    Word() = default;

    explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {
        if (letters_.empty()) {
            throw ShapeError("Word", "words are nonempty");
        }
        for (std::size_t k = 0; k < letters_.size(); ++k) {
            if (letters_[k] < 0) {
                throw ShapeError("Word", "negative letter");
            }
            if (k > 0 && letters_[k] == letters_[k - 1]) {
                throw ShapeError("Word", "word is not reduced");
            }
        }
    }

    static Word letter(int i) { return Word(std::vector<int>{i}); }

    const std::vector<int>& letters() const noexcept { return letters_; }
    std::size_t size() const noexcept { return letters_.size(); }
    int last() const { return letters_.back(); }

    Word append(int i) const {
        std::vector<int> l = letters_;
        l.push_back(i);
        return Word(std::move(l));
    }

    /// The word with its last letter removed; requires size() >= 2.
    Word parent() const {
        if (letters_.size() < 2) {
            throw ShapeError("Word", "single letters have no parent word");
        }
        return Word(std::vector<int>(letters_.begin(), letters_.end() - 1));
    }

    /// Letters printed 1-based, e.g. "121"; dot-separated once a letter needs two digits.
    std::string str() const {
        bool wide = false;
        for (int l : letters_) wide = wide || l >= 9;
        std::string s;
        for (std::size_t k = 0; k < letters_.size(); ++k) {
            if (wide && k > 0) s += '.';
            s += std::to_string(letters_[k] + 1);
        }
        return s;
    }

    friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }

    /// Length-lexicographic order.
    friend bool operator<(const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.letters_ < b.letters_;
    }

private:
    std::vector<int> letters_;
};

/// All reduced words of length <= max_len over |I| = alphabet letters, in
/// length-lexicographic order.
inline std::vector<Word> reduced_words(int alphabet, int max_len) {
    if (alphabet < 1 || max_len < 1) {
        throw ShapeError("reduced_words", "need at least one letter and positive length");
    }
    std::vector<Word> out;
    std::vector<Word> level;
    for (int i = 0; i < alphabet; ++i) level.push_back(Word::letter(i));
    for (int len = 1; len <= max_len && !level.empty(); ++len) {
        out.insert(out.end(), level.begin(), level.end());
        std::vector<Word> next;
        for (const Word& w : level) {
            for (int i = 0; i < alphabet; ++i) {
                if (i != w.last()) next.push_back(w.append(i));
            }
        }
        level = std::move(next);
    }
    return out;
}

/// pi_{i,w}: the representation of A_i on H_w + H_{wi}.
struct TowerEdge {
    int algebra = 0;
    Word base;
    Index base_dim = 0;
    Index child_dim = 0;
    std::vector<CMatrix> rep;  // one (base_dim + child_dim)^2 matrix per A_i basis element
    bool user_expectation = false;
    double recursion_residual = 0.0;
    double kernel_block_residual = 0.0;
};

struct TowerSpec {
    std::vector<StarEmbedding> embeddings;  // e_i: B -> A_i, common source
    std::vector<Representation> seeds;      // rho_i on H_i
    std::vector<std::optional<ConditionalExpectation>> expectations;  // user-supplied E_j; canonical otherwise
    int depth = 1;
    Tolerances tol{};
    Index dimension_cap = 20000;
};

using BlockVector = std::map<Word, CMatrix>;

class DilationTower {
public:
    int depth() const noexcept { return depth_; }
    int alphabet() const noexcept { return static_cast<int>(embeddings_.size()); }
    const AlgebraPtr& base() const { return embeddings_.front().source; }
    const std::vector<StarEmbedding>& embeddings() const noexcept { return embeddings_; }
    const std::vector<ConditionalExpectation>& expectations() const noexcept { return expectations_; }
    const std::vector<bool>& user_expectation() const noexcept { return user_; }
    const std::vector<Word>& words() const noexcept { return words_; }

    Index dim(const Word& w) const { return rho(w).dim; }

    const Representation& rho(const Word& w) const {
        auto it = spaces_.find(w);
        if (it == spaces_.end()) {
            throw DepthError("DilationTower", "no space for word " + w.str() + " at depth " + std::to_string(depth_));
        }
        return it->second;
    }

    /// nullptr when the edge is beyond the truncation depth.
    const TowerEdge* edge(int i, const Word& w) const {
        auto it = edges_.find({i, w});
        return it == edges_.end() ? nullptr : &it->second;
    }

    const std::map<std::pair<int, Word>, TowerEdge>& edges() const noexcept { return edges_; }

    Index total_dim() const {
        Index total = 0;
        for (const auto& [w, r] : spaces_) total += r.dim;
        return total;
    }

    double max_recursion_residual() const {
        double worst = 0.0;
        for (const auto& [k, e] : edges_) worst = std::max(worst, e.recursion_residual);
        return worst;
    }

    double max_kernel_block_residual() const {
        double worst = 0.0;
        for (const auto& [k, e] : edges_) worst = std::max(worst, e.kernel_block_residual);
        return worst;
    }

    friend DilationTower build_tower(const TowerSpec& spec);

private:
    int depth_ = 0;
    std::vector<StarEmbedding> embeddings_;
    std::vector<ConditionalExpectation> expectations_;
    std::vector<bool> user_;
    std::vector<Word> words_;
    std::map<Word, Representation> spaces_;
    std::map<std::pair<int, Word>, TowerEdge> edges_;
};

namespace detail {

inline TowerEdge build_edge(int i, const Word& w, const Representation& rho_w, const StarEmbedding& emb,
                            const ConditionalExpectation& exp, const CMatrix& kernel, bool user,
                            Representation& child, const Tolerances& tol) {
    const FiniteCStarAlgebra& a = *emb.target;
    TowerEdge edge;
    edge.algebra = i;
    edge.base = w;
    edge.base_dim = rho_w.dim;
    edge.user_expectation = user;
    if (rho_w.dim == 0) {
        edge.rep.assign(static_cast<std::size_t>(a.dim()), CMatrix(0, 0));
        child = Representation{emb.source, 0, std::vector<CMatrix>(static_cast<std::size_t>(emb.source->dim()), CMatrix(0, 0))};
        return edge;
    }
    // rho_w o E_i, a UCP map of A_i into B(H_w).
    CPMap phi{emb.target, rho_w.dim, {}};
    for (Index s = 0; s < a.dim(); ++s) {
        phi.action.push_back(rho_w(exp.to_source.col(s)));
    }
    const StinespringDilation dil = stinespring_gns(phi, tol);
    const ReducingSplit split = reducing_split(dil, emb, tol);
    edge.recursion_residual = std::max(split.off_diagonal, max_difference(split.on_h, rho_w));
    const Index d = rho_w.dim;
    for (Index k = 0; k < kernel.cols(); ++k) {
        edge.kernel_block_residual = std::max(edge.kernel_block_residual, norm(dil(kernel.col(k)).topLeftCorner(d, d)));
    }
    edge.child_dim = split.complement.dim;
    edge.rep = dil.rep;
    child = split.complement;
    return edge;
}

} // namespace detail

inline DilationTower build_tower(const TowerSpec& spec) {
    const char* op = "build_tower";
    const std::size_t n = spec.embeddings.size();
    if (n == 0) {
        throw ShapeError(op, "need at least one algebra");
    }
    if (spec.seeds.size() != n) {
        throw ShapeError(op, "need one seed representation per algebra");
    }
    if (!spec.expectations.empty() && spec.expectations.size() != n) {
        throw ShapeError(op, "expectation list must be empty or have one entry per algebra");
    }
    if (spec.depth < 1) {
        throw ShapeError(op, "depth must be positive");
    }
    const AlgebraPtr& base = spec.embeddings.front().source;
    DilationTower t;
    t.depth_ = spec.depth;
    t.embeddings_ = spec.embeddings;
    for (std::size_t i = 0; i < n; ++i) {
        const StarEmbedding& e = spec.embeddings[i];
        if (e.source != base) {
            throw ShapeError(op, "embeddings do not share their source algebra");
        }
        const auto& user = spec.expectations.empty() ? std::nullopt : spec.expectations[i];
        if (user) {
            if (user->algebra != e.target || norm(user->embedding.matrix - e.matrix) > spec.tol.check_tol) {
                throw HypothesisError(op, "expectation " + std::to_string(i) + " is not onto the embedded B");
            }
            t.expectations_.push_back(*user);
        } else {
            t.expectations_.push_back(canonical_expectation(e, spec.tol));
        }
        t.user_.push_back(user.has_value());
    }
    std::vector<CMatrix> kernels;
    for (const ConditionalExpectation& e : t.expectations_) {
        kernels.push_back(expectation_kernel_coords(e, spec.tol));
    }

    Index total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Representation& seed = spec.seeds[i];
        if (seed.algebra != base) {
            throw ShapeError(op, "seed " + std::to_string(i) + " is not a representation of B");
        }
        const double res = representation_residual(seed);
        if (res > spec.tol.check_tol) {
            throw HypothesisError(op, "seed " + std::to_string(i) + " is not a representation", res);
        }
        t.spaces_.emplace(Word::letter(static_cast<int>(i)), seed);
        total += seed.dim;
    }
    t.words_ = reduced_words(static_cast<int>(n), spec.depth);
    for (const Word& w : t.words_) {
        if (static_cast<int>(w.size()) >= spec.depth) {
            break;
        }
        for (std::size_t ii = 0; ii < n; ++ii) {
            const int i = static_cast<int>(ii);
            if (i == w.last()) continue;
            Representation child;
            TowerEdge edge = detail::build_edge(i, w, t.spaces_.at(w), spec.embeddings[ii], t.expectations_[ii],
                                                kernels[ii], t.user_[ii], child, spec.tol);
            const std::string where = "edge (" + std::to_string(i + 1) + ", " + w.str() + ")";
            if (edge.recursion_residual > spec.tol.check_tol) {
                throw InternalError(op, where + " breaks pi_{i,w} o e_i = rho_w + rho_wi", edge.recursion_residual);
            }
            if (edge.kernel_block_residual > spec.tol.check_tol) {
                throw InternalError(op, where + " breaks the kernel block property", edge.kernel_block_residual);
            }
            total += child.dim;
            const Word child_word = w.append(i);
            if (total > spec.dimension_cap) {
                throw CapacityError(op, "tower dimension exceeds the cap of " + std::to_string(spec.dimension_cap) +
                                            " at word " + child_word.str());
            }
            t.spaces_.emplace(child_word, std::move(child));
            t.edges_.emplace(std::make_pair(i, w), std::move(edge));
        }
    }
    return t;
}

/// Applies pi_i(a) = sum over s(w) != i of pi_{i,w}(a) to a block vector on
/// K minus H_i. The seed block H_i is not in the domain of pi_i and is
/// dropped from the output; blocks absent from both input and output are zero.
inline BlockVector apply_pi(const DilationTower& t, int i, const CVector& a, const BlockVector& v) {
    const char* op = "apply_pi";
    if (i < 0 || i >= t.alphabet()) {
        throw ShapeError(op, "algebra index out of range");
    }
    if (a.size() != t.embeddings()[static_cast<std::size_t>(i)].target->dim()) {
        throw ShapeError(op, "element has the wrong number of coordinates");
    }
    if (v.empty()) {
        return {};
    }
    const Index cols = v.begin()->second.cols();
    std::vector<Word> bases;
    for (const auto& [u, block] : v) {
        if (block.cols() != cols) {
            throw ShapeError(op, "blocks have different column counts");
        }
        if (u.last() != i) {
            bases.push_back(u);
        } else if (u.size() >= 2) {
            bases.push_back(u.parent());
        }
    }
    std::sort(bases.begin(), bases.end());
    bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
    BlockVector out;
    for (const Word& w : bases) {
        const TowerEdge* e = t.edge(i, w);
        if (e == nullptr) {
            throw DepthError(op, "insufficient depth: letter " + std::to_string(i + 1) + " applied to block " +
                                     w.str() + " needs depth > " + std::to_string(t.depth()));
        }
        const Word child = w.append(i);
        CMatrix input = CMatrix::Zero(e->base_dim + e->child_dim, cols);
        if (auto it = v.find(w); it != v.end()) input.topRows(e->base_dim) = it->second;
        if (auto it = v.find(child); it != v.end()) input.bottomRows(e->child_dim) = it->second;
        CMatrix result = CMatrix::Zero(input.rows(), cols);
        for (Index s = 0; s < a.size(); ++s) {
            if (a(s) != Complex(0.0, 0.0)) {
                result.noalias() += a(s) * (e->rep[static_cast<std::size_t>(s)] * input);
            }
        }
        out[w] = result.topRows(e->base_dim);
        out[child] = result.bottomRows(e->child_dim);
    }
    return out;
}

} // namespace boca
