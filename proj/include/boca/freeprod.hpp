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

// The *-algebraic amalgamated free product over B, as formal linear
// combinations of words whose letters are elements of the A_i.
//
// An element is a B-part (the coefficient of the empty word) plus a list of
// terms coeff * a_1 a_2 ... a_n, each a_k given by coordinates in A_{i_k}.
// Words are read left to right as the algebraic product in that order.
// Terms are representatives, not classes modulo the balanced tensor relations;
// two elements are compared by evaluating them.

#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "boca/expectation.hpp"

namespace boca {

/// The data a free product element refers to: B, the embeddings e_i, and the
/// expectation used on each A_i for normal forms.
struct FreeProductContext {
    AlgebraPtr base;
    std::vector<StarEmbedding> embeddings;
    std::vector<ConditionalExpectation> expectations;

    int size() const noexcept { return static_cast<int>(embeddings.size()); }
    const FiniteCStarAlgebra& algebra(int i) const { return *embeddings.at(static_cast<std::size_t>(i)).target; }
    const StarEmbedding& embedding(int i) const { return embeddings.at(static_cast<std::size_t>(i)); }
    const ConditionalExpectation& expectation(int i) const { return expectations.at(static_cast<std::size_t>(i)); }

    bool compatible(const FreeProductContext& other) const {
        if (base != other.base || embeddings.size() != other.embeddings.size()) return false;
        for (std::size_t i = 0; i < embeddings.size(); ++i) {
            if (embeddings[i].target != other.embeddings[i].target) return false;
        }
        return true;
    }
};

using ContextPtr = std::shared_ptr<const FreeProductContext>;

inline ContextPtr make_context(std::vector<StarEmbedding> embeddings,
                               const std::vector<std::optional<ConditionalExpectation>>& expectations = {},
                               const Tolerances& tol = {}) {
    if (embeddings.empty()) {
        throw ShapeError("make_context", "need at least one algebra");
    }
    auto ctx = std::make_shared<FreeProductContext>();
    ctx->base = embeddings.front().source;
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        if (embeddings[i].source != ctx->base) {
            throw ShapeError("make_context", "embeddings do not share their source");
        }
        if (i < expectations.size() && expectations[i]) {
            ctx->expectations.push_back(*expectations[i]);
        } else {
            ctx->expectations.push_back(canonical_expectation(embeddings[i], tol));
        }
    }
    ctx->embeddings = std::move(embeddings);
    return ctx;
}

struct FreeLetter {
    int index = 0;
    CVector coords;  // in A_index
};

using FreeWord = std::vector<FreeLetter>;

struct FreeTerm {
    Complex coeff{1.0, 0.0};
    FreeWord word;  // nonempty
};

class FreeElement {
public:
    explicit FreeElement(ContextPtr ctx) : ctx_(std::move(ctx)), b_part_(CVector::Zero(ctx_->base->dim())) {}

    FreeElement(ContextPtr ctx, CVector b_part, std::vector<FreeTerm> terms)
        : ctx_(std::move(ctx)), b_part_(std::move(b_part)), terms_(std::move(terms)) {
        if (b_part_.size() != ctx_->base->dim()) {
            throw ShapeError("FreeElement", "B-part has the wrong number of coordinates");
        }
        for (const FreeTerm& t : terms_) check_word(t.word);
    }

    static FreeElement unit(ContextPtr ctx) {
        CVector b = ctx->base->unit_coords();
        return FreeElement(std::move(ctx), std::move(b), {});
    }

    static FreeElement from_b(ContextPtr ctx, CVector b) { return FreeElement(std::move(ctx), std::move(b), {}); }

    static FreeElement from_word(ContextPtr ctx, FreeWord word, Complex coeff = 1.0) {
        const Index nb = ctx->base->dim();
        return FreeElement(std::move(ctx), CVector::Zero(nb), {FreeTerm{coeff, std::move(word)}});
    }

    static FreeElement letter(ContextPtr ctx, int index, CVector coords) {
        return from_word(std::move(ctx), FreeWord{FreeLetter{index, std::move(coords)}});
    }

    const ContextPtr& context() const noexcept { return ctx_; }
    const CVector& b_part() const noexcept { return b_part_; }
    const std::vector<FreeTerm>& terms() const noexcept { return terms_; }

    std::size_t max_length() const {
        std::size_t m = 0;
        for (const FreeTerm& t : terms_) m = std::max(m, t.word.size());
        return m;
    }

    FreeElement& operator+=(const FreeElement& other) {
        require_compatible(other, "FreeElement::operator+=");
        b_part_ += other.b_part_;
        terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
        return *this;
    }

    friend FreeElement operator+(FreeElement a, const FreeElement& b) { return a += b; }

    friend FreeElement operator*(Complex c, FreeElement x) {
        x.b_part_ *= c;
        for (FreeTerm& t : x.terms_) t.coeff *= c;
        return x;
    }

    void require_compatible(const FreeElement& other, const char* op) const {
        if (ctx_ != other.ctx_ && !ctx_->compatible(*other.ctx_)) {
            throw ShapeError(op, "elements belong to different free products");
        }
    }

private:
    void check_word(const FreeWord& w) const {
        if (w.empty()) {
            throw ShapeError("FreeElement", "terms need nonempty words; the empty word is the B-part");
        }
        for (const FreeLetter& l : w) {
            if (l.index < 0 || l.index >= ctx_->size()) {
                throw ShapeError("FreeElement", "letter index out of range");
            }
            if (l.coords.size() != ctx_->algebra(l.index).dim() || !all_finite(l.coords)) {
                throw ShapeError("FreeElement", "letter has the wrong number of coordinates");
            }
        }
    }

    ContextPtr ctx_;
    CVector b_part_;
    std::vector<FreeTerm> terms_;
};

namespace detail {

inline bool is_zero(const CVector& v) { return v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0; }

inline CVector times_b_left(const FreeProductContext& ctx, const CVector& b, const FreeLetter& l) {
    const FiniteCStarAlgebra& a = ctx.algebra(l.index);
    return a.multiply(ctx.embedding(l.index)(b), l.coords);
}

inline CVector times_b_right(const FreeProductContext& ctx, const FreeLetter& l, const CVector& b) {
    const FiniteCStarAlgebra& a = ctx.algebra(l.index);
    return a.multiply(l.coords, ctx.embedding(l.index)(b));
}

} // namespace detail

/// Product x * y. B-parts act on the adjacent letter through e_i; adjacent
/// letters from the same algebra are left unmerged.
inline FreeElement free_multiply(const FreeElement& x, const FreeElement& y) {
    x.require_compatible(y, "free_multiply");
    const FreeProductContext& ctx = *x.context();
    const FiniteCStarAlgebra& b = *ctx.base;
    std::vector<FreeTerm> terms;
    const bool xb = !detail::is_zero(x.b_part());
    const bool yb = !detail::is_zero(y.b_part());
    if (xb) {
        for (const FreeTerm& t : y.terms()) {
            FreeTerm n = t;
            n.word.front().coords = detail::times_b_left(ctx, x.b_part(), t.word.front());
            terms.push_back(std::move(n));
        }
    }
    if (yb) {
        for (const FreeTerm& s : x.terms()) {
            FreeTerm n = s;
            n.word.back().coords = detail::times_b_right(ctx, s.word.back(), y.b_part());
            terms.push_back(std::move(n));
        }
    }
    for (const FreeTerm& s : x.terms()) {
        for (const FreeTerm& t : y.terms()) {
            FreeTerm n{s.coeff * t.coeff, s.word};
            n.word.insert(n.word.end(), t.word.begin(), t.word.end());
            terms.push_back(std::move(n));
        }
    }
    return FreeElement(x.context(), b.multiply(x.b_part(), y.b_part()), std::move(terms));
}

/// Involution: reverses words, adjoints letters, conjugates coefficients.
inline FreeElement free_adjoint(const FreeElement& x) {
    const FreeProductContext& ctx = *x.context();
    std::vector<FreeTerm> terms;
    terms.reserve(x.terms().size());
    for (const FreeTerm& t : x.terms()) {
        FreeTerm n{std::conj(t.coeff), {}};
        for (auto it = t.word.rbegin(); it != t.word.rend(); ++it) {
            n.word.push_back(FreeLetter{it->index, ctx.algebra(it->index).adjoint(it->coords)});
        }
        terms.push_back(std::move(n));
    }
    return FreeElement(x.context(), ctx.base->adjoint(x.b_part()), std::move(terms));
}

/// Whether every word alternates and every letter lies in the kernel of its
/// expectation, up to check_tol.
inline bool is_normal_form(const FreeElement& x, const Tolerances& tol = {}) {
    const FreeProductContext& ctx = *x.context();
    for (const FreeTerm& t : x.terms()) {
        for (std::size_t k = 0; k < t.word.size(); ++k) {
            const FreeLetter& l = t.word[k];
            if (k > 0 && t.word[k - 1].index == l.index) return false;
            if (norm(ctx.expectation(l.index)(l.coords)) > tol.check_tol * std::max(1.0, l.coords.norm())) return false;
        }
    }
    return true;
}

/// Normal form B + sum of alternating words of centered letters, computed
/// by repeatedly (a) merging adjacent letters from the same algebra, (b)
/// splitting each letter as e(E(a)) + (a - e(E(a))), (c) expanding and moving
/// B-factors into a neighbouring letter, or into the B-part when the word
/// empties.
inline FreeElement normal_form(const FreeElement& x) {
    const char* op = "normal_form";
    const FreeProductContext& ctx = *x.context();
    const FiniteCStarAlgebra& b = *ctx.base;
    // Relative size below which a split component is treated as exactly zero.
    constexpr double negligible = 1e-13;

    CVector b_part = x.b_part();
    std::vector<FreeTerm> done;
    std::vector<FreeTerm> pending = x.terms();
    std::size_t letters = 0;
    for (const FreeTerm& t : pending) letters += t.word.size();
    const std::size_t guard = letters + 1;

    struct Item {
        bool is_b;
        int index;
        CVector coords;
    };

    std::size_t passes = 0;
    while (!pending.empty()) {
        if (++passes > guard) {
            throw InternalError(op, "normalization did not terminate");
        }
        std::vector<FreeTerm> next;
        for (const FreeTerm& term : pending) {
            // (a) merge
            FreeWord merged;
            for (const FreeLetter& l : term.word) {
                if (!merged.empty() && merged.back().index == l.index) {
                    merged.back().coords = ctx.algebra(l.index).multiply(merged.back().coords, l.coords);
                } else {
                    merged.push_back(l);
                }
            }
            // (b) split
            const std::size_t n = merged.size();
            std::vector<CVector> centered(n);
            std::vector<CVector> b_parts(n);
            std::vector<bool> has_centered(n);
            std::vector<bool> has_b(n);
            bool vanishes = false;
            for (std::size_t k = 0; k < n; ++k) {
                const ConditionalExpectation& e = ctx.expectation(merged[k].index);
                const double scale = std::max(merged[k].coords.norm(), 1e-300);
                b_parts[k] = e.source_part(merged[k].coords);
                centered[k] = merged[k].coords - ctx.embedding(merged[k].index)(b_parts[k]);
                has_b[k] = b_parts[k].norm() > negligible * scale;
                has_centered[k] = centered[k].norm() > negligible * scale;
                vanishes = vanishes || (!has_b[k] && !has_centered[k]);
            }
            if (vanishes) continue;
            // (c) expand over the 2^n choices, skipping negligible pieces
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                bool skip = false;
                std::vector<Item> items;
                for (std::size_t k = 0; k < n && !skip; ++k) {
                    const bool take_b = (mask >> k) & 1U;
                    if (take_b ? !has_b[k] : !has_centered[k]) {
                        skip = true;
                    } else if (take_b) {
                        items.push_back({true, merged[k].index, b_parts[k]});
                    } else {
                        items.push_back({false, merged[k].index, centered[k]});
                    }
                }
                if (skip) continue;
                FreeWord word;
                std::optional<CVector> carry;  // B-factor waiting for a right neighbour
                for (const Item& it : items) {
                    if (it.is_b) {
                        if (!word.empty()) {
                            word.back().coords = detail::times_b_right(ctx, word.back(), it.coords);
                        } else {
                            carry = carry ? b.multiply(*carry, it.coords) : it.coords;
                        }
                    } else {
                        FreeLetter l{it.index, it.coords};
                        if (carry) {
                            l.coords = detail::times_b_left(ctx, *carry, l);
                            carry.reset();
                        }
                        word.push_back(std::move(l));
                    }
                }
                if (word.empty()) {
                    b_part += term.coeff * (carry ? *carry : b.unit_coords());
                } else if (mask == 0) {
                    done.push_back(FreeTerm{term.coeff, std::move(word)});
                } else {
                    next.push_back(FreeTerm{term.coeff, std::move(word)});
                }
            }
        }
        pending = std::move(next);
    }
    return FreeElement(x.context(), std::move(b_part), std::move(done));
}

} // namespace boca
