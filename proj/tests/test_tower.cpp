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

#include <algorithm>
#include <string>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace boca;
using namespace testing_support;

namespace {

std::vector<std::string> names(const std::vector<Word>& ws) {
    std::vector<std::string> out;
    for (const Word& w : ws) out.push_back(w.str());
    return out;
}

Word w(std::initializer_list<int> one_based) {
    std::vector<int> l;
    for (int x : one_based) l.push_back(x - 1);
    return Word(l);
}

} // namespace

TEST(ReducedWords, TwoLettersDepthThree) {
    EXPECT_EQ(names(reduced_words(2, 3)), (std::vector<std::string>{"1", "2", "12", "21", "121", "212"}));
}

TEST(ReducedWords, SingleLetter) { EXPECT_EQ(names(reduced_words(1, 3)), (std::vector<std::string>{"1"})); }

TEST(ReducedWords, ThreeLettersDepthTwo) {
    const std::vector<Word> ws = reduced_words(3, 2);
    EXPECT_EQ(ws.size(), 9u);
    EXPECT_TRUE(std::is_sorted(ws.begin(), ws.end()));
    for (const Word& x : ws) {
        for (std::size_t k = 1; k < x.size(); ++k) EXPECT_NE(x.letters()[k], x.letters()[k - 1]);
    }
}

TEST(ReducedWords, CountsMatchFormula) {
    for (int n = 1; n <= 4; ++n) {
        for (int len = 1; len <= 4; ++len) {
            std::size_t expected = 0;
            std::size_t level = static_cast<std::size_t>(n);
            for (int k = 1; k <= len; ++k) {
                expected += level;
                level *= static_cast<std::size_t>(n - 1);
            }
            EXPECT_EQ(reduced_words(n, len).size(), expected);
        }
    }
}

TEST(Word, RejectsUnreducedAndEmpty) {
    EXPECT_THROW(Word(std::vector<int>{0, 0}), ShapeError);
    EXPECT_THROW(Word(std::vector<int>{}), ShapeError);
    EXPECT_EQ(w({1, 2, 1}).parent(), w({1, 2}));
    EXPECT_EQ(w({1, 2}).last(), 1);
}

TEST(BuildTower, PauliStatesDimensions) {
    const Pauli p;
    const UcpExtension ext = p.extend(2);
    const DilationTower& t = ext.tower();
    // rho_w o E on M2 with one-dimensional rho_w is the tracial state; its
    // Gram form has rank 4, and H_w takes one dimension of the dilation.
    const CMatrix gram = brute_gram(matrix_units(2), 1, [](const CMatrix& x) { return CMatrix::Constant(1, 1, x.trace() / 2.0); });
    const Index expected = brute_rank(gram) - 1;
    EXPECT_EQ(expected, 3);
    EXPECT_EQ(t.dim(w({1})), 1);
    EXPECT_EQ(t.dim(w({2})), 1);
    EXPECT_EQ(t.dim(w({1, 2})), expected);
    EXPECT_EQ(t.dim(w({2, 1})), expected);
    EXPECT_EQ(t.total_dim(), 2 + 2 * expected);
}

TEST(BuildTower, DegenerateInclusionHasNoGrowth) {
    const AlgebraPtr b = make_block_algebra({1, 1});
    const StarEmbedding id = make_embedding(b, b, b->basis());
    TowerSpec spec;
    spec.embeddings = {id, id, id};
    const Representation seed = identity_representation(b, 2);
    spec.seeds = {seed, seed, seed};
    spec.depth = 3;
    const DilationTower t = build_tower(spec);
    for (const Word& x : t.words()) EXPECT_EQ(t.dim(x), x.size() == 1 ? 4 : 0);
}

TEST(BuildTower, SingleAlgebraIsJustTheSeed) {
    const Pauli p;
    for (int depth : {1, 2, 4}) {
        TowerSpec spec;
        spec.embeddings = {p.e1};
        spec.seeds = {reducing_split(stinespring_gns(p.phi1), p.e1).complement};
        spec.depth = depth;
        const DilationTower t = build_tower(spec);
        EXPECT_EQ(names(t.words()), (std::vector<std::string>{"1"}));
        EXPECT_TRUE(t.edges().empty());
        EXPECT_EQ(t.total_dim(), 1);
    }
}

TEST(BuildTower, InvariantsOnGeneratedInstances) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance inst = generated(seed);
        const UcpExtension ext = boca_extend(inst.maps, inst.embeddings, inst.expectations, 3);
        const DilationTower& t = ext.tower();
        EXPECT_LE(t.max_recursion_residual(), 1e-8);
        EXPECT_LE(t.max_kernel_block_residual(), 1e-8);
        for (const auto& [key, edge] : t.edges()) {
            const auto& [i, base] = key;
            const Representation pi{t.embeddings()[static_cast<std::size_t>(i)].target, edge.base_dim + edge.child_dim, edge.rep};
            EXPECT_LE(representation_residual(pi), 1e-8);
            const Word child = base.append(i);
            EXPECT_EQ(edge.child_dim, t.dim(child));
            for (Index q = 0; q < t.base()->dim(); ++q) {
                const CMatrix img = pi(t.embeddings()[static_cast<std::size_t>(i)].matrix.col(q));
                EXPECT_LE(norm(img - direct_sum(t.rho(base).image(q), t.rho(child).image(q))), 1e-8);
            }
            // Kernel block, recomputed from the stored edge.
            const CMatrix k = expectation_kernel_coords(t.expectations()[static_cast<std::size_t>(i)]);
            for (Index c = 0; c < k.cols(); ++c) {
                EXPECT_LE(norm(pi(k.col(c)).topLeftCorner(edge.base_dim, edge.base_dim)), 1e-8);
            }
        }
    }
}

TEST(BuildTower, Deterministic) {
    const Instance inst = generated(2);
    const UcpExtension a = boca_extend(inst.maps, inst.embeddings, inst.expectations, 3);
    const UcpExtension b = boca_extend(inst.maps, inst.embeddings, inst.expectations, 3);
    ASSERT_EQ(a.tower().edges().size(), b.tower().edges().size());
    for (const auto& [key, edge] : a.tower().edges()) {
        const TowerEdge* other = b.tower().edge(key.first, key.second);
        ASSERT_NE(other, nullptr);
        ASSERT_EQ(edge.rep.size(), other->rep.size());
        for (std::size_t p = 0; p < edge.rep.size(); ++p) EXPECT_TRUE(edge.rep[p] == other->rep[p]);
    }
    for (const Word& x : a.tower().words()) EXPECT_EQ(a.tower().dim(x), b.tower().dim(x));
}

TEST(BuildTower, CapacityNamesTheWord) {
    const Pauli p;
    TowerSpec spec;
    spec.embeddings = {p.e1, p.e2};
    spec.seeds = {reducing_split(stinespring_gns(p.phi1), p.e1).complement,
                  reducing_split(stinespring_gns(p.phi2), p.e2).complement};
    spec.depth = 3;
    spec.dimension_cap = 6;
    try {
        build_tower(spec);
        FAIL() << "cap not enforced";
    } catch (const CapacityError& e) {
        EXPECT_NE(std::string(e.what()).find("at word 21"), std::string::npos) << e.what();
    }
}

TEST(BuildTower, UserExpectationKeepsTheKernelBlock) {
    // E(x) = x_11 I is a conditional expectation of M2 onto the scalars other
    // than the trace.
    const Pauli p;
    std::vector<CMatrix> xs = matrix_units(2);
    std::vector<CMatrix> ys;
    for (const CMatrix& x : xs) ys.push_back(x(0, 0) * CMatrix::Identity(2, 2));
    const ConditionalExpectation state = make_expectation_from_pairs(p.e1, xs, ys);
    const UcpExtension ext = boca_extend({p.phi1, p.phi2}, {p.e1, p.e2}, {state, std::nullopt}, 3);
    EXPECT_TRUE(ext.tower().user_expectation()[0]);
    EXPECT_FALSE(ext.tower().user_expectation()[1]);
    EXPECT_LE(ext.tower().max_kernel_block_residual(), 1e-8);
    EXPECT_LE(norm(ext.tower().expectations()[0].matrix - state.matrix), 1e-14);
}

TEST(ApplyPi, UnitActsAsIdentity) {
    const Instance inst = generated(1);
    const UcpExtension ext = boca_extend(inst.maps, inst.embeddings, inst.expectations, 3);
    const DilationTower& t = ext.tower();
    detail::Random rng(4);
    for (int i = 0; i < t.alphabet(); ++i) {
        BlockVector v;
        for (const Word& x : t.words()) {
            if (static_cast<int>(x.size()) < t.depth() && x.last() != i && t.dim(x) > 0) {
                v[x] = rng.complex_matrix(t.dim(x), 2);
            }
        }
        const BlockVector out = apply_pi(t, i, t.embeddings()[static_cast<std::size_t>(i)].target->unit_coords(), v);
        for (const auto& [x, block] : v) {
            ASSERT_TRUE(out.count(x));
            EXPECT_LE(norm(out.at(x) - block), 1e-10);
        }
        for (const auto& [x, block] : out) {
            if (!v.count(x)) EXPECT_LE(norm(block), 1e-10);
        }
    }
}

TEST(ApplyPi, KernelLettersMoveUpOneLevel) {
    const Instance inst = generated(5);
    const UcpExtension ext = boca_extend(inst.maps, inst.embeddings, inst.expectations, 3);
    const DilationTower& t = ext.tower();
    detail::Random rng(8);
    for (const auto& [key, edge] : t.edges()) {
        const auto& [i, base] = key;
        if (edge.base_dim == 0) continue;
        const CMatrix k = expectation_kernel_coords(t.expectations()[static_cast<std::size_t>(i)]);
        for (Index c = 0; c < k.cols(); ++c) {
            BlockVector v{{base, rng.complex_matrix(edge.base_dim, 1)}};
            const BlockVector out = apply_pi(t, i, k.col(c), v);
            for (const auto& [x, block] : out) {
                if (x == base.append(i)) continue;
                EXPECT_LE(norm(block), 1e-8) << "leak into " << x.str();
            }
        }
    }
}

TEST(ApplyPi, PauliSigmaXOnTheSeed) {
    const Pauli p;
    const UcpExtension ext = p.extend(2);
    const DilationTower& t = ext.tower();
    const BlockVector v{{w({1}), CMatrix::Identity(1, 1)}};
    const BlockVector out = apply_pi(t, 1, p.a2->coords(pauli_x()), v);
    // rho_1(E_2(sigma_x)) = tr(sigma_x)/2 = 0.
    ASSERT_TRUE(out.count(w({1})));
    EXPECT_LE(norm(out.at(w({1}))), 1e-12);
    ASSERT_TRUE(out.count(w({1, 2})));
    EXPECT_NEAR(norm(out.at(w({1, 2}))), 1.0, 1e-12);  // pi(sigma_x) is unitary
    for (const auto& [x, block] : out) EXPECT_TRUE(x == w({1}) || x == w({1, 2}));
}

TEST(ApplyPi, InsufficientDepth) {
    const Pauli p;
    const UcpExtension ext = p.extend(2);
    const BlockVector v{{w({1, 2}), CMatrix::Identity(3, 1)}};
    try {
        apply_pi(ext.tower(), 0, p.a1->coords(pauli_x()), v);
        FAIL() << "missing edge not reported";
    } catch (const DepthError& e) {
        EXPECT_NE(std::string(e.what()).find("insufficient depth"), std::string::npos);
    }
}

TEST(ApplyPi, Linear) {
    const Instance inst = generated(6);
    const UcpExtension ext = boca_extend(inst.maps, inst.embeddings, inst.expectations, 3);
    const DilationTower& t = ext.tower();
    detail::Random rng(12);
    const int i = 0;
    const Index d = t.embeddings()[0].target->dim();
    const CVector a = rng.complex_matrix(d, 1).col(0);
    const CVector b = rng.complex_matrix(d, 1).col(0);
    BlockVector v;
    for (const Word& x : t.words()) {
        if (static_cast<int>(x.size()) < t.depth() && x.last() != i && t.dim(x) > 0) v[x] = rng.complex_matrix(t.dim(x), 1);
    }
    const Complex s{0.3, -1.2};
    const BlockVector lhs = apply_pi(t, i, CVector(a + s * b), v);
    const BlockVector ra = apply_pi(t, i, a, v);
    const BlockVector rb = apply_pi(t, i, b, v);
    for (const auto& [x, block] : lhs) EXPECT_LE(norm(block - ra.at(x) - s * rb.at(x)), 1e-10);
}
