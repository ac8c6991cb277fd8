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

#include <gtest/gtest.h>

#include "support.hpp"

using namespace boca;
using namespace testing_support;

namespace {

AlgebraPtr d2() { return make_block_algebra({1, 1}); }

StarEmbedding d2_inclusion(const AlgebraPtr& b, const AlgebraPtr& a) {
    return make_embedding_from_pairs(b, a, {unit_matrix(2, 0, 0), unit_matrix(2, 1, 1)},
                                     {unit_matrix(2, 0, 0), unit_matrix(2, 1, 1)});
}

Representation character(const AlgebraPtr& b, int which) {
    std::vector<CMatrix> images;
    for (const CMatrix& x : b->basis()) images.push_back(x.block(which, which, 1, 1));
    return make_representation(b, 1, images);
}

} // namespace

TEST(MakeAlgebra, ScalarsInM2) {
    const AlgebraPtr a = make_algebra(2, {CMatrix::Identity(2, 2)});
    EXPECT_EQ(a->dim(), 1);
    EXPECT_LT(norm(a->basis(0) - CMatrix::Identity(2, 2)), 1e-15);
}

TEST(MakeAlgebra, ClosureOfE11E12IsM2) {
    const AlgebraPtr a = make_algebra(2, {unit_matrix(2, 0, 0), unit_matrix(2, 0, 1)});
    // Brute-force closure: words of length <= 3 in the generators and their adjoints.
    std::vector<CMatrix> gens{unit_matrix(2, 0, 0), unit_matrix(2, 0, 1), unit_matrix(2, 1, 0)};
    std::vector<CMatrix> words{CMatrix::Identity(2, 2)};
    for (int len = 0; len < 3; ++len) {
        const std::size_t n = words.size();
        for (std::size_t k = 0; k < n; ++k) {
            for (const CMatrix& g : gens) words.push_back(words[k] * g);
        }
    }
    CMatrix stacked(4, static_cast<Index>(words.size()));
    for (std::size_t k = 0; k < words.size(); ++k) {
        stacked.col(static_cast<Index>(k)) = Eigen::Map<const CVector>(words[k].data(), 4);
    }
    EXPECT_EQ(a->dim(), brute_rank(stacked));
    EXPECT_EQ(a->dim(), 4);
}

TEST(MakeAlgebra, DiagonalAlgebra) {
    const AlgebraPtr a = make_algebra(2, {unit_matrix(2, 0, 0), unit_matrix(2, 1, 1)});
    EXPECT_EQ(a->dim(), 2);
    for (const CMatrix& b : a->basis()) {
        EXPECT_LT(std::abs(b(0, 1)) + std::abs(b(1, 0)), 1e-15);
    }
    EXPECT_LT(norm(a->basis(0) - CMatrix::Identity(2, 2)), 1e-15);
}

TEST(MakeAlgebra, DimensionCap) {
    AlgebraOptions opts;
    opts.dimension_cap = 3;
    EXPECT_THROW(make_algebra(2, {unit_matrix(2, 0, 1)}, opts), CapacityError);
    EXPECT_THROW(make_algebra(2, {}), ShapeError);
    EXPECT_THROW(make_algebra(2, {CMatrix::Identity(3, 3)}), ShapeError);
}

TEST(MakeAlgebra, BlockShorthand) {
    const AlgebraPtr a = make_block_algebra({2, 1});
    EXPECT_EQ(a->ambient_dim(), 3);
    EXPECT_EQ(a->dim(), 5);
    EXPECT_LT(a->span_residual(unit_matrix(3, 0, 1)), 1e-14);
    EXPECT_GT(a->span_residual(unit_matrix(3, 0, 2)), 0.1);
}

TEST(MakeAlgebra, InvariantsOnRandomAlgebras) {
    detail::Random rng(17);
    const std::vector<std::vector<Index>> types{{1}, {2}, {1, 1}, {2, 1}, {1, 1, 1}, {3}, {2, 2}, {1, 2, 1}};
    for (const auto& t : types) {
        const AlgebraPtr a = random_block_algebra(rng, t);
        Index expected = 0;
        for (Index k : t) expected += k * k;
        EXPECT_EQ(a->dim(), expected);
        EXPECT_LE(a->invariant_residual(), 1e-8);
        for (Index p = 0; p < a->dim(); ++p) {
            for (Index q = 0; q < a->dim(); ++q) {
                CMatrix expansion = CMatrix::Zero(a->ambient_dim(), a->ambient_dim());
                for (Index r = 0; r < a->dim(); ++r) expansion += a->structure_constant(p, q, r) * a->basis(r);
                EXPECT_LE(norm(a->basis(p) * a->basis(q) - expansion), 1e-8);
            }
        }
    }
}

TEST(MakeEmbedding, ScalarsIntoM2) {
    const StarEmbedding e = make_embedding(scalars(), m2(), {CMatrix::Identity(2, 2)});
    EXPECT_LE(embedding_residual(e), 1e-14);
}

TEST(MakeEmbedding, DiagonalInclusion) {
    const AlgebraPtr b = d2();
    const AlgebraPtr a = m2();
    const StarEmbedding e = make_embedding(b, a, b->basis());
    EXPECT_LE(embedding_residual(e), 1e-14);
    EXPECT_LE(embedding_residual(d2_inclusion(b, a)), 1e-14);
}

TEST(MakeEmbedding, RejectsNonSelfAdjointImage) {
    const AlgebraPtr b = d2();
    const AlgebraPtr a = m2();
    EXPECT_THROW(make_embedding_from_pairs(b, a, {unit_matrix(2, 0, 0), unit_matrix(2, 1, 1)},
                                           {unit_matrix(2, 0, 1), CMatrix(CMatrix::Identity(2, 2) - unit_matrix(2, 0, 1))}),
                 HypothesisError);
}

TEST(MakeEmbedding, RejectsNonUnitalAndNonMultiplicative) {
    const AlgebraPtr b = d2();
    const AlgebraPtr a = m2();
    // E11 -> E11, E22 -> 0: multiplicative but not unital.
    EXPECT_THROW(make_embedding_from_pairs(b, a, {unit_matrix(2, 0, 0), unit_matrix(2, 1, 1)},
                                           {unit_matrix(2, 0, 0), CMatrix::Zero(2, 2)}),
                 HypothesisError);
    // E11 -> I/2: unital, self-adjoint, not multiplicative.
    EXPECT_THROW(make_embedding_from_pairs(b, a, {unit_matrix(2, 0, 0), unit_matrix(2, 1, 1)},
                                           {CMatrix(0.5 * CMatrix::Identity(2, 2)), CMatrix(0.5 * CMatrix::Identity(2, 2))}),
                 HypothesisError);
    // Image outside the target.
    EXPECT_THROW(make_embedding(b, b, {CMatrix::Identity(2, 2), pauli_x()}), HypothesisError);
}

TEST(CanonicalExpectation, TraceOverScalars) {
    const AlgebraPtr a = m2();
    const ConditionalExpectation e = canonical_expectation(scalar_embedding(scalars(), a));
    detail::Random rng(1);
    const CMatrix x = rng.complex_matrix(2, 2);
    const CMatrix ex = a->element(e.matrix * a->coords(x));
    EXPECT_LT(norm(ex - x.trace() / 2.0 * CMatrix::Identity(2, 2)), 1e-14);
    EXPECT_LT(norm(a->element(e.matrix * a->coords(pauli_z()))), 1e-15);
}

TEST(CanonicalExpectation, PinchingOntoDiagonal) {
    const AlgebraPtr a = m2();
    const ConditionalExpectation e = canonical_expectation(d2_inclusion(d2(), a));
    detail::Random rng(2);
    const CMatrix x = rng.complex_matrix(2, 2);
    const CMatrix ex = a->element(e.matrix * a->coords(x));
    EXPECT_LT(norm(ex - diag({x(0, 0), x(1, 1)})), 1e-14);
}

TEST(CanonicalExpectation, BlockAlgebraOverScalars) {
    const AlgebraPtr a = make_block_algebra({2, 1});
    const ConditionalExpectation e = canonical_expectation(scalar_embedding(scalars(), a));
    detail::Random rng(3);
    const CMatrix x = a->element(rng.complex_matrix(a->dim(), 1).col(0));
    // Brute-force HS projection onto span{I}: <I, x>/<I, I> I.
    const Complex c = (CMatrix::Identity(3, 3) * x).trace() / 3.0;
    EXPECT_LT(norm(a->element(e.matrix * a->coords(x)) - c * CMatrix::Identity(3, 3)), 1e-14);
}

TEST(CanonicalExpectation, SatisfiesAllInvariants) {
    detail::Random rng(5);
    for (int trial = 0; trial < 6; ++trial) {
        const Instance inst = generated(static_cast<std::uint64_t>(trial));
        for (const StarEmbedding& emb : inst.embeddings) {
            const ExpectationResiduals r = expectation_residuals(canonical_expectation(emb));
            EXPECT_LE(r.idempotent, 1e-8);
            EXPECT_LE(r.fixes_source, 1e-8);
            EXPECT_LE(r.range, 1e-8);
            EXPECT_LE(r.bimodule, 1e-8);
            EXPECT_LE(r.unital, 1e-8);
            EXPECT_GE(r.cp_min_eigenvalue, -1e-8 * std::max(1.0, r.gram_norm));
        }
    }
}

TEST(KernelBasis, TracelessPaulis) {
    const AlgebraPtr a = m2();
    const std::vector<CMatrix> k = expectation_kernel_basis(canonical_expectation(scalar_embedding(scalars(), a)));
    ASSERT_EQ(k.size(), 3u);
    CMatrix paulis(4, 3);
    paulis.col(0) = Eigen::Map<const CVector>(pauli_x().data(), 4);
    paulis.col(1) = Eigen::Map<const CVector>(pauli_y().data(), 4);
    paulis.col(2) = Eigen::Map<const CVector>(pauli_z().data(), 4);
    for (const CMatrix& x : k) {
        EXPECT_NEAR(std::abs(x.trace()), 0.0, 1e-14);
        EXPECT_NEAR(a->inner(x, x).real(), 1.0, 1e-14);
        CMatrix both(4, 4);
        both << paulis, Eigen::Map<const CVector>(x.data(), 4);
        EXPECT_EQ(brute_rank(both), 3);
    }
}

TEST(KernelBasis, IdentityEmbeddingHasEmptyKernel) {
    const AlgebraPtr a = m2();
    EXPECT_TRUE(expectation_kernel_basis(canonical_expectation(identity_embedding(a))).empty());
    const AlgebraPtr b = d2();
    EXPECT_TRUE(expectation_kernel_basis(canonical_expectation(make_embedding(b, b, b->basis()))).empty());
}

TEST(KernelBasis, OffDiagonalOverD2) {
    const std::vector<CMatrix> k = expectation_kernel_basis(canonical_expectation(d2_inclusion(d2(), m2())));
    ASSERT_EQ(k.size(), 2u);
    for (const CMatrix& x : k) {
        EXPECT_LT(std::abs(x(0, 0)) + std::abs(x(1, 1)), 1e-14);
    }
}

TEST(KernelBasis, OrthogonalToEmbeddedB) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Instance inst = generated(seed);
        for (const StarEmbedding& emb : inst.embeddings) {
            const ConditionalExpectation e = canonical_expectation(emb);
            const std::vector<CMatrix> k = expectation_kernel_basis(e);
            EXPECT_EQ(static_cast<Index>(k.size()), emb.target->dim() - emb.source->dim());
            for (const CMatrix& x : k) {
                for (Index s = 0; s < emb.source->dim(); ++s) {
                    const CMatrix b = emb.target->element(emb.matrix.col(s));
                    EXPECT_LE(std::abs(emb.target->inner(b, x)), 1e-8);
                }
            }
        }
    }
}

TEST(RepIntertwiners, SchurScalars) {
    const AlgebraPtr a = m2();
    const std::vector<CMatrix> x = rep_intertwiners(identity_representation(a), identity_representation(a));
    ASSERT_EQ(x.size(), 1u);
    EXPECT_LT(norm(x[0] - x[0](0, 0) * CMatrix::Identity(2, 2)), 1e-12);
}

TEST(RepIntertwiners, InequivalentCharacters) {
    const AlgebraPtr b = d2();
    EXPECT_TRUE(rep_intertwiners(character(b, 0), character(b, 1)).empty());
}

TEST(RepIntertwiners, CharacterIntoIdentity) {
    const AlgebraPtr b = d2();
    const std::vector<CMatrix> x = rep_intertwiners(character(b, 0), identity_representation(b));
    ASSERT_EQ(x.size(), 1u);
    ASSERT_EQ(x[0].rows(), 2);
    ASSERT_EQ(x[0].cols(), 1);
    EXPECT_NEAR(std::abs(x[0](0, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(x[0](1, 0)), 0.0, 1e-12);
}

TEST(RepIntertwiners, RandomAmplificationsSolveTheSystem) {
    detail::Random rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const AlgebraPtr a = random_block_algebra(rng, {2, 1});
        const Representation rho = identity_representation(a, 2);
        const Representation pi = identity_representation(a, 3);
        const std::vector<CMatrix> x = rep_intertwiners(rho, pi);
        // Hom(C^3 (x) C^2, C^3 (x) C^3) for this algebra: (2 * 3) per block, two blocks.
        EXPECT_EQ(x.size(), 12u);
        CMatrix stacked(pi.dim * rho.dim, static_cast<Index>(x.size()));
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (Index p = 0; p < a->dim(); ++p) {
                EXPECT_LE(norm(x[k] * rho.image(p) - pi.image(p) * x[k]), 1e-8);
            }
            stacked.col(static_cast<Index>(k)) = Eigen::Map<const CVector>(x[k].data(), pi.dim * rho.dim);
        }
        EXPECT_EQ(brute_rank(stacked), static_cast<Index>(x.size()));
    }
}

TEST(RepresentationResidual, AmplifiedIdentityIsARepresentation) {
    const AlgebraPtr a = make_block_algebra({2, 1});
    for (Index copies : {1, 30}) {
        std::vector<CMatrix> imgs;
        for (const CMatrix& x : a->basis()) imgs.push_back(kron(CMatrix::Identity(copies, copies), x));
        const Representation r{a, 3 * copies, imgs};
        EXPECT_LE(representation_residual(r), 1e-12);
    }
}

TEST(RepresentationResidual, ProbeDetectsADefect) {
    const AlgebraPtr a = m2();
    std::vector<CMatrix> imgs;
    for (const CMatrix& x : a->basis()) imgs.push_back(kron(CMatrix::Identity(40, 40), x));
    // A unital *-preserving but non-multiplicative perturbation of one image.
    CMatrix bump = CMatrix::Zero(80, 80);
    bump(5, 7) = 0.1;
    bump(7, 5) = 0.1;
    imgs[1] += bump;
    const Representation r{a, 80, imgs};
    const double exact = representation_residual(r, 1000);
    const double probed = representation_residual(r);
    EXPECT_GT(exact, 1e-3);
    EXPECT_GT(probed, 1e-6);
    EXPECT_LE(probed, std::sqrt(2.0) * exact);
}
