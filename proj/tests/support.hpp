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

// Fixtures and brute-force reference computations shared by the tests.

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "boca/boca.hpp"
#include "boca/generate.hpp"

namespace testing_support {

using boca::CMatrix;
using boca::Complex;
using boca::CVector;
using boca::Index;

inline const Complex kI{0.0, 1.0};

inline CMatrix unit_matrix(Index n, Index r, Index c) {
    CMatrix e = CMatrix::Zero(n, n);
    e(r, c) = 1.0;
    return e;
}

inline CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

inline CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline CMatrix diag(std::initializer_list<Complex> d) {
    CMatrix m = CMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    Index k = 0;
    for (Complex z : d) {
        m(k, k) = z;
        ++k;
    }
    return m;
}

// Numerical rank by a full two-sided Jacobi SVD, independent of the library's
// Gram-Schmidt path.
inline Index brute_rank(const CMatrix& m, double rel = 1e-9) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    Index r = 0;
    for (Index k = 0; k < s.size(); ++k) r += s(k) > rel * s(0) ? 1 : 0;
    return r;
}

// Gram form [<e_k, phi(x_p^* x_q) e_l>] over an explicit list of matrices,
// assembled entry by entry.
template <class Phi>
inline CMatrix brute_gram(const std::vector<CMatrix>& xs, Index h, Phi phi) {
    const Index n = static_cast<Index>(xs.size());
    CMatrix g(n * h, n * h);
    for (Index p = 0; p < n; ++p) {
        for (Index q = 0; q < n; ++q) {
            const CMatrix v = phi(CMatrix(xs[static_cast<std::size_t>(p)].adjoint() * xs[static_cast<std::size_t>(q)]));
            for (Index k = 0; k < h; ++k) {
                for (Index l = 0; l < h; ++l) g(p * h + k, q * h + l) = v(k, l);
            }
        }
    }
    return g;
}

inline std::vector<CMatrix> matrix_units(Index n) {
    std::vector<CMatrix> out;
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) out.push_back(unit_matrix(n, r, c));
    }
    return out;
}

inline boca::AlgebraPtr m2() { return boca::make_block_algebra({2}); }
inline boca::AlgebraPtr scalars() { return boca::make_block_algebra({1}); }

inline boca::StarEmbedding scalar_embedding(const boca::AlgebraPtr& c, const boca::AlgebraPtr& a) {
    return boca::make_embedding(c, a, {CMatrix::Identity(a->ambient_dim(), a->ambient_dim())});
}

// The compression x -> psi^* x psi by a unit vector.
inline boca::CPMap vector_state(const boca::AlgebraPtr& a, const CVector& psi) {
    std::vector<CMatrix> action;
    for (const CMatrix& b : a->basis()) action.push_back(psi.adjoint() * b * psi);
    return boca::make_ucp(a, 1, action);
}

inline CVector ket0() {
    CVector v(2);
    v << 1, 0;
    return v;
}

inline CVector ket_plus_i() {
    CVector v(2);
    v << 1.0 / std::sqrt(2.0), kI / std::sqrt(2.0);
    return v;
}

// The pauli-states family: B = C, A1 = A2 = M2, Phi_1 = <0|.|0>, Phi_2 = <+i|.|+i>.
struct Pauli {
    boca::AlgebraPtr b = scalars();
    boca::AlgebraPtr a1 = m2();
    boca::AlgebraPtr a2 = m2();
    boca::StarEmbedding e1 = scalar_embedding(b, a1);
    boca::StarEmbedding e2 = scalar_embedding(b, a2);
    boca::CPMap phi1 = vector_state(a1, ket0());
    boca::CPMap phi2 = vector_state(a2, ket_plus_i());

    boca::UcpExtension extend(int depth) const { return boca::boca_extend({phi1, phi2}, {e1, e2}, {}, depth); }
};

inline boca::FreeElement letter(const boca::ContextPtr& ctx, int i, const CMatrix& x) {
    return boca::FreeElement::letter(ctx, i, ctx->algebra(i).coords(x));
}

inline boca::FreeElement word(const boca::ContextPtr& ctx, const std::vector<std::pair<int, CMatrix>>& letters,
                              Complex coeff = 1.0) {
    boca::FreeWord w;
    for (const auto& [i, x] : letters) w.push_back(boca::FreeLetter{i, ctx->algebra(i).coords(x)});
    return boca::FreeElement::from_word(ctx, std::move(w), coeff);
}

inline boca::Instance generated(std::uint64_t seed, const std::string& profile = "default") {
    return boca::load_instance(boca::generate_instance(seed, boca::generator_profile(profile)));
}

inline CMatrix random_unitary(boca::detail::Random& rng, Index n) { return rng.unitary(n); }

// A unital *-subalgebra W (+ M_k) W^* of M_n with random W.
inline boca::AlgebraPtr random_block_algebra(boca::detail::Random& rng, const std::vector<Index>& blocks) {
    Index n = 0;
    for (Index k : blocks) n += k;
    const CMatrix w = rng.unitary(n);
    std::vector<CMatrix> gens;
    Index off = 0;
    for (Index k : blocks) {
        for (Index r = 0; r < k; ++r) {
            for (Index c = 0; c < k; ++c) gens.push_back(w * unit_matrix(n, off + r, off + c) * w.adjoint());
        }
        off += k;
    }
    return boca::make_algebra(n, gens);
}

} // namespace testing_support
