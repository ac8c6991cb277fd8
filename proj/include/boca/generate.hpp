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

// Seeded random instances. The random stream is derived from raw
// mt19937_64 output only, so files are reproducible across standard libraries.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "boca/instance.hpp"

namespace boca {

struct GeneratorProfile {
    std::string name = "default";
    int min_algebras = 2;
    int max_algebras = 3;
    Index max_ambient = 4;
    Index max_algebra_dim = 5;  // total dimension of each A_i
    Index max_h = 3;
    int depth = 3;
    bool linear_only = false;   // restrictions to B agree only linearly
    bool scalar_base = false;   // force B = C
};

/// Named presets: "default", "linear-only", "compact" (small towers for depth 4).
inline GeneratorProfile generator_profile(const std::string& name) {
    GeneratorProfile p;
    p.name = name;
    if (name == "default") return p;
    if (name == "linear-only") {
        p.linear_only = true;
        return p;
    }
    if (name == "compact") {
        p.max_algebras = 2;
        p.max_ambient = 3;
        p.max_algebra_dim = 4;
        p.max_h = 2;
        p.depth = 4;
        return p;
    }
    throw ShapeError("generator_profile", "unknown profile '" + name + "'");
}

namespace detail {

class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [lo, hi].
    Index integer(Index lo, Index hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<Index>(engine_() % span);
    }
    double gaussian() {
        const double u = 1.0 - uniform();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }
    Complex complex_gaussian() {
        const double re = gaussian();
        return {re, gaussian()};
    }
    CMatrix complex_matrix(Index rows, Index cols) {
        CMatrix m(rows, cols);
        for (Index j = 0; j < cols; ++j) {
            for (Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian() / std::sqrt(2.0);
        }
        return m;
    }
    CMatrix unitary(Index n) { return polar_isometry(complex_matrix(n, n)); }

private:
    std::mt19937_64 engine_;
};

inline std::vector<std::vector<Index>> compositions(Index n, Index max_dim) {
    std::vector<std::vector<Index>> out;
    std::vector<Index> cur;
    auto rec = [&](auto&& self, Index left, Index dim) -> void {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        for (Index k = 1; k <= left; ++k) {
            if (dim + k * k > max_dim) break;
            cur.push_back(k);
            self(self, left - k, dim + k * k);
            cur.pop_back();
        }
    };
    rec(rec, n, 0);
    return out;
}

inline json algebra_json(const std::string& name, const std::vector<Index>& blocks, const CMatrix* unitary) {
    json j;
    j["name"] = name;
    j["blocks"] = blocks;
    if (unitary) j["unitary"] = matrix_to_json(*unitary);
    return j;
}

} // namespace detail

/// A random instance whose maps satisfy the hypotheses of the profile. In the
/// default profile Phi_i = V_i* (a x I_h) V_i with V_i intertwining a fixed
/// representation of B; in linear-only the Phi_i are mixtures with a common
/// non-multiplicative restriction to B.
inline json generate_instance(std::uint64_t seed, const GeneratorProfile& profile) {
    detail::Random rng(seed);
    const Tolerances tol;
    json out;
    out["schema"] = kInstanceSchema;
    out["name"] = profile.name + "-" + std::to_string(seed);
    out["mode"] = profile.linear_only ? "boca-linear" : "boca";
    out["depth"] = profile.depth;
    out["seed"] = seed;

    const bool scalar = profile.scalar_base || (!profile.linear_only && rng.integer(0, 1) == 0);
    const std::vector<Index> base_blocks = scalar ? std::vector<Index>{1} : std::vector<Index>{1, 1};
    const AlgebraPtr base = make_block_algebra(base_blocks);
    out["subalgebra"] = detail::algebra_json("B", base_blocks, nullptr);

    const Index h = rng.integer(scalar ? 1 : 2, profile.max_h);
    // rho_0 on B: E11 -> diag(1..1, 0..0) with k0 ones.
    const Index k0 = scalar ? h : rng.integer(0, h);
    auto rho0_at = [&](const CMatrix& b) {
        CMatrix r = CMatrix::Zero(h, h);
        for (Index m = 0; m < h; ++m) r(m, m) = (m < k0 || scalar) ? b(0, 0) : b(b.rows() - 1, b.cols() - 1);
        return r;
    };
    std::vector<CMatrix> rho0_images;
    for (const CMatrix& b : base->basis()) rho0_images.push_back(rho0_at(b));
    const Representation rho0 = make_representation(base, h, rho0_images, tol);

    // Non-multiplicative common restriction for the linear-only profile.
    const double lambda = rng.uniform(0.3, 0.7);
    CMatrix q = CMatrix::Zero(h, h);
    if (profile.linear_only) {
        const CMatrix w = rng.unitary(h);
        CMatrix d = CMatrix::Zero(h, h);
        for (Index m = 0; m < h; ++m) d(m, m) = rng.uniform(0.2, 0.8);
        q = w * d * w.adjoint();
    }

    const int count = static_cast<int>(rng.integer(profile.min_algebras, profile.max_algebras));
    json algebras = json::array();
    json embeddings = json::array();
    json maps = json::array();
    json expectations = json::array();
    std::vector<AlgebraPtr> built;
    for (int i = 0; i < count; ++i) {
        const std::string aname = "A" + std::to_string(i + 1);
        // Ambient dimension first, then a block type, so matrix blocks are not crowded out.
        std::vector<std::vector<Index>> menu;
        while (menu.empty()) {
            const Index m = rng.integer(2, profile.max_ambient);
            for (auto& c : detail::compositions(m, profile.max_algebra_dim)) {
                // Both minimal projections of D2 need room.
                if (!scalar && c.size() == 1 && c[0] < 2) continue;
                menu.push_back(std::move(c));
            }
        }
        const std::vector<Index> blocks = menu[static_cast<std::size_t>(rng.integer(0, static_cast<Index>(menu.size()) - 1))];
        Index n = 0;
        for (Index k : blocks) n += k;
        const CMatrix u = rng.unitary(n);
        algebras.push_back(detail::algebra_json(aname, blocks, &u));

        std::vector<CMatrix> gens;
        {
            Index off = 0;
            for (Index k : blocks) {
                for (Index r = 0; r < k; ++r) {
                    for (Index c = 0; c < k; ++c) {
                        CMatrix e = CMatrix::Zero(n, n);
                        e(off + r, off + c) = 1.0;
                        gens.push_back(u * e * u.adjoint());
                    }
                }
                off += k;
            }
        }
        AlgebraOptions ao;
        ao.name = aname;
        const AlgebraPtr a = make_algebra(n, gens, ao);
        built.push_back(a);

        StarEmbedding emb;
        if (scalar) {
            embeddings.push_back("scalar");
            emb = make_embedding(base, a, {CMatrix::Identity(n, n)}, tol);
        } else {
            // A nontrivial diagonal projection P, which lies in any block algebra.
            CMatrix p = CMatrix::Zero(n, n);
            const Index ones = rng.integer(1, n - 1);
            for (Index m = 0; m < ones; ++m) p(m, m) = 1.0;
            const CMatrix img = u * p * u.adjoint();
            const CMatrix comp = CMatrix::Identity(n, n) - img;
            CMatrix e11 = CMatrix::Zero(2, 2);
            e11(0, 0) = 1.0;
            CMatrix e22 = CMatrix::Zero(2, 2);
            e22(1, 1) = 1.0;
            json ej;
            ej["elements"] = json::array({matrix_to_json(e11), matrix_to_json(e22)});
            ej["images"] = json::array({matrix_to_json(img), matrix_to_json(comp)});
            embeddings.push_back(ej);
            emb = make_embedding_from_pairs(base, a, {e11, e22}, {img, comp}, tol);
        }
        expectations.push_back("canonical");

        // V: C^h -> C^n x C^h intertwining rho0 and (a x I_h) o e.
        const Representation amp = pullback(identity_representation(a, h), emb);
        const std::vector<CMatrix> ints = rep_intertwiners(rho0, amp, tol);
        if (ints.empty()) throw InternalError("generate_instance", "no intertwiner for " + aname);
        CMatrix x = CMatrix::Zero(n * h, h);
        for (const CMatrix& t : ints) x += rng.complex_gaussian() * t;
        if (orthonormal_columns(x, tol).rank < h) throw InternalError("generate_instance", "degenerate intertwiner");
        const CMatrix v = polar_isometry(x);
        for (Index p = 0; p < base->dim(); ++p) {
            const double off = norm(v * rho0.image(p) - amp.image(p) * v);
            if (off > tol.check_tol) throw InternalError("generate_instance", "isometry does not intertwine", off);
        }

        if (!profile.linear_only) {
            json kraus = json::array();
            for (Index m = 0; m < h; ++m) {
                // K_m = V* (I_n x e_m)
                CMatrix k(h, n);
                for (Index c = 0; c < n; ++c) k.col(c) = v.row(c * h + m).adjoint();
                kraus.push_back(matrix_to_json(k));
            }
            maps.push_back({{"kraus", kraus}});
        } else {
            const ConditionalExpectation ex = canonical_expectation(emb, tol);
            json el = json::array();
            json va = json::array();
            for (Index s = 0; s < a->dim(); ++s) {
                const CMatrix& b = a->basis(s);
                const CMatrix pure = v.adjoint() * kron(b, CMatrix::Identity(h, h)) * v;
                // phi_0 o E: E11 -> Q, E22 -> I - Q
                const CVector bc = ex.to_source.col(s);
                const CMatrix bm = base->element(bc);
                const CMatrix mixed = bm(0, 0) * q + bm(1, 1) * (CMatrix::Identity(h, h) - q);
                el.push_back(matrix_to_json(b));
                va.push_back(matrix_to_json(lambda * pure + (1.0 - lambda) * mixed));
            }
            maps.push_back({{"elements", el}, {"values", va}});
        }
    }
    out["algebras"] = algebras;
    out["embeddings"] = embeddings;
    out["maps"] = maps;
    out["expectations"] = expectations;

    // Two sample elements: a random alternating word and a sum with a B-part.
    json elements = json::array();
    auto random_letter = [&](int i) {
        const AlgebraPtr& a = built[static_cast<std::size_t>(i)];
        const CVector c = rng.complex_matrix(a->dim(), 1).col(0);
        return json{{"algebra", i}, {"matrix", matrix_to_json(a->element(c))}};
    };
    {
        json letters = json::array();
        const int len = std::min(profile.depth, 3);
        int prev = -1;
        for (int k = 0; k < len; ++k) {
            int i = static_cast<int>(rng.integer(0, count - 1));
            if (i == prev) i = (i + 1) % count;
            letters.push_back(random_letter(i));
            prev = i;
        }
        elements.push_back({{"terms", json::array({json{{"letters", letters}}})}});
    }
    {
        const CVector bc = rng.complex_matrix(base->dim(), 1).col(0);
        json t1{{"coeff", complex_to_json(rng.complex_gaussian())}, {"letters", json::array({random_letter(0)})}};
        json t2{{"coeff", complex_to_json(rng.complex_gaussian())},
                {"letters", json::array({random_letter(count - 1), random_letter(0)})}};
        elements.push_back({{"b_part", matrix_to_json(base->element(bc))}, {"terms", json::array({t1, t2})}});
    }
    out["elements"] = elements;
    return out;
}

} // namespace boca
