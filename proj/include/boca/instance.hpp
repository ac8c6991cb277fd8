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

// Instance files: UTF-8 JSON, complex entries as [re, im], matrices as
// row-major nested arrays. See docs/instance.schema.json.

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "boca/extend.hpp"

namespace boca {

using json = nlohmann::json;

inline constexpr const char* kInstanceSchema = "boca-instance/1";
inline constexpr const char* kReportSchema = "boca-report/1";
inline constexpr const char* kVersion = "1.0.0";

/// An element to evaluate, kept as raw matrices until a context exists.
struct ElementSpec {
    std::optional<CMatrix> b_part;  // in B's ambient space
    struct Letter {
        int algebra = 0;
        CMatrix matrix;
    };
    struct Term {
        Complex coeff{1.0, 0.0};
        std::vector<Letter> letters;
    };
    std::vector<Term> terms;
    std::optional<CMatrix> expected;  // h x h value Phi(x) should take
};

struct Instance {
    std::string name = "instance";
    std::string mode = "boca";
    int depth = 3;
    std::uint64_t seed = 0;
    Tolerances tol{};

    AlgebraPtr base;
    std::vector<AlgebraPtr> algebras;
    std::vector<StarEmbedding> embeddings;   // B -> A_i (B -> C_i in corollary mode)
    std::vector<CPMap> maps;                 // Phi_i on A_i (sigma_i on C_i in corollary mode)
    std::vector<std::optional<ConditionalExpectation>> expectations;
    std::vector<ElementSpec> elements;

    std::vector<AlgebraPtr> c_algebras;      // corollary mode
    std::vector<StarEmbedding> inclusions;   // C_i -> A_i
};

// ---------------------------------------------------------------------------
// JSON <-> matrices

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
    throw ShapeError("load_instance", where + ": " + what);
}

inline const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema_error(where, std::string("missing field '") + key + "'");
    return j.at(key);
}

inline Complex complex_from_json(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        schema_error(where, "complex entries are [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline CMatrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) schema_error(where, "matrix must be a nonempty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) schema_error(where, "matrix rows must be nonempty arrays");
    const std::size_t cols = j[0].size();
    CMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) schema_error(where, "ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(j[r][c], where);
        }
    }
    if (!all_finite(m)) schema_error(where, "non-finite entry");
    return m;
}

inline CMatrix square_from_json(const json& j, Index n, const std::string& where) {
    CMatrix m = matrix_from_json(j, where);
    if (m.rows() != n || m.cols() != n) {
        schema_error(where, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    return m;
}

inline std::vector<CMatrix> matrices_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) schema_error(where, "expected a nonempty list of matrices");
    std::vector<CMatrix> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(matrix_from_json(j[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

inline AlgebraPtr algebra_from_json(const json& j, const std::string& where, const Tolerances& tol) {
    AlgebraOptions opts;
    opts.tol = tol;
    opts.name = j.value("name", where);
    if (j.contains("blocks")) {
        const json& b = j.at("blocks");
        if (!b.is_array() || b.empty()) schema_error(where, "'blocks' must be a nonempty list of sizes");
        std::vector<Index> blocks;
        Index n = 0;
        for (const json& k : b) {
            if (!k.is_number_integer() || k.get<long long>() <= 0) schema_error(where, "block sizes are positive integers");
            blocks.push_back(k.get<Index>());
            n += blocks.back();
        }
        if (!j.contains("unitary")) return make_block_algebra(blocks, opts);
        const CMatrix u = square_from_json(j.at("unitary"), n, where + ".unitary");
        if (isometry_residual(u) > tol.check_tol) schema_error(where, "'unitary' is not unitary");
        std::vector<CMatrix> generators;
        Index offset = 0;
        for (Index k : blocks) {
            for (Index r = 0; r < k; ++r) {
                for (Index c = 0; c < k; ++c) {
                    CMatrix e = CMatrix::Zero(n, n);
                    e(offset + r, offset + c) = 1.0;
                    generators.push_back(u * e * u.adjoint());
                }
            }
            offset += k;
        }
        return make_algebra(n, generators, opts);
    }
    const json& n = require(j, "ambient_dim", where);
    if (!n.is_number_integer() || n.get<long long>() <= 0) schema_error(where, "'ambient_dim' is a positive integer");
    const Index dim = n.get<Index>();
    std::vector<CMatrix> generators;
    const json& g = require(j, "generators", where);
    if (!g.is_array() || g.empty()) schema_error(where, "'generators' must be a nonempty list");
    for (std::size_t k = 0; k < g.size(); ++k) {
        generators.push_back(square_from_json(g[k], dim, where + ".generators[" + std::to_string(k) + "]"));
    }
    return make_algebra(dim, generators, opts);
}

inline StarEmbedding embedding_from_json(const json& j, const AlgebraPtr& source, const AlgebraPtr& target,
                                         const std::string& where, const Tolerances& tol) {
    if (j.is_string()) {
        const std::string kind = j.get<std::string>();
        if (kind == "inclusion") {
            if (source->ambient_dim() != target->ambient_dim()) schema_error(where, "inclusion needs equal ambient dimensions");
            return make_embedding(source, target, source->basis(), tol);
        }
        if (kind == "scalar") {
            if (source->dim() != 1) schema_error(where, "'scalar' embeds only the scalars");
            return make_embedding(source, target, {CMatrix::Identity(target->ambient_dim(), target->ambient_dim())}, tol);
        }
        schema_error(where, "unknown embedding kind '" + kind + "'");
    }
    const json& el = require(j, "elements", where);
    const json& im = require(j, "images", where);
    if (!el.is_array() || !im.is_array() || el.size() != im.size() || el.empty()) {
        schema_error(where, "'elements' and 'images' must be nonempty lists of equal length");
    }
    std::vector<CMatrix> elements;
    std::vector<CMatrix> images;
    for (std::size_t k = 0; k < el.size(); ++k) {
        elements.push_back(square_from_json(el[k], source->ambient_dim(), where + ".elements"));
        images.push_back(square_from_json(im[k], target->ambient_dim(), where + ".images"));
    }
    return make_embedding_from_pairs(source, target, elements, images, tol);
}

// Values on the basis of a linear map known on a spanning set.
inline std::vector<CMatrix> fit_on_basis(const FiniteCStarAlgebra& a, const std::vector<CMatrix>& elements,
                                         const std::vector<CMatrix>& values, const std::string& where,
                                         const Tolerances& tol) {
    const Index m = static_cast<Index>(elements.size());
    const Index h = values.front().rows();
    CMatrix src(a.dim(), m);
    for (Index k = 0; k < m; ++k) {
        const CMatrix& x = elements[static_cast<std::size_t>(k)];
        if (a.span_residual(x) > tol.check_tol) {
            throw HypothesisError("load_instance", where + ": element " + std::to_string(k) + " is outside the domain");
        }
        src.col(k) = a.coords(x);
    }
    if (orthonormal_columns(src, tol).rank != a.dim()) {
        throw HypothesisError("load_instance", where + ": elements do not span the domain");
    }
    CMatrix vals(h * h, m);
    for (Index k = 0; k < m; ++k) {
        vals.col(k) = Eigen::Map<const CVector>(values[static_cast<std::size_t>(k)].data(), h * h);
    }
    const CMatrix coef = src.transpose().colPivHouseholderQr().solve(vals.transpose()).transpose();
    const double fit = norm(coef * src - vals);
    if (fit > tol.check_tol * std::max(1.0, norm(vals))) {
        throw HypothesisError("load_instance", where + ": values are not consistent with a linear map", fit);
    }
    std::vector<CMatrix> out;
    for (Index p = 0; p < a.dim(); ++p) out.emplace_back(Eigen::Map<const CMatrix>(coef.col(p).data(), h, h));
    return out;
}

inline std::vector<CMatrix> map_values_from_json(const json& j, const AlgebraPtr& domain, const std::string& where,
                                                 const Tolerances& tol) {
    const Index n = domain->ambient_dim();
    if (j.contains("kraus")) {
        const std::vector<CMatrix> kraus = matrices_from_json(j.at("kraus"), where + ".kraus");
        const Index h = kraus.front().rows();
        for (const CMatrix& k : kraus) {
            if (k.rows() != h || k.cols() != n) schema_error(where, "Kraus operators must all be h x n");
        }
        std::vector<CMatrix> out;
        for (const CMatrix& b : domain->basis()) {
            CMatrix v = CMatrix::Zero(h, h);
            for (const CMatrix& k : kraus) v += k * b * k.adjoint();
            out.push_back(std::move(v));
        }
        return out;
    }
    const std::vector<CMatrix> elements = matrices_from_json(require(j, "elements", where), where + ".elements");
    const std::vector<CMatrix> values = matrices_from_json(require(j, "values", where), where + ".values");
    if (elements.size() != values.size()) schema_error(where, "'elements' and 'values' differ in length");
    const Index h = values.front().rows();
    for (const CMatrix& x : elements) {
        if (x.rows() != n || x.cols() != n) schema_error(where, "element has the wrong shape");
    }
    for (const CMatrix& v : values) {
        if (v.rows() != h || v.cols() != h) schema_error(where, "values must all be h x h");
    }
    return fit_on_basis(*domain, elements, values, where, tol);
}


} // namespace detail

/// Builds and validates an instance. Schema problems raise ShapeError;
/// mathematical problems (non-CP maps, non-multiplicative embeddings) raise
/// HypothesisError.
inline Instance load_instance(const json& j) {
    using namespace detail;
    if (!j.is_object()) schema_error("instance", "top level must be an object");
    if (j.contains("schema") && j.at("schema") != kInstanceSchema) schema_error("schema", "unsupported schema version");
    Instance inst;
    inst.name = j.value("name", std::string("instance"));
    inst.mode = j.value("mode", std::string("boca"));
    if (inst.mode != "boca" && inst.mode != "boca-linear" && inst.mode != "corollary") {
        schema_error("mode", "must be boca, boca-linear or corollary");
    }
    if (j.contains("depth")) {
        if (!j.at("depth").is_number_integer() || j.at("depth").get<int>() < 1) schema_error("depth", "positive integer");
        inst.depth = j.at("depth").get<int>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) schema_error("seed", "nonnegative integer");
        inst.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        inst.tol.eig_tol = t.value("eig_tol", inst.tol.eig_tol);
        inst.tol.rank_tol = t.value("rank_tol", inst.tol.rank_tol);
        inst.tol.check_tol = t.value("check_tol", inst.tol.check_tol);
        inst.tol.validate();
    }
    inst.base = algebra_from_json(require(j, "subalgebra", "instance"), "subalgebra", inst.tol);
    const json& algs = require(j, "algebras", "instance");
    if (!algs.is_array() || algs.empty()) schema_error("algebras", "nonempty list");
    for (std::size_t i = 0; i < algs.size(); ++i) {
        inst.algebras.push_back(algebra_from_json(algs[i], "algebras[" + std::to_string(i) + "]", inst.tol));
    }
    const std::size_t n = inst.algebras.size();

    std::vector<AlgebraPtr> domains = inst.algebras;
    if (inst.mode == "corollary") {
        const json& cor = require(j, "corollary", "instance");
        const json& subs = require(cor, "subalgebras", "corollary");
        const json& incs = require(cor, "inclusions", "corollary");
        if (!subs.is_array() || subs.size() != n || !incs.is_array() || incs.size() != n) {
            schema_error("corollary", "need one subalgebra and one inclusion per algebra");
        }
        for (std::size_t i = 0; i < n; ++i) {
            inst.c_algebras.push_back(algebra_from_json(subs[i], "corollary.subalgebras[" + std::to_string(i) + "]", inst.tol));
            inst.inclusions.push_back(embedding_from_json(incs[i], inst.c_algebras[i], inst.algebras[i],
                                                          "corollary.inclusions[" + std::to_string(i) + "]", inst.tol));
        }
        domains = inst.c_algebras;
    }

    const json& embs = require(j, "embeddings", "instance");
    const json& maps = require(j, "maps", "instance");
    if (!embs.is_array() || embs.size() != n) schema_error("embeddings", "need one embedding per algebra");
    if (!maps.is_array() || maps.size() != n) schema_error("maps", "need one map per algebra");
    for (std::size_t i = 0; i < n; ++i) {
        const std::string where = "embeddings[" + std::to_string(i) + "]";
        inst.embeddings.push_back(embedding_from_json(embs[i], inst.base, domains[i], where, inst.tol));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::string where = "maps[" + std::to_string(i) + "]";
        std::vector<CMatrix> values = map_values_from_json(maps[i], domains[i], where, inst.tol);
        const Index h = values.front().rows();
        try {
            inst.maps.push_back(make_ucp(domains[i], h, std::move(values), inst.tol));
        } catch (const HypothesisError& e) {
            throw HypothesisError("make_ucp", where + ": " + e.what(), e.residual());
        }
    }
    inst.expectations.assign(n, std::nullopt);
    if (j.contains("expectations")) {
        const json& ex = j.at("expectations");
        if (!ex.is_array() || ex.size() != n) schema_error("expectations", "need one entry per algebra");
        if (inst.mode == "corollary") schema_error("expectations", "not used in corollary mode");
        for (std::size_t i = 0; i < n; ++i) {
            const std::string where = "expectations[" + std::to_string(i) + "]";
            if (ex[i].is_string()) {
                if (ex[i].get<std::string>() != "canonical") schema_error(where, "only 'canonical' is a named expectation");
                continue;
            }
            const Index m = inst.algebras[i]->ambient_dim();
            std::vector<CMatrix> el = matrices_from_json(require(ex[i], "elements", where), where);
            std::vector<CMatrix> va = matrices_from_json(require(ex[i], "values", where), where);
            for (const CMatrix& x : el) if (x.rows() != m || x.cols() != m) schema_error(where, "wrong shape");
            for (const CMatrix& x : va) if (x.rows() != m || x.cols() != m) schema_error(where, "wrong shape");
            inst.expectations[i] = make_expectation_from_pairs(inst.embeddings[i], el, va, inst.tol);
        }
    }
    if (j.contains("elements")) {
        const json& els = j.at("elements");
        if (!els.is_array()) schema_error("elements", "must be a list");
        for (std::size_t k = 0; k < els.size(); ++k) {
            const std::string where = "elements[" + std::to_string(k) + "]";
            ElementSpec spec;
            if (els[k].contains("b_part")) {
                spec.b_part = square_from_json(els[k].at("b_part"), inst.base->ambient_dim(), where + ".b_part");
            }
            if (els[k].contains("terms")) {
                for (const json& t : els[k].at("terms")) {
                    ElementSpec::Term term;
                    if (t.contains("coeff")) term.coeff = complex_from_json(t.at("coeff"), where);
                    const json& letters = require(t, "letters", where);
                    if (!letters.is_array() || letters.empty()) schema_error(where, "terms need nonempty letter lists");
                    for (const json& l : letters) {
                        const json& idx = require(l, "algebra", where);
                        if (!idx.is_number_integer() || idx.get<long long>() < 0 || idx.get<std::size_t>() >= n) {
                            schema_error(where, "letter algebra index out of range");
                        }
                        const int a = idx.get<int>();
                        term.letters.push_back({a, square_from_json(require(l, "matrix", where),
                                                                    inst.algebras[static_cast<std::size_t>(a)]->ambient_dim(),
                                                                    where)});
                    }
                    spec.terms.push_back(std::move(term));
                }
            }
            if (els[k].contains("expected")) spec.expected = matrix_from_json(els[k].at("expected"), where + ".expected");
            inst.elements.push_back(std::move(spec));
        }
    }
    if (!j.contains("depth")) {
        // Default: the longest requested word.
        std::size_t longest = 1;
        for (const ElementSpec& e : inst.elements) {
            for (const ElementSpec::Term& t : e.terms) longest = std::max(longest, t.letters.size());
        }
        inst.depth = static_cast<int>(longest);
    }
    return inst;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ShapeError("load_instance", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ShapeError("load_instance", path + ": " + e.what());
    }
}

inline Instance load_instance_file(const std::string& path) { return load_instance(read_json_file(path)); }

/// Turns an element spec into a free product element; letters outside their
/// algebra are rejected.
inline FreeElement to_free_element(const ElementSpec& spec, const ContextPtr& ctx, const Tolerances& tol = {}) {
    FreeElement x(ctx);
    if (spec.b_part) {
        const double out = ctx->base->span_residual(*spec.b_part);
        if (out > tol.check_tol) throw HypothesisError("to_free_element", "B-part lies outside B", out);
        x = FreeElement::from_b(ctx, ctx->base->coords(*spec.b_part));
    }
    for (const ElementSpec::Term& t : spec.terms) {
        FreeWord word;
        for (const ElementSpec::Letter& l : t.letters) {
            const FiniteCStarAlgebra& a = ctx->algebra(l.algebra);
            const double out = a.span_residual(l.matrix);
            if (out > tol.check_tol) throw HypothesisError("to_free_element", "letter lies outside its algebra", out);
            word.push_back(FreeLetter{l.algebra, a.coords(l.matrix)});
        }
        x += FreeElement::from_word(ctx, std::move(word), t.coeff);
    }
    return x;
}

} // namespace boca
