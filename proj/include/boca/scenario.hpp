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

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "boca/generate.hpp"
#include "boca/instance.hpp"

namespace boca {

struct RunOptions {
    std::optional<std::string> mode;
    std::optional<int> depth;
    std::optional<std::uint64_t> seed;
    std::optional<double> check_tol;
    bool check_all = false;
};

struct CheckRecord {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct RunResult {
    json report;
    std::vector<CheckRecord> checks;
    bool pass = false;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Digest of a report with timings and the digest field itself removed.
inline std::string report_digest(json report) {
    report.erase("timings_ms");
    report.erase("digest");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(report.dump())));
    return buf;
}

/// Alternating words of kernel-basis letters of length 1..max_len.
inline std::vector<FreeWord> kernel_words(const FreeProductContext& ctx, int max_len, const Tolerances& tol = {}) {
    std::vector<CMatrix> kernels;
    for (int i = 0; i < ctx.size(); ++i) kernels.push_back(expectation_kernel_coords(ctx.expectation(i), tol));
    std::vector<FreeWord> out;
    FreeWord cur;
    std::function<void(int)> grow = [&](int prev) {
        if (!cur.empty()) out.push_back(cur);
        if (static_cast<int>(cur.size()) == max_len) return;
        for (int i = 0; i < ctx.size(); ++i) {
            if (i == prev) continue;
            const CMatrix& k = kernels[static_cast<std::size_t>(i)];
            for (Index c = 0; c < k.cols(); ++c) {
                cur.push_back(FreeLetter{i, k.col(c)});
                grow(i);
                cur.pop_back();
            }
        }
    };
    grow(-1);
    return out;
}

/// A random element with a B-part and up to three terms of length <= max_len.
/// Letters are unconstrained, so adjacent letters may share an index.
inline FreeElement random_element(const ContextPtr& ctx, detail::Random& rng, int max_len) {
    FreeElement x = FreeElement::from_b(ctx, rng.complex_matrix(ctx->base->dim(), 1).col(0));
    const Index terms = rng.integer(1, 3);
    for (Index t = 0; t < terms; ++t) {
        FreeWord w;
        const Index len = rng.integer(1, std::max(1, max_len));
        for (Index k = 0; k < len; ++k) {
            const int i = static_cast<int>(rng.integer(0, ctx->size() - 1));
            w.push_back(FreeLetter{i, rng.complex_matrix(ctx->algebra(i).dim(), 1).col(0)});
        }
        x += FreeElement::from_word(ctx, std::move(w), rng.complex_gaussian());
    }
    return x;
}

/// Test family for the positivity witness: the unit and kernel words of
/// length <= max_len, at most `limit` elements in total.
inline std::vector<FreeElement> gram_family(const ContextPtr& ctx, int max_len, std::size_t limit = 6,
                                            const Tolerances& tol = {}) {
    std::vector<FreeElement> out{FreeElement::unit(ctx)};
    if (max_len < 1) return out;
    const std::vector<FreeWord> words = kernel_words(*ctx, max_len, tol);
    // Spread picks over lengths: first one letter from each algebra, then longer words.
    std::vector<int> seen(static_cast<std::size_t>(ctx->size()), 0);
    for (const FreeWord& w : words) {
        if (out.size() >= limit) break;
        if (w.size() == 1 && !seen[static_cast<std::size_t>(w[0].index)]) {
            seen[static_cast<std::size_t>(w[0].index)] = 1;
            out.push_back(FreeElement::from_word(ctx, w));
        }
    }
    for (const FreeWord& w : words) {
        if (out.size() >= limit) break;
        if (w.size() >= 2) out.push_back(FreeElement::from_word(ctx, w));
    }
    return out;
}

namespace detail {

class Checks {
public:
    void add(std::string name, double residual, double tolerance) {
        records.push_back({std::move(name), residual, tolerance, residual <= tolerance});
    }
    std::vector<CheckRecord> records;
};

inline json dims_json(const DilationTower& t) {
    json dims = json::object();
    for (const Word& w : t.words()) dims[w.str()] = t.dim(w);
    return {{"depth", t.depth()}, {"total_dim", t.total_dim()}, {"dims", dims}};
}

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

inline UcpExtension build_extension(const Instance& inst, const std::string& mode, int depth) {
    if (mode == "boca") return boca_extend(inst.maps, inst.embeddings, inst.expectations, depth, inst.tol);
    return boca_extend_linear(inst.maps, inst.embeddings, depth, inst.tol);
}

inline double max_value_difference(const UcpExtension& a, const UcpExtension& b, const std::vector<FreeElement>& xs) {
    double worst = 0.0;
    for (const FreeElement& x : xs) {
        FreeElement y(b.context(), x.b_part(), x.terms());
        worst = std::max(worst, norm(evaluate_phi(a, x).value - evaluate_phi(b, y).value));
    }
    return worst;
}

} // namespace detail

/// Runs the instance's mode end to end and returns the report. Library errors
/// propagate; the caller maps them to exit codes.
inline RunResult run_scenario(Instance inst, const RunOptions& opt = {}) {
    using detail::Clock;
    if (opt.mode) inst.mode = *opt.mode;
    if (inst.mode != "boca" && inst.mode != "boca-linear" && inst.mode != "corollary") {
        throw ShapeError("run_scenario", "unknown mode '" + inst.mode + "'");
    }
    if (opt.depth) {
        if (*opt.depth < 1) throw ShapeError("run_scenario", "depth must be positive");
        inst.depth = *opt.depth;
    }
    if (opt.seed) inst.seed = *opt.seed;
    if (opt.check_tol) {
        inst.tol.check_tol = *opt.check_tol;
        inst.tol.validate();
    }
    if (inst.mode == "corollary" && inst.c_algebras.empty()) {
        throw ShapeError("run_scenario", "corollary mode needs corollary data in the instance");
    }
    if (inst.mode != "corollary" && !inst.c_algebras.empty()) {
        throw ShapeError("run_scenario", "instance holds corollary data; run it in corollary mode");
    }
    const Tolerances& tol = inst.tol;
    detail::Checks checks;
    json timings = json::object();
    json report;
    report["schema"] = kReportSchema;
    report["version"] = kVersion;
    report["instance"] = inst.name;
    report["mode"] = inst.mode;
    report["depth"] = inst.depth;
    report["seed"] = inst.seed;
    report["tolerances"] = {{"eig_tol", tol.eig_tol}, {"rank_tol", tol.rank_tol}, {"check_tol", tol.check_tol}};

    if (inst.mode == "corollary") {
        std::vector<Representation> sigma;
        for (const CPMap& m : inst.maps) sigma.push_back(as_representation(m));
        auto t0 = Clock::now();
        const RepresentationFamily f = extend_representations(sigma, inst.inclusions, inst.embeddings, inst.depth, tol);
        timings["build"] = detail::elapsed_ms(t0);
        checks.add("corollary.agreement", f.agreement_residual(), tol.check_tol);
        checks.add("corollary.compression", f.compression_residual(), tol.check_tol);
        checks.add("tower.recursion", f.tower().max_recursion_residual(), tol.check_tol);
        report["tower"] = detail::dims_json(f.tower());
        report["values"] = json::array();
    } else {
        auto t0 = Clock::now();
        const UcpExtension ext = detail::build_extension(inst, inst.mode, inst.depth);
        timings["build"] = detail::elapsed_ms(t0);
        const ContextPtr& ctx = ext.context();
        const Index h = ext.h();
        const int word_len = std::min(3, inst.depth);

        checks.add("restriction", ext.restriction_residual(), tol.check_tol);
        checks.add("unitality", norm(evaluate_phi(ext, FreeElement::unit(ctx)).value - CMatrix::Identity(h, h)), 1e-10);
        checks.add("tower.recursion", ext.tower().max_recursion_residual(), tol.check_tol);
        checks.add("tower.kernel_block", ext.tower().max_kernel_block_residual(), tol.check_tol);
        if (ext.linear_path()) {
            double worst = 0.0;
            for (const CMatrix& u : ext.unitaries()) {
                worst = std::max(worst, isometry_residual(u));
                worst = std::max(worst, norm(u.topLeftCorner(h, h) - CMatrix::Identity(h, h)));
            }
            checks.add("linear.unitaries", worst, tol.check_tol);
        }

        std::vector<FreeElement> elements;
        for (const ElementSpec& s : inst.elements) elements.push_back(to_free_element(s, ctx, tol));
        const std::vector<FreeWord> words = kernel_words(*ctx, word_len, tol);

        t0 = Clock::now();
        if (!ext.linear_path()) {
            double worst = 0.0;
            for (const FreeWord& w : words) worst = std::max(worst, verify_product_formula(ext, w, tol));
            checks.add("product_formula", worst, 1e-7);
        }
        timings["product_formula"] = detail::elapsed_ms(t0);

        t0 = Clock::now();
        json values = json::array();
        for (std::size_t k = 0; k < elements.size(); ++k) {
            const EvalReport r = evaluate_phi(ext, elements[k]);
            values.push_back({{"element", k},
                              {"value", matrix_to_json(r.value)},
                              {"depth_used", r.depth_used},
                              {"blocks_touched", r.blocks_touched}});
            if (const auto& want = inst.elements[k].expected) {
                if (want->rows() != r.value.rows() || want->cols() != r.value.cols()) {
                    throw ShapeError("run_scenario", "elements[" + std::to_string(k) + "].expected has the wrong shape");
                }
                checks.add("value." + std::to_string(k), norm(r.value - *want), tol.check_tol);
            }
        }
        report["values"] = values;
        timings["evaluate"] = detail::elapsed_ms(t0);

        if (opt.check_all) {
            t0 = Clock::now();
            detail::Random rng(inst.seed);
            std::vector<FreeElement> sample = elements;
            for (int k = 0; k < 8; ++k) sample.push_back(random_element(ctx, rng, word_len));

            double herm = 0.0;
            double idem = 0.0;
            double obs = 0.0;
            for (const FreeElement& x : sample) {
                herm = std::max(herm, norm(evaluate_phi(ext, free_adjoint(x)).value - evaluate_phi(ext, x).value.adjoint()));
                const FreeElement nf = normal_form(x);
                const FreeElement nf2 = normal_form(nf);
                if (!is_normal_form(nf, tol)) idem = std::numeric_limits<double>::max();
                idem = std::max(idem, norm(evaluate_phi(ext, nf2).value - evaluate_phi(ext, nf).value));
                obs = std::max(obs, norm(evaluate_phi(ext, nf).value - evaluate_phi(ext, x).value));
            }
            checks.add("hermiticity", herm, tol.check_tol);
            checks.add("normal_form.idempotence", idem, 1e-10);
            checks.add("normal_form.observational", obs, tol.check_tol);
            timings["invariants"] = detail::elapsed_ms(t0);

            t0 = Clock::now();
            const GramWitness g = ucp_gram_check(ext, gram_family(ctx, std::min(2, inst.depth / 2), 6, tol));
            checks.add("gram_witness", std::max(0.0, -g.min_eigenvalue), tol.check_tol);
            timings["gram_witness"] = detail::elapsed_ms(t0);

            t0 = Clock::now();
            const UcpExtension deeper = detail::build_extension(inst, inst.mode, inst.depth + 1);
            std::vector<FreeElement> probe = sample;
            for (const FreeWord& w : words) probe.push_back(FreeElement::from_word(ctx, w));
            checks.add("truncation", detail::max_value_difference(ext, deeper, probe), 1e-12);
            timings["truncation"] = detail::elapsed_ms(t0);

            if (!ext.linear_path()) {
                t0 = Clock::now();
                const UcpExtension other = detail::build_extension(inst, "boca-linear", inst.depth);
                checks.add("paths_agree", detail::max_value_difference(ext, other, probe), tol.check_tol);
                timings["paths_agree"] = detail::elapsed_ms(t0);
            }
        }
        report["tower"] = detail::dims_json(ext.tower());
    }

    RunResult out;
    out.checks = checks.records;
    out.pass = true;
    json recs = json::array();
    for (const CheckRecord& c : out.checks) {
        out.pass = out.pass && c.pass;
        recs.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    }
    report["checks"] = recs;
    report["pass"] = out.pass;
    report["timings_ms"] = timings;
    report["digest"] = report_digest(report);
    out.report = std::move(report);
    return out;
}

} // namespace boca
