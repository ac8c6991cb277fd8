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

// Command-line front end.
//
//   boca run <instance.json> [--mode M] [--depth L] [--seed S] [--tol T]
//            [--report out.json] [--check-all]
//   boca gen --seed S [--profile default|linear-only|compact] [-o out.json]
//
// Exit codes: 0 all checks pass, 1 I/O or schema error, 2 hypothesis
// rejected, 3 the run finished but a check failed or a post-condition broke.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "boca/scenario.hpp"

namespace {

enum Exit { kPass = 0, kIo = 1, kHypothesis = 2, kCheck = 3 };

bool write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

int fail(const std::optional<std::string>& report_path, const std::string& kind, const boca::Error& e, int code) {
    std::cerr << "error: " << e.what() << "\n";
    if (report_path) {
        boca::json r;
        r["schema"] = boca::kReportSchema;
        r["version"] = boca::kVersion;
        r["pass"] = false;
        r["error"] = {{"kind", kind}, {"operation", e.operation()}, {"message", e.what()}};
        if (e.residual() >= 0.0) r["error"]["residual"] = e.residual();
        if (!write_text(*report_path, r.dump(2) + "\n")) {
            std::cerr << "error: cannot write " << *report_path << "\n";
            return kIo;
        }
    }
    return code;
}

int run(const std::string& path, const boca::RunOptions& opt, const std::optional<std::string>& report_path) {
    try {
        const boca::RunResult res = boca::run_scenario(boca::load_instance_file(path), opt);
        for (const boca::CheckRecord& c : res.checks) {
            std::cout << (c.pass ? "ok   " : "FAIL ") << c.name << "  residual " << c.residual << "  tol "
                      << c.tolerance << "\n";
        }
        std::cout << (res.pass ? "pass" : "fail") << "\n";
        const char* digest = std::getenv("REPORT_DIGEST");
        if (digest && std::string(digest) == "1") {
            std::cout << "digest " << res.report.at("digest").get<std::string>() << "\n";
        }
        if (report_path && !write_text(*report_path, res.report.dump(2) + "\n")) {
            std::cerr << "error: cannot write " << *report_path << "\n";
            return kIo;
        }
        return res.pass ? kPass : kCheck;
    } catch (const boca::ShapeError& e) {
        return fail(report_path, "schema", e, kIo);
    } catch (const boca::HypothesisError& e) {
        return fail(report_path, "hypothesis", e, kHypothesis);
    } catch (const boca::DepthError& e) {
        return fail(report_path, "depth", e, kHypothesis);
    } catch (const boca::CapacityError& e) {
        return fail(report_path, "capacity", e, kHypothesis);
    } catch (const boca::Error& e) {
        return fail(report_path, "internal", e, kCheck);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extensions of UCP maps to amalgamated free products"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Run an instance file and its checks");
    std::string path;
    std::optional<std::string> mode;
    std::optional<int> depth;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<std::string> report;
    bool check_all = false;
    run_cmd->add_option("instance", path, "Instance JSON file")->required();
    run_cmd->add_option("--mode", mode, "boca, boca-linear or corollary")
        ->check(CLI::IsMember({"boca", "boca-linear", "corollary"}));
    run_cmd->add_option("--depth", depth, "Tower depth L")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", seed, "Seed for the sampled invariant checks");
    run_cmd->add_option("--tol", tol, "Check tolerance")->check(CLI::PositiveNumber);
    run_cmd->add_option("--report", report, "Write the JSON report here");
    run_cmd->add_flag("--check-all", check_all, "Run every invariant suite");

    auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded random instance");
    std::uint64_t gen_seed = 0;
    std::string profile = "default";
    std::optional<std::string> output;
    gen_cmd->add_option("--seed", gen_seed, "Random seed")->required();
    gen_cmd->add_option("--profile", profile, "default, linear-only or compact")
        ->check(CLI::IsMember({"default", "linear-only", "compact"}));
    gen_cmd->add_option("-o,--output", output, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kIo;
    }

    if (*run_cmd) {
        boca::RunOptions opt;
        opt.mode = mode;
        opt.depth = depth;
        opt.seed = seed;
        opt.check_tol = tol;
        opt.check_all = check_all;
        return run(path, opt, report);
    }
    try {
        const std::string text = boca::generate_instance(gen_seed, boca::generator_profile(profile)).dump(2) + "\n";
        if (!output) {
            std::cout << text;
        } else if (!write_text(*output, text)) {
            std::cerr << "error: cannot write " << *output << "\n";
            return kIo;
        }
    } catch (const boca::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheck;
    }
    return kPass;
}
