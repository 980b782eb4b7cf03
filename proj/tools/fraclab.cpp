#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fraclab/cli_support.hpp"

namespace {

int write_outputs(const fraclab::cli::RunResult& res, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(res.payload.c_str(), stdout);
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            std::fprintf(stderr, "cannot open output path: %s\n", out_path.c_str());
            return 2;
        }
        f << res.payload;
    }
    if (!res.aux_payload.empty()) {
        const std::string aux =
            (out_path.empty() ? std::string("fraclab") : out_path) + res.aux_name;
        std::ofstream f(aux, std::ios::binary);
        if (!f) {
            std::fprintf(stderr, "cannot open output path: %s\n", aux.c_str());
            return 2;
        }
        f << res.aux_payload;
    }
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclab: radial fractional Dirichlet laboratory on the unit ball"};
    app.require_subcommand(1);

    fraclab::cli::RunConfig cfg;
    std::string out_path;

    auto add_flags = [&](CLI::App* sub) {
        sub->add_option("--N", cfg.N, "space dimension");
        sub->add_option("--s", cfg.s, "fractional order in (0,1)");
        sub->add_option("--p", cfg.p, "nonlinearity exponent");
        sub->add_option("--lambda", cfg.lambda, "zero-order coefficient (>= 0)");
        sub->add_option("--V", cfg.V, "radial potential expression");
        sub->add_option("--n-basis", cfg.n_basis, "spectral basis size");
        sub->add_option("--quad-order", cfg.quad_order, "quadrature order (0 derives it)");
        sub->add_option("--grid-size", cfg.grid_size, "evaluation/field grid cells");
        sub->add_option("--seed", cfg.seed, "seed for randomized checks");
        sub->add_option("--out", out_path, "output file (stdout if omitted)");
        sub->add_option("--format", cfg.format, "json or csv");
    };

    auto* eigen = app.add_subcommand("eigen", "solve the radial eigenproblem and check the "
                                              "second-eigenfunction shape properties");
    add_flags(eigen);

    auto* ground = app.add_subcommand("groundstate", "compute the semilinear ground state with "
                                                     "its diagnostic battery");
    add_flags(ground);

    auto* verify = app.add_subcommand("verify", "run the numerical verification suite");
    add_flags(verify);
    verify->add_option("--only", cfg.only, "restrict to one suite");
    verify->add_flag("--self-test-tamper", cfg.tamper,
                     "perturb a stiffness entry to confirm the harness trips");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep with one CSV row per value");
    add_flags(sweep);
    sweep->add_option("--axis", cfg.axis, "s | t (potential scale) | p | lambda")->required();
    sweep->add_option("--from", cfg.from, "axis start")->required();
    sweep->add_option("--to", cfg.to, "axis end")->required();
    sweep->add_option("--steps", cfg.steps, "number of steps")->required();

    auto* extend = app.add_subcommand("extend", "sample the harmonic extension field and its "
                                                "nodal/tail diagnostics");
    add_flags(extend);
    extend->add_option("--target", cfg.target, "eigen | groundstate");
    extend->add_option("--k", cfg.k, "which eigenfunction to extend (1-based)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "sweep" && cfg.format == "json") cfg.format = "csv";

    try {
        const auto res = fraclab::cli::dispatch(cfg);
        return write_outputs(res, out_path);
    } catch (const fraclab::cli::BadConfig& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
