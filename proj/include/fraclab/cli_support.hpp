#pragma once

#include <future>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/eigensolver.hpp"
#include "fraclab/extension.hpp"
#include "fraclab/potential_expr.hpp"
#include "fraclab/report.hpp"
#include "fraclab/semilinear.hpp"
#include "fraclab/verify.hpp"

namespace fraclab::cli {

struct BadConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Resolved invocation; embedded verbatim into every report.
struct RunConfig {
    std::string command;  // eigen | groundstate | verify | sweep | extend
    int N = 1;
    double s = 0.5;
    double p = 2.0;
    double lambda = 0.0;
    std::string V = "0";
    int n_basis = 48;
    int quad_order = 0;
    int grid_size = 400;
    std::uint64_t seed = 42;
    std::string format = "json";  // json | csv
    std::string only;             // verify suite filter
    bool tamper = false;          // verify self-test knob
    // sweep controls
    std::string axis;  // s | t | p | lambda
    double from = 0.0, to = 0.0;
    int steps = 0;
    // extend controls
    std::string target = "eigen";  // eigen | groundstate
    int k = 2;

    disc::Params params() const {
        try {
            return disc::Params(N, s, n_basis, quad_order);
        } catch (const std::exception& e) {
            throw BadConfig(e.what());
        }
    }

    void validate_common() const {
        if (N < 1 || N > 8) throw BadConfig("N must lie in [1, 8]");
        if (!(s > 0.0 && s < 1.0)) throw BadConfig("s must lie in (0,1), got " + std::to_string(s));
        if (grid_size < 64) throw BadConfig("grid-size must be at least 64");
        if (format != "json" && format != "csv") throw BadConfig("format must be json or csv");
        params();
    }

    report::Json to_json() const {
        auto j = report::Json::object();
        j.set("command", command)
            .set("N", N)
            .set("s", s)
            .set("p", p)
            .set("lambda", lambda)
            .set("V", V)
            .set("n_basis", n_basis)
            .set("quad_order", params().quad_order)
            .set("grid_size", grid_size)
            .set("seed", static_cast<std::int64_t>(seed))
            .set("format", format)
            .set("only", only);
        if (command == "sweep")
            j.set("axis", axis).set("from", from).set("to", to).set("steps", steps);
        if (command == "extend") j.set("target", target).set("k", k);
        return j;
    }
};

struct RunResult {
    int exit_code = 0;
    std::string payload;           // main report (json or csv)
    std::string aux_payload;       // extend: the field CSV
    std::string aux_name;          // suffix for the aux file
};

namespace detail {

inline int worker_budget() {
    if (const char* env = std::getenv("FRACLAB_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

inline report::Json eigen_payload(const RunConfig& cfg, const expr::PotentialExpr& pe,
                                  bool& flags_ok) {
    const auto params = cfg.params();
    const auto V = pe.to_profile();
    const auto es = eig::solve(V, std::min(params.n_basis, 6), params);
    const auto rep = eig::qualitative_report(es, cfg.grid_size);

    flags_ok = V.monotone_nondecreasing && rep.sign_changes_w2 == 1 && rep.hopf_value < 0.0 &&
               rep.integral_sign_product < 0.0 && rep.simplicity_gap > 1e-6 &&
               rep.w2_monotone_on_core;

    auto sig = report::Json::array();
    for (double v : es.sigmas) sig.push(v);
    auto j = report::Json::object();
    j.set("potential_certified_nondecreasing", V.monotone_nondecreasing)
        .set("sigmas", std::move(sig))
        .set("simplicity_gap", rep.simplicity_gap)
        .set("sign_changes_w2", rep.sign_changes_w2)
        .set("r0", rep.r0)
        .set("r0_error", rep.r0_error)
        .set("w2_monotone_on_core", rep.w2_monotone_on_core)
        .set("hopf_value", rep.hopf_value)
        .set("integral_sign_product", rep.integral_sign_product)
        .set("theorem_flags_hold", flags_ok);
    return j;
}

inline report::Json groundstate_payload(const RunConfig& cfg, bool& ok) {
    const auto params = cfg.params();
    auto gs = semi::ground_state(cfg.N, cfg.s, cfg.p, cfg.lambda, params);
    if (gs.converged) gs = semi::diagnostics(gs);
    ok = gs.converged && gs.sigma1 < -gs.lambda && gs.sigma2 > -gs.lambda &&
         gs.nondeg_margin > 0.0 && gs.psi_u1 > 0.0;
    auto j = report::Json::object();
    j.set("converged", gs.converged)
        .set("residual", gs.residual)
        .set("energy_level", gs.energy_level)
        .set("psi_u1", gs.psi_u1)
        .set("sigma1", gs.sigma1)
        .set("sigma2", gs.sigma2)
        .set("nondeg_margin_radial", gs.nondeg_margin)
        .set("pohozaev_residual", gs.pohozaev_residual)
        .set("u_at_0", disc::evaluate(gs.u, 0.0))
        .set("l2_mass", disc::integral(gs.u))
        .set("checks_hold", ok);
    return j;
}

}  // namespace detail

inline RunResult run_eigen(const RunConfig& cfg) {
    cfg.validate_common();
    expr::PotentialExpr pe;
    try {
        pe = expr::parse_potential(cfg.V);
    } catch (const std::exception& e) {
        throw BadConfig(e.what());
    }
    bool flags_ok = false;
    auto payload = detail::eigen_payload(cfg, pe, flags_ok);
    auto j = report::Json::object();
    j.set("config", cfg.to_json()).set("report", std::move(payload));

    RunResult res;
    res.exit_code = flags_ok ? 0 : 1;
    if (cfg.format == "csv") {
        report::Csv csv({"key", "value"});
        csv.add_row({"theorem_flags_hold", flags_ok ? "1" : "0"});
        res.payload = csv.dump();
    } else {
        res.payload = j.dump(2) + "\n";
    }
    return res;
}

inline RunResult run_groundstate(const RunConfig& cfg) {
    cfg.validate_common();
    try {
        semi::check_exponent(cfg.N, cfg.s, cfg.p);
        if (cfg.lambda < 0.0) throw BadConfig("lambda must be >= 0");
    } catch (const std::exception& e) {
        throw BadConfig(e.what());
    }
    bool ok = false;
    auto payload = detail::groundstate_payload(cfg, ok);
    auto j = report::Json::object();
    j.set("config", cfg.to_json()).set("report", std::move(payload));
    RunResult res;
    res.exit_code = ok ? 0 : 1;
    res.payload = j.dump(2) + "\n";
    return res;
}

inline RunResult run_verify(const RunConfig& cfg) {
    cfg.validate_common();
    static const std::vector<std::string> suites{"specfun",        "kernel",    "discretization",
                                                 "eigensolver",    "symmetrization", "extension",
                                                 "semilinear"};
    if (!cfg.only.empty() &&
        std::find(suites.begin(), suites.end(), cfg.only) == suites.end())
        throw BadConfig("unknown suite for --only: " + cfg.only);

    verify::Options opt;
    opt.seed = cfg.seed;
    opt.only = cfg.only;
    opt.tamper_stiffness = cfg.tamper;
    const auto records = verify::run_suites(opt);

    RunResult res;
    res.exit_code = verify::all_pass(records) ? 0 : 1;
    if (cfg.format == "csv") {
        report::Csv csv({"check_id", "paper_anchor", "status", "measured", "tolerance"});
        for (const auto& r : records)
            csv.add_row({r.check_id, r.paper_anchor, r.status, report::format_double(r.measured),
                         report::format_double(r.tolerance)});
        res.payload = csv.dump();
    } else {
        auto arr = report::Json::array();
        for (const auto& r : records) {
            auto rec = report::Json::object();
            rec.set("check_id", r.check_id)
                .set("paper_anchor", r.paper_anchor)
                .set("status", r.status)
                .set("measured", r.measured)
                .set("tolerance", r.tolerance);
            if (!r.detail.empty()) rec.set("detail", r.detail);
            arr.push(std::move(rec));
        }
        auto j = report::Json::object();
        j.set("config", cfg.to_json())
            .set("all_pass", verify::all_pass(records))
            .set("checks", std::move(arr));
        res.payload = j.dump(2) + "\n";
    }
    return res;
}

inline RunResult run_sweep(const RunConfig& cfg) {
    cfg.validate_common();
    if (cfg.axis != "s" && cfg.axis != "t" && cfg.axis != "p" && cfg.axis != "lambda")
        throw BadConfig("sweep axis must be one of s, t, p, lambda");
    if (cfg.steps < 1) throw BadConfig("sweep needs steps >= 1");
    expr::PotentialExpr pe;
    try {
        pe = expr::parse_potential(cfg.V);
    } catch (const std::exception& e) {
        throw BadConfig(e.what());
    }

    const bool eigen_axis = (cfg.axis == "s" || cfg.axis == "t");
    std::vector<double> axis_values(cfg.steps + 1);
    for (int i = 0; i <= cfg.steps; ++i)
        axis_values[i] = cfg.from + (cfg.to - cfg.from) * i / cfg.steps;

    struct Row {
        double value = 0.0;
        bool ok = false;
        std::string error;
        std::vector<std::pair<std::string, double>> fields;
    };
    std::vector<Row> rows(axis_values.size());

    auto compute_row = [&](int i) {
        Row& row = rows[i];
        row.value = axis_values[i];
        try {
            if (eigen_axis) {
                RunConfig c = cfg;
                double scale = 1.0;
                if (cfg.axis == "s") c.s = row.value;
                else scale = row.value;
                const auto params = c.params();
                disc::PotentialProfile V = pe.to_profile();
                if (cfg.axis == "t") {
                    auto base = pe;
                    V.eval = [base, scale](double r) { return scale * base.eval(r); };
                    V.monotone_nondecreasing =
                        base.monotone_certified() && scale >= 0.0;
                }
                const auto es = eig::solve(V, 3, params);
                const auto rep = eig::qualitative_report(es, cfg.grid_size);
                row.fields = {{"sigma1", es.sigmas[0]},
                              {"sigma2", es.sigmas[1]},
                              {"sigma3", es.sigmas[2]},
                              {"sign_changes_w2", static_cast<double>(rep.sign_changes_w2)},
                              {"hopf_value", rep.hopf_value},
                              {"integral_sign_product", rep.integral_sign_product}};
                row.ok = true;
            } else {
                RunConfig c = cfg;
                if (cfg.axis == "p") c.p = row.value;
                if (cfg.axis == "lambda") c.lambda = row.value;
                semi::check_exponent(c.N, c.s, c.p);
                auto gs = semi::ground_state(c.N, c.s, c.p, c.lambda, c.params());
                if (gs.converged) gs = semi::diagnostics(gs);
                row.fields = {{"converged", gs.converged ? 1.0 : 0.0},
                              {"residual", gs.residual},
                              {"psi_u1", gs.psi_u1},
                              {"sigma1", gs.sigma1},
                              {"sigma2", gs.sigma2},
                              {"nondeg_margin_radial", gs.nondeg_margin},
                              {"pohozaev_residual", gs.pohozaev_residual}};
                row.ok = gs.converged;
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };

    const int workers = std::min(detail::worker_budget(), static_cast<int>(rows.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) compute_row(static_cast<int>(i));
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < static_cast<int>(rows.size());
                     i = next.fetch_add(1))
                    compute_row(i);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<std::string> header{cfg.axis, "status"};
    if (!rows.empty() && !rows.front().fields.empty())
        for (const auto& [k, v] : rows.front().fields) header.push_back(k);
    report::Csv csv(header);
    bool any_fail = false;
    for (const auto& row : rows) {  // ordered by parameter value
        std::vector<std::string> cells{report::format_double(row.value),
                                       row.ok ? "ok" : ("fail:" + row.error)};
        for (const auto& [k, v] : row.fields) cells.push_back(report::format_double(v));
        csv.add_row(cells);
        any_fail = any_fail || !row.ok;
    }
    RunResult res;
    res.exit_code = any_fail ? 1 : 0;
    res.payload = csv.dump();
    return res;
}

inline RunResult run_extend(const RunConfig& cfg) {
    cfg.validate_common();
    if (cfg.target != "eigen" && cfg.target != "groundstate")
        throw BadConfig("extend target must be eigen or groundstate");
    if (cfg.target == "eigen" && (cfg.k < 1 || cfg.k > cfg.n_basis))
        throw BadConfig("extend needs 1 <= k <= n_basis");
    expr::PotentialExpr pe;
    try {
        pe = expr::parse_potential(cfg.V);
    } catch (const std::exception& e) {
        throw BadConfig(e.what());
    }

    const auto params = cfg.params();
    disc::RadialFunction w;
    if (cfg.target == "eigen") {
        const auto es = eig::solve(pe.to_profile(), std::max(cfg.k, 2), params);
        w = es.functions[cfg.k - 1];
    } else {
        auto gs = semi::ground_state(cfg.N, cfg.s, cfg.p, cfg.lambda, params);
        if (!gs.converged) throw std::runtime_error("extend: ground state did not converge");
        w = gs.u;
    }

    const auto field = ext::poisson_extend(w, ext::uniform_grid(4.0, cfg.grid_size),
                                           ext::uniform_grid(4.0, cfg.grid_size));
    report::Csv dump({"r", "t", "W"});
    for (std::size_t i = 0; i < field.r_grid.size(); ++i)
        for (std::size_t j = 0; j < field.t_grid.size(); ++j)
            dump.add_row({report::format_double(field.r_grid[i]),
                          report::format_double(field.t_grid[j]),
                          report::format_double(field.values(i, j))});

    auto j = report::Json::object();
    auto tails = report::Json::object();
    for (double t : {10.0, 50.0, 100.0})
        tails.set("t" + std::to_string(static_cast<int>(t)), ext::tail_moment(w, t));
    j.set("config", cfg.to_json());
    auto rep = report::Json::object();
    rep.set("nodal_count", ext::nodal_count(field))
        .set("nodal_count_eps_1e6", ext::nodal_count(field, 1e-6))
        .set("nodal_count_eps_1e8", ext::nodal_count(field, 1e-8))
        .set("components_touch_trace", ext::components_touch_trace(field))
        .set("tail_moment", std::move(tails))
        .set("extension_consistency_residual", ext::extension_consistency(w, 0.5));
    j.set("report", std::move(rep));

    RunResult res;
    res.payload = j.dump(2) + "\n";
    res.aux_payload = dump.dump();
    res.aux_name = ".field.csv";
    return res;
}

inline RunResult dispatch(const RunConfig& cfg) {
    if (cfg.command == "eigen") return run_eigen(cfg);
    if (cfg.command == "groundstate") return run_groundstate(cfg);
    if (cfg.command == "verify") return run_verify(cfg);
    if (cfg.command == "sweep") return run_sweep(cfg);
    if (cfg.command == "extend") return run_extend(cfg);
    throw BadConfig("unknown command: " + cfg.command);
}

}  // namespace fraclab::cli
