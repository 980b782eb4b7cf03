#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "fraclab/cli_support.hpp"
#include "fraclab/potential_expr.hpp"

using namespace fraclab;

TEST_CASE("potential grammar parses the spec family") {
    for (auto [text, at_half, mono] :
         {std::tuple{"0", 0.0, true},
          {"r^2", 0.25, true},
          {"10*r^2", 2.5, true},
          {"25*r^4", 25.0 * 0.0625, true},
          {"step(r-0.5)", 1.0, true},
          {"1 + 2*r^2 + step(r-0.25)", 2.5, true},
          {"3 - 2*r^2", 2.5, false},
          {"-1 + r", -0.5, true}}) {
        const auto pe = expr::parse_potential(text);
        INFO(text);
        CHECK_THAT(pe.eval(0.5), Catch::Matchers::WithinAbs(at_half, 1e-14));
        CHECK(pe.monotone_certified() == mono);
    }
    CHECK(expr::parse_potential("step(r-0.5)").eval(0.49) == 0.0);
    CHECK(expr::parse_potential("step(r-0.5)").breakpoints() == std::vector<double>{0.5});

    CHECK_THROWS_AS(expr::parse_potential(""), std::invalid_argument);
    CHECK_THROWS_AS(expr::parse_potential("r^"), std::invalid_argument);
    CHECK_THROWS_AS(expr::parse_potential("q"), std::invalid_argument);
    CHECK_THROWS_AS(expr::parse_potential("1 +"), std::invalid_argument);
    CHECK_THROWS_AS(expr::parse_potential("r^2.5"), std::invalid_argument);
    CHECK_THROWS_AS(expr::parse_potential("step(x-0.5)"), std::invalid_argument);
}

TEST_CASE("json writer is deterministic and ordered") {
    auto make = [] {
        auto j = report::Json::object();
        j.set("b", 1.0 / 3.0).set("a", true).set("list", report::Json::array());
        auto arr = report::Json::array();
        arr.push(1e-17).push("x\"y\n").push(nullptr);
        j.set("vals", std::move(arr));
        return j.dump(2);
    };
    CHECK(make() == make());
    CHECK(make().find("0.33333333333333331") != std::string::npos);  // 17 significant digits
    // insertion order preserved (b before a)
    CHECK(make().find("\"b\"") < make().find("\"a\""));
    // parseable by an independent JSON implementation
    CHECK_NOTHROW(nlohmann::json::parse(make()));
}

TEST_CASE("eigen runner: flags, exit codes, invalid configs") {
    cli::RunConfig cfg;
    cfg.command = "eigen";
    cfg.N = 1;
    cfg.s = 0.5;
    cfg.n_basis = 32;
    cfg.grid_size = 256;

    auto res = cli::run_eigen(cfg);
    CHECK(res.exit_code == 0);
    const auto j = nlohmann::json::parse(res.payload);
    CHECK(j["report"]["sign_changes_w2"] == 1);
    CHECK(j["report"]["hopf_value"].get<double>() < 0.0);

    cfg.s = 1.5;
    CHECK_THROWS_AS(cli::run_eigen(cfg), cli::BadConfig);
    cfg.s = 0.5;
    cfg.V = "nonsense(";
    CHECK_THROWS_AS(cli::run_eigen(cfg), cli::BadConfig);

    // a decreasing potential carries no certificate: flags cannot pass
    cfg.V = "3 - 2*r^2";
    const auto res2 = cli::run_eigen(cfg);
    CHECK(res2.exit_code == 1);
}

TEST_CASE("config round-trip: report embeds the resolved config") {
    cli::RunConfig cfg;
    cfg.command = "eigen";
    cfg.N = 2;
    cfg.s = 0.75;
    cfg.V = "10*r^2";
    cfg.n_basis = 24;
    cfg.grid_size = 256;
    const auto res = cli::run_eigen(cfg);
    const auto j = nlohmann::json::parse(res.payload);

    cli::RunConfig back;
    back.command = j["config"]["command"];
    back.N = j["config"]["N"];
    back.s = j["config"]["s"];
    back.p = j["config"]["p"];
    back.lambda = j["config"]["lambda"];
    back.V = j["config"]["V"];
    back.n_basis = j["config"]["n_basis"];
    back.quad_order = j["config"]["quad_order"];
    back.grid_size = j["config"]["grid_size"];
    back.seed = j["config"]["seed"];
    back.format = j["config"]["format"];

    const auto res2 = cli::run_eigen(back);
    CHECK(res2.payload == res.payload);
}

TEST_CASE("verify runner: determinism and suite filter") {
    cli::RunConfig cfg;
    cfg.command = "verify";
    cfg.only = "specfun";
    cfg.seed = 42;
    const auto a = cli::run_verify(cfg);
    const auto b = cli::run_verify(cfg);
    CHECK(a.exit_code == 0);
    CHECK(a.payload == b.payload);  // byte-identical

    cfg.seed = 43;
    const auto c = cli::run_verify(cfg);
    CHECK(c.exit_code == 0);

    cfg.only = "no-such-suite";
    CHECK_THROWS_AS(cli::run_verify(cfg), cli::BadConfig);
}

TEST_CASE("verify runner: fault injection trips the boundary-identity check") {
    cli::RunConfig cfg;
    cfg.command = "verify";
    cfg.only = "discretization";
    cfg.tamper = true;
    const auto res = cli::run_verify(cfg);
    CHECK(res.exit_code == 1);
    const auto j = nlohmann::json::parse(res.payload);
    bool pohozaev_failed = false;
    for (const auto& rec : j["checks"]) {
        if (rec["check_id"] == "discretization.pohozaev-basis")
            pohozaev_failed = (rec["status"] == "fail");
    }
    CHECK(pohozaev_failed);
}

TEST_CASE("sweep runner: ordered rows and axis validation") {
    cli::RunConfig cfg;
    cfg.command = "sweep";
    cfg.axis = "t";
    cfg.from = 0.0;
    cfg.to = 1.0;
    cfg.steps = 4;
    cfg.V = "25*r^4";
    cfg.N = 1;
    cfg.s = 0.5;
    cfg.n_basis = 24;
    cfg.grid_size = 256;
    const auto res = cli::run_sweep(cfg);
    CHECK(res.exit_code == 0);
    // one header + 5 rows, ordered by the axis value
    std::size_t lines = std::count(res.payload.begin(), res.payload.end(), '\n');
    CHECK(lines == 6);
    CHECK(res.payload.find("sign_changes_w2") != std::string::npos);

    cfg.axis = "bogus";
    CHECK_THROWS_AS(cli::run_sweep(cfg), cli::BadConfig);
}
