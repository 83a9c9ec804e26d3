#include <string>

#include <doctest.h>

#include "config.hpp"
#include "error.hpp"

using namespace lyapnet;

namespace {

const char* k2dConfig = R"({
  "system": {"builtin": "example_2d"},
  "net": {"n_sub": 2, "d_max": 1, "m_per": 128},
  "loss": {"kind": "pdi", "nu": 1.0, "c1": 0.1, "c2": 10.0, "power": 2},
  "train": {"m": 200000, "batch_size": 32, "max_epochs": 30, "tol": 1e-6, "seed": 1},
  "outputs": {"checkpoint": "out/ckpt.json", "report": "out/report.json"}
})";

}  // namespace

TEST_CASE("config: full parse of the 2-d experiment") {
    const RunConfig cfg = RunConfig::parse_string(k2dConfig);
    CHECK(cfg.net.n == 2);
    CHECK(cfg.net.n_sub == 2);
    CHECK(cfg.net.m_per == 128);
    CHECK(param_count(cfg.net) == 775);
    CHECK(cfg.loss.kind == LossKind::pdi);
    CHECK(cfg.loss.bounds.c1 == 0.1);
    CHECK(cfg.train.m == 200000);
    CHECK(cfg.train.seed == 1);
    CHECK(cfg.checkpoint_path == "out/ckpt.json");

    const VectorField vf = cfg.make_field();
    CHECK(vf.dim() == 2);
}

TEST_CASE("config: defaults are materialized") {
    const RunConfig cfg = RunConfig::parse_string(R"({
      "system": {"n": 1, "expressions": ["-x1"]},
      "net": {"n_sub": 1, "d_max": 1, "m_per": 4},
      "loss": {"kind": "pdi", "c1": 0.1, "c2": 10.0},
      "train": {"m": 64, "max_epochs": 2, "seed": 3},
      "outputs": {"checkpoint": "c.json", "report": "r.json"}
    })");
    CHECK(cfg.loss.nu == 1.0);
    CHECK(cfg.loss.bounds.power == 2.0);
    CHECK(cfg.train.batch_size == 32);
    CHECK(cfg.train.tol == 1e-6);
    CHECK(cfg.net.n == 1);
}

TEST_CASE("config: echo normalization is idempotent") {
    const RunConfig cfg = RunConfig::parse_string(k2dConfig);
    const std::string echo = cfg.echo_json();
    const RunConfig reparsed = RunConfig::parse_string(echo);
    CHECK(reparsed.echo_json() == echo);
}

TEST_CASE("config: unknown fields are rejected with a path") {
    try {
        RunConfig::parse_string(R"({
          "system": {"builtin": "example_2d"},
          "net": {"n_sub": 2, "d_max": 1, "m_per": 8, "depth": 3},
          "loss": {"kind": "pdi", "c1": 0.1, "c2": 10.0},
          "train": {"m": 64, "max_epochs": 1, "seed": 1},
          "outputs": {"checkpoint": "c", "report": "r"}
        })");
        FAIL("expected schema error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::schema);
        CHECK(std::string(e.what()).find("depth") != std::string::npos);
    }
}

TEST_CASE("config: bad loss kind names the field") {
    try {
        RunConfig::parse_string(R"({
          "system": {"builtin": "example_2d"},
          "net": {"n_sub": 2, "d_max": 1, "m_per": 8},
          "loss": {"kind": "bogus", "c1": 0.1, "c2": 10.0},
          "train": {"m": 64, "max_epochs": 1, "seed": 1},
          "outputs": {"checkpoint": "c", "report": "r"}
        })");
        FAIL("expected schema error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::schema);
        CHECK(std::string(e.what()).find("loss.kind") != std::string::npos);
    }
}

TEST_CASE("config: expression system with transform") {
    const RunConfig cfg = RunConfig::parse_string(R"({
      "system": {"n": 2, "expressions": ["-x1", "-2*x2"], "transform": [[0, 1], [1, 0]]},
      "net": {"n_sub": 2, "d_max": 1, "m_per": 4},
      "loss": {"kind": "pde", "c1": 0.5, "c2": 2.0},
      "train": {"m": 32, "max_epochs": 1, "seed": 9},
      "outputs": {"checkpoint": "c", "report": "r"}
    })");
    const VectorField vf = cfg.make_field();
    REQUIRE(vf.has_transform());
    // f(x) = T^-1 fhat(Tx) with T the swap: components exchange roles
    const std::vector<double> x{3.0, 5.0};
    const std::vector<double> fx = vf.eval(x);
    CHECK(fx[0] == -2.0 * 3.0);
    CHECK(fx[1] == -5.0);
}

TEST_CASE("config: structural errors") {
    CHECK_THROWS_AS(RunConfig::parse_string("not json"), Error);
    CHECK_THROWS_AS(RunConfig::parse_string("[]"), Error);

    // missing required block
    try {
        RunConfig::parse_string(R"({
          "system": {"builtin": "example_2d"},
          "net": {"n_sub": 2, "d_max": 1, "m_per": 8},
          "train": {"m": 64, "max_epochs": 1, "seed": 1},
          "outputs": {"checkpoint": "c", "report": "r"}
        })");
        FAIL("expected schema error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("loss") != std::string::npos);
    }

    // expression count must match the dimension
    CHECK_THROWS_AS(RunConfig::parse_string(R"({
      "system": {"n": 2, "expressions": ["-x1"]},
      "net": {"n_sub": 1, "d_max": 1, "m_per": 4},
      "loss": {"kind": "pdi", "c1": 0.1, "c2": 10.0},
      "train": {"m": 64, "max_epochs": 1, "seed": 1},
      "outputs": {"checkpoint": "c", "report": "r"}
    })"),
                    Error);

    // unknown builtin
    CHECK_THROWS_AS(RunConfig::parse_string(R"({
      "system": {"builtin": "example_3d"},
      "net": {"n_sub": 1, "d_max": 1, "m_per": 4},
      "loss": {"kind": "pdi", "c1": 0.1, "c2": 10.0},
      "train": {"m": 64, "max_epochs": 1, "seed": 1},
      "outputs": {"checkpoint": "c", "report": "r"}
    })"),
                    Error);
}

TEST_CASE("config: report documents embed the normalized config") {
    const RunConfig cfg = RunConfig::parse_string(k2dConfig);
    TrainReport report;
    report.epochs_run = 2;
    report.converged = false;
    report.history = {{0.5, 1.5}, {0.25, 0.75}};
    report.wall_time_seconds = 1.25;
    report.checkpoint_path = cfg.checkpoint_path;
    const std::string doc = make_run_report_json(cfg, report);
    CHECK(doc.find("\"converged\": false") != std::string::npos);
    CHECK(doc.find("\"history\"") != std::string::npos);
    CHECK(doc.find("\"builtin\": \"example_2d\"") != std::string::npos);
    CHECK(doc.find("\"wall_time_seconds\"") != std::string::npos);
}
