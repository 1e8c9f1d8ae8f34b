#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "kpzlab/config.hpp"
#include "kpzlab/fbm.hpp"
#include "kpzlab/trajectory_io.hpp"

using namespace kpzlab;

namespace {

bool mentions(const ConfigError& e, const std::string& needle)
{
    return std::any_of(e.violations().begin(), e.violations().end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

const char* kFbmConfig = R"(
experiment.kind = simulate-fbm
grid.t_start = 0
grid.t_end = 2
grid.nt = 2000
run.seed = 5
)";

}  // namespace

TEST_CASE("minimal fbm config gets defaults and round-trips through its echo")
{
    const ExperimentConfig c = parse_config(kFbmConfig);
    CHECK(c.kind == ExperimentKind::SimulateFbm);
    CHECK(c.seed == 5);
    CHECK(c.replicas == 1);
    CHECK(c.threads == 1);
    CHECK(c.hurst == 0.25);
    CHECK(c.grid.nx == 768);
    CHECK(c.grid.dt() == doctest::Approx(0.001));

    const std::string echo = c.echo();
    CHECK(echo.find("run.seed = 5") != std::string::npos);
    CHECK(parse_config(echo).echo() == echo);
}

TEST_CASE("sectioned and dotted keys are equivalent")
{
    const ExperimentConfig a = parse_config("[run]\nseed = 9\nreplicas = 4\n[grid]\nnt = 100\n");
    const ExperimentConfig b = parse_config("run.seed = 9\nrun.replicas = 4\ngrid.nt = 100\n");
    CHECK(a.echo() == b.echo());
}

TEST_CASE("epsilon must be a whole multiple of dt")
{
    const std::string base = std::string(kFbmConfig) + "stats.alpha = 4\n";
    CHECK_NOTHROW(parse_config(base + "stats.epsilon = 0.003\n"));
    try {
        (void)parse_config(base + "stats.epsilon = 0.0035\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "stats.epsilon 0.0035"));
    }
    const ExperimentConfig list = parse_config(base + "stats.epsilon = 0.002, 0.004, 0.008\n");
    CHECK(list.stats.epsilon.size() == 3);
}

TEST_CASE("all violations are collected")
{
    try {
        (void)parse_config("stats.epslion = 0.1\nrun.replicas = 0\ngrid.nx = 0\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "epslion"));
        CHECK(mentions(e, "run.seed"));
        CHECK(mentions(e, "run.replicas"));
        CHECK(mentions(e, "grid"));
        CHECK(std::string(e.what()).find("epslion") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("run.seed = 1\nrun.replicas = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("run.seed = 1\ngrid.nx = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("run.seed = 1\nic.kind = parabola\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("run.seed = 1\nverify.criteria = 12\n", ExperimentKind::Verify),
                    ConfigError);
}

TEST_CASE("overrides and kind override")
{
    const ExperimentConfig c =
        parse_config(kFbmConfig, ExperimentKind::Stats,
                     {{"run.seed", "77"}, {"run.threads", "3"}, {"stats.input", "paths.csv"}});
    CHECK(c.kind == ExperimentKind::Stats);
    CHECK(c.seed == 77);
    CHECK(c.threads == 3);
    CHECK_THROWS_AS(parse_config(kFbmConfig, std::nullopt, {{"run.bogus", "1"}}), ConfigError);
}

TEST_CASE("initial data keys")
{
    const ExperimentConfig c = parse_config(
        "run.seed = 1\nic.kind = function\nic.expr = -|x|\nhyp.theta = 1\nhyp.delta = 0.5\n"
        "hyp.lambda = 1\nhyp.kappa = 1\nhyp.M = 2\n");
    CHECK(c.ic.kind == InitialKind::FunctionIC);
    CHECK(c.ic.expr == "-|x|");
    REQUIRE(c.hyp.has_value());
    CHECK(c.hyp->M == 2.0);
    CHECK_THROWS_AS(parse_config("run.seed = 1\nic.kind = function\n"), ConfigError);
    CHECK(parse_config("run.seed = 1\nic.kind = nw\n").ic.kind == InitialKind::NarrowWedge);
}

TEST_CASE("narrow wedge smoothing time and statistics interval are checked against the grid")
{
    try {
        parse_config("run.seed = 1\ngrid.t_start = 0\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "smoothing time"));
    }
    try {
        parse_config("run.seed = 1\nic.t0 = 0.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "must equal ic.t0"));
    }
    try {
        parse_config("run.seed = 1\nstats.alpha = 4\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "stats.interval"));
    }
    CHECK_NOTHROW(parse_config("run.seed = 1\nstats.alpha = 4\nstats.interval = 0.5, 1\n"));
    CHECK_THROWS_AS(load_config("/nonexistent/kpzlab.ini"), ConfigError);
}

TEST_CASE("trajectory container round trip")
{
    const GridSpec g = make_grid(-4, 4, 64, 0.125, 0.375, 32, {.override_boundary_guard = true});
    const auto traj = solve(g, InitialDatum::narrow_wedge(0.125), sample_noise(g, 3, 2),
                            SolveMode::Multiplicative, {.snapshot_times = {0.25, 0.375}});
    std::stringstream buf;
    write_trajectory(buf, traj);
    const Trajectory back = read_trajectory(buf);
    CHECK(back.grid == traj.grid);
    CHECK(back.ic.kind == InitialKind::NarrowWedge);
    CHECK(back.ic.t0 == 0.125);
    CHECK(back.mode == traj.mode);
    CHECK(back.origin_path.values == traj.origin_path.values);
    CHECK(back.origin_log_path.values == traj.origin_log_path.values);
    REQUIRE(back.snapshots.size() == 2);
    CHECK(back.snapshots[1].values == traj.snapshots[1].values);
    CHECK(back.snapshots[1].t_abs == traj.snapshots[1].t_abs);

    std::stringstream bad("KPZX garbage");
    CHECK_THROWS_AS(read_trajectory(bad), InputError);

    Trajectory fn = traj;
    fn.ic = InitialDatum::from_function(SampleTable({-1, 0, 1}, {0, 1, 0}));
    std::stringstream buf2;
    write_trajectory(buf2, fn);
    const Trajectory fn_back = read_trajectory(buf2);
    REQUIRE(fn_back.ic.function.has_value());
    CHECK(evaluate(*fn_back.ic.function, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("paths CSV round trip is exact")
{
    std::vector<Path> paths;
    for (std::uint64_t r = 0; r < 3; ++r) paths.push_back(sample_fbm_circulant(0.25, 64, 1.0 / 64, 4, r));
    std::stringstream buf;
    write_paths_csv(buf, paths, {2, 5, 9});
    std::string header;
    std::getline(buf, header);
    CHECK(header == "replica,t,value");
    buf.seekg(0);
    const auto back = read_paths_csv(buf);
    REQUIRE(back.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back[k].values == paths[k].values);
        CHECK(back[k].dt == doctest::Approx(paths[k].dt));
    }
}
