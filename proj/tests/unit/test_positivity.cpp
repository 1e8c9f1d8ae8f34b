// Positivity of the multiplicative scheme.
//
// The spectral heat step damps mode k by exp(-k^2 dt / 2) up to the Nyquist
// wavenumber. When sqrt(dt) is below dx the Nyquist mode keeps a sizeable
// weight, so the one-step kernel has alternating negative side lobes (about
// -1.8% next to the centre at sqrt(dt) = dx/2). A node whose value is far
// below that of a neighbour a few cells away then turns negative. That
// happens in the tails of a Gaussian-shaped field, so these checks are
// expected to fail on the production meshes. They are kept in their own
// binary so the failure is isolated and visible.
#include <doctest.h>

#include <cmath>

#include "kpzlab/heat_kernel.hpp"
#include "kpzlab/solver.hpp"

using namespace kpzlab;

TEST_CASE("multiplicative fields from positive data stay positive")
{
    const GridSpec g = make_grid(-4, 4, 128, 0, 0.5, 512, {.override_boundary_guard = true});
    const auto traj = solve(g, InitialDatum::from_expression("-x^2"), sample_noise(g, 8, 1),
                            SolveMode::Multiplicative, {.snapshot_times = {0.125, 0.25, 0.5}});
    std::size_t negative = 0;
    for (const auto& s : traj.snapshots) {
        for (double v : s.values) negative += v > 0.0 ? 0 : 1;
    }
    CHECK(negative == 0);
    for (double v : traj.origin_path.values) CHECK(v > 0.0);
}

TEST_CASE("one unresolved heat step of a positive field stays positive")
{
    // sqrt(dt) = dx / 2, the ratio used by the multiplicative meshes.
    const GridSpec g = make_grid(-4, 4, 512, 0, 1, 1, {.override_boundary_guard = true});
    FieldState f;
    f.grid = g;
    f.values.resize(g.nx());
    for (std::size_t i = 0; i < g.nx(); ++i) f.values[i] = std::exp(-g.x(i) * g.x(i) / 0.02);
    const double dt = g.dx() * g.dx() / 4.0;
    std::size_t negative = 0;
    for (double v : heat_step(f, dt).values) negative += v > 0.0 ? 0 : 1;
    CHECK(negative == 0);
}
