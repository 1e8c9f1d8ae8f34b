#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kpzlab/fbm.hpp"
#include "kpzlab/initial_data.hpp"

namespace kpzlab {

enum class ExperimentKind { SimulateShe, SimulateFbm, Stats, Verify };

std::string to_string(ExperimentKind kind);

/// Every problem found in a configuration, reported together.
class ConfigError : public InputError {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct GridParams {
    double x_min = -6.0;
    double x_max = 6.0;
    std::size_t nx = 768;
    double t_start = 1.0 / 128.0;
    double t_end = 1.0 + 1.0 / 128.0;
    std::size_t nt = 16384;
    bool override_boundary_guard = false;

    double dt() const { return (t_end - t_start) / static_cast<double>(nt); }
    GridSpec build() const;
    /// The grid for runs that only use its time axis (fBm sampling,
    /// statistics); the spatial boundary guard does not apply there.
    GridSpec build_time_axis() const;
};

struct IcConfig {
    InitialKind kind = InitialKind::NarrowWedge;
    /// Narrow-wedge smoothing time; defaults to grid.t_start.
    std::optional<double> t0;
    std::string expr;
    std::string table;
    std::uint64_t seed = 0;
};

struct StatsConfig {
    std::vector<double> alpha;
    std::vector<double> epsilon;
    double interval_start = 1.0;
    double interval_end = 2.0;
    std::vector<int> depths;
    std::vector<double> exceptional_alphas;
    /// Base time for standardized increments and the LIL profile.
    double base_time = 1.0;
    int resolution = 0;
    /// Paths CSV read by the stats experiment.
    std::string input;
    /// Smallest dyadic eps of the LIL/MOC profiles, in path steps. Unset
    /// means 1 for exact fBm paths and 16 otherwise.
    std::optional<std::size_t> min_steps;

    bool empty() const
    {
        return alpha.empty() && epsilon.empty() && depths.empty() && exceptional_alphas.empty();
    }
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SimulateShe;
    GridParams grid;
    IcConfig ic;
    std::optional<HypParams> hyp;
    SolveMode mode = SolveMode::Multiplicative;
    double hurst = 0.25;
    FbmMethod fbm_method = FbmMethod::Automatic;
    bool fbm_rescale = true;
    StatsConfig stats;
    std::vector<int> criteria;
    std::size_t replicas = 1;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string out_dir = "kpzlab-out";
    bool save_trajectories = false;

    /// Canonical "key = value" listing of every setting; parsing it back
    /// yields an identical configuration.
    std::string echo() const;
};

/**
 * Parses an INI document. Keys may be written dotted at top level
 * ("grid.nx = 768") or inside sections ("[grid]" then "nx = 768").
 * Throws ConfigError listing all violations: unknown keys, malformed
 * values, a missing run.seed, replicas < 1, epsilon values that are not
 * whole multiples of the time step, and invalid grids.
 */
/// `overrides` (dotted key -> value) replace or add document entries before
/// validation; the CLI flags use this.
ExperimentConfig parse_config(std::string_view text,
                              std::optional<ExperimentKind> kind_override = std::nullopt,
                              const std::map<std::string, std::string>& overrides = {});
ExperimentConfig load_config(const std::string& file,
                             std::optional<ExperimentKind> kind_override = std::nullopt,
                             const std::map<std::string, std::string>& overrides = {});

/// Re-runs the cross-field validation after programmatic edits (e.g. CLI
/// overrides); throws ConfigError.
void validate_config(const ExperimentConfig& config);

}  // namespace kpzlab
