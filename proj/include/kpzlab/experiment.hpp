#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kpzlab/config.hpp"

namespace kpzlab {

struct OutputFile {
    std::string name;  // relative to the output directory
    std::uintmax_t bytes = 0;
    std::string sha256;
};

/// One row of the statistics report; unset optionals print as empty cells.
struct StatRow {
    std::string check;
    std::optional<double> target;
    double measured = 0.0;
    std::optional<double> se;
    std::optional<double> tolerance;
    std::optional<bool> pass;
};

struct ReplicaSeed {
    std::size_t replica = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

struct ReplicaFailure {
    std::size_t replica = 0;
    std::string message;
};

struct RunManifest {
    std::string config_echo;
    std::string version;
    std::string kind;
    std::string out_dir;
    std::vector<ReplicaSeed> seeds;
    std::vector<OutputFile> outputs;
    std::vector<StatRow> rows;
    std::string started_utc;
    double wall_seconds = 0.0;
    bool complete = false;
    std::vector<ReplicaFailure> failures;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
};

/// Library version reported in manifests.
std::string kpzlab_version();

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

/**
 * Executes the configured experiment with config.threads workers, writes
 * its CSV outputs and manifest.json into config.out_dir, and returns the
 * manifest. Every output except the manifest's timing fields is a pure
 * function of the configuration. Replicas that fail numerically are listed
 * in the manifest (complete = false) and left out of the outputs.
 */
RunManifest run_experiment(const ExperimentConfig& config);

RunManifest load_manifest(const std::string& file);

/// The configuration a manifest was produced from, with its output
/// directory replaced by `out_dir` when given.
ExperimentConfig config_from_manifest(const RunManifest& manifest,
                                      std::optional<std::string> out_dir = std::nullopt);

}  // namespace kpzlab
