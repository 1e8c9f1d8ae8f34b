#pragma once

#include <string>

#include "kpzlab/experiment.hpp"

namespace kpzlab {

enum class ReportFormat { Csv, TextTable };

/// Report table for a manifest. CSV columns: check, target, measured, se,
/// tolerance, pass. Throws InputError when an output listed in the manifest
/// is missing from its directory.
std::string render_report(const RunManifest& manifest, ReportFormat format);

/// Writes report.csv or report.txt into the manifest's output directory and
/// returns the file path.
std::string emit_report(const RunManifest& manifest, ReportFormat format);

}  // namespace kpzlab
