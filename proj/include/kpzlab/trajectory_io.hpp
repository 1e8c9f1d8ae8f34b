#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kpzlab/solver.hpp"

namespace kpzlab {

/**
 * Binary trajectory container:
 *   "KPZT" magic, format version, grid, initial datum, seed, stream id,
 *   mode, origin path, log origin path, then each snapshot.
 * Integers are u64 and reals are IEEE doubles, both in host byte order.
 */
void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);

void save_trajectory(const std::string& file, const Trajectory& traj);
Trajectory load_trajectory(const std::string& file);

/// CSV with header "replica,t,value"; paths[r] is written as replica r.
void write_paths_csv(std::ostream& out, const std::vector<Path>& paths);
void save_paths_csv(const std::string& file, const std::vector<Path>& paths);
/// Same, labelling paths[k] with replica id ids[k].
void write_paths_csv(std::ostream& out, const std::vector<Path>& paths,
                     const std::vector<std::size_t>& ids);

/// Reads back write_paths_csv output, one Path per replica id in increasing
/// id order. Rows of one replica must be in increasing, uniformly spaced
/// time order.
std::vector<Path> read_paths_csv(std::istream& in);

}  // namespace kpzlab
