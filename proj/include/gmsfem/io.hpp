#pragma once

#include <string>

#include "gmsfem/snapshot.hpp"
#include "gmsfem/types.hpp"

namespace gmsfem {

/// Plain-text cell matrix file: header `#cells n n`, then n rows of n
/// whitespace-separated values, row-major, full double precision.
void write_cell_field(const std::string& path, int n_fine, const Vec& cells);
Vec read_cell_field(const std::string& path, int& n_fine_out);

/// Nodal fields use the same layout with a `#nodes n+1 n+1` header.
void write_nodal_field(const std::string& path, int n_fine, const Vec& nodal);

/// Version-stamped per-neighborhood snapshot cache.
void save_snapshot_cache(const std::string& path, const SnapshotSpace& space);
SnapshotSpace load_snapshot_cache(const std::string& path, const GridHierarchy& grid);

} // namespace gmsfem
