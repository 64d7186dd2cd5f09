#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gmsfem/grid.hpp"
#include "gmsfem/reduce.hpp"
#include "gmsfem/types.hpp"

namespace gmsfem {

using BoundaryData = std::function<double(double, double)>;

/// Global basis matrix: columns are partition-of-unity multiplied local modes
/// of interior coarse vertices, extended by zero, plus the boundary lifting.
/// Coarse dofs attach only to interior coarse vertices, so every column
/// vanishes on the domain boundary.
struct MultiscaleOperator {
    SpMat R; // fine nodes x coarse dofs
    std::vector<std::pair<int, int>> column_key; // (coarse vertex, local mode index)
    Vec lifting; // coarse interpolant of the boundary data

    int dim() const { return static_cast<int>(R.cols()); }
};

/// `bases[v]` is the local reduced basis over omega_v nodes for every interior
/// coarse vertex v (boundary entries are ignored and may be null). Columns
/// whose content after the partition-of-unity product is negligible against
/// the family scale are pruned so the coarse system stays solvable; the
/// dropped content is below prune_tol in the realized span.
MultiscaleOperator build_operator(const GridHierarchy& grid, const NeighborhoodSet& nbh,
                                  const std::vector<const Mat*>& bases, const BoundaryData& g,
                                  double prune_tol = 1e-8);

/// Galerkin coarse solve: (R^T A R) c = R^T (b - A u_g), returns R c + u_g.
Vec solve_coarse(const GridHierarchy& grid, const MultiscaleOperator& op, const Vec& kappa_cells,
                 const Vec& f_cells);

/// Reference fine-grid Dirichlet solve.
Vec solve_fine(const GridHierarchy& grid, const Vec& kappa_cells, const Vec& f_cells,
               const BoundaryData& g);

/// Coarse solve in the untruncated snapshot spaces (the residual-free
/// reference for truncation sweeps).
Vec solve_snapshot_reference(const GridHierarchy& grid, const NeighborhoodSet& nbh,
                             const std::vector<SnapshotSpace>& snapshots, const Vec& kappa_cells,
                             const Vec& f_cells, const BoundaryData& g);

/// One table row of an experiment: dimension, excluded-eigenvalue minima and
/// the relative errors against each requested reference.
struct SolveReport {
    struct Entry {
        std::string reference;
        double l2_pct = 0.0;
        double h1_pct = 0.0;
    };
    int dim = 0;
    double lambda_star = std::numeric_limits<double>::infinity();
    double lambda_star_plus = std::numeric_limits<double>::infinity();
    std::vector<Entry> errors;
    double seconds = 0.0;
    std::string tag;
};

} // namespace gmsfem
