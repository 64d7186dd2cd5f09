#pragma once

#include <vector>

#include "gmsfem/grid.hpp"
#include "gmsfem/types.hpp"

namespace gmsfem {

enum class SnapshotKind { harmonic, spectral };

struct SnapshotColumn {
    SnapshotKind kind = SnapshotKind::harmonic;
    int mu_index = 0;    // which training parameter produced the column
    int local_index = 0; // boundary node (harmonic) or eigenpair index (spectral)
};

/// Per-neighborhood snapshot space: columns over the fine nodes of the
/// oversampled region plus their restriction to the target neighborhood.
struct SnapshotSpace {
    Region omega;
    Region omega_plus;
    Mat basis_plus; // |nodes(omega_plus)| x M
    Mat basis;      // |nodes(omega)| x M, row selection of basis_plus
    std::vector<SnapshotColumn> columns;
    Vec eigenvalues; // spectral snapshots only (ascending), else empty

    int size() const { return static_cast<int>(basis_plus.cols()); }
};

/// One column per fine node of the region boundary: the discrete
/// kappa-harmonic extension of that node's indicator.
SnapshotSpace harmonic_snapshots(const GridHierarchy& grid, const Region& omega,
                                 const Region& omega_plus, const Vec& kappa_cells,
                                 int mu_index = 0);

/// First L eigenfunctions of the free (Neumann) pencil
/// stiffness(kappa) psi = lambda mass(ktilde) psi on the oversampled region;
/// columns come back mass-orthonormal with ascending eigenvalues.
SnapshotSpace spectral_snapshots(const GridHierarchy& grid, const Region& omega,
                                 const Region& omega_plus, const Vec& kappa_cells,
                                 const Vec& ktilde_cells, int L, int mu_index = 0);

/// Concatenate per-parameter spaces over the same region and drop columns that
/// are numerically dependent (residual after projection onto the retained set
/// below tol times the original norm).
SnapshotSpace merge_parameter_snapshots(const std::vector<SnapshotSpace>& spaces,
                                        double tol = 1e-8);

/// Pivoted orthogonalization pruning; returns the retained column indices in
/// ascending order. A column is dropped when its residual after projection
/// onto the retained set falls below tol times its own original norm.
std::vector<int> pivoted_prune(const Mat& columns, double tol);

/// Same sweep with the drop test against the largest original column norm;
/// this removes content that is negligible for the whole family, which is the
/// right notion when the columns feed a Galerkin operator.
std::vector<int> pivoted_prune_absolute(const Mat& columns, double tol);

} // namespace gmsfem
