#pragma once

#include <span>
#include <vector>

#include "gmsfem/grid.hpp"
#include "gmsfem/types.hpp"

namespace gmsfem {

/// Q1 stiffness on the region, integral of kappa grad(phi_n).grad(phi_m).
/// The coefficient is one value per global fine cell; element matrices are the
/// closed-form constant-coefficient ones, so no quadrature error enters.
/// Matrix rows/columns use region-local node indices; no boundary condition.
SpMat stiffness(const GridHierarchy& grid, const Region& region, const Vec& kappa_cells);

/// Q1 weighted mass, integral of weight phi_n phi_m; weight > 0 per cell.
SpMat weighted_mass(const GridHierarchy& grid, const Region& region, const Vec& weight_cells);

/// Load vector for a cellwise-constant source: each cell puts f h^2/4 on its nodes.
Vec load_vector(const GridHierarchy& grid, const Region& region, const Vec& f_cells);

/// Row selection of nodal data from an enclosing region onto a nested one.
Vec restrict_to(const GridHierarchy& grid, const Vec& nodal, const Region& from, const Region& to);
Mat restrict_to(const GridHierarchy& grid, const Mat& nodal_columns, const Region& from,
                const Region& to);

/// Local node indices of `inner`'s nodes inside `outer`'s node ordering.
std::vector<int> node_injection(const GridHierarchy& grid, const Region& inner,
                                const Region& outer);

/// Dirichlet elimination: interior block, coupled right-hand side, and the
/// recovery map that reinserts the prescribed boundary values.
struct DirichletSystem {
    SpMat A_ii;
    SpMat A_ib;
    Vec rhs; // b_interior - A_ib * boundary_values
    std::vector<int> interior; // local node ids
    std::vector<int> boundary;
    Vec boundary_values;
    int full_dim = 0;

    Vec recover(const Vec& x_interior) const;
};

DirichletSystem eliminate_dirichlet(const SpMat& A, const Vec& b, std::span<const int> boundary,
                                    const Vec& boundary_values);

/// Sparse SPD solve via LDLT with a residual check.
Vec solve_spd(const SpMat& A, const Vec& b, double rel_residual_tol, const char* what);

/// Closed-form 4x4 Q1 element matrices on a square cell of side h
/// (node order: (0,0),(h,0),(h,h),(0,h)).
Mat element_stiffness();
Mat element_mass(double h);

} // namespace gmsfem
