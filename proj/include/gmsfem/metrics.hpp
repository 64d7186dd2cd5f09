#pragma once

#include <span>
#include <string>
#include <utility>

#include "gmsfem/grid.hpp"
#include "gmsfem/types.hpp"

namespace gmsfem {

struct ErrorPair {
    double l2_pct = 0.0;
    double h1_pct = 0.0;
    std::string reference; // fine | snapshot | offline
};

/// Coefficient-weighted L2 norm and H1 seminorm of a fine-node field, exact
/// per-cell Q1 quadrature with the cellwise-constant weight (consistent with
/// the assembled mass and stiffness matrices).
std::pair<double, double> weighted_norms(const GridHierarchy& grid, const Vec& kappa_cells,
                                         const Vec& nodal);

ErrorPair relative_error(const GridHierarchy& grid, const Vec& u_ref, const Vec& u_approx,
                         const Vec& kappa_cells, std::string reference_tag);

/// Pearson correlation between the energy errors and sqrt(1/Lambda*) over a
/// sweep; entries with non-finite Lambda* are skipped, at least three must
/// remain.
double error_lambda_correlation(std::span<const double> lambda_stars,
                                std::span<const double> h1_errors_pct);

double pearson(std::span<const double> x, std::span<const double> y);

} // namespace gmsfem
