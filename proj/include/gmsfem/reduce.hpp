#pragma once

#include <limits>
#include <span>
#include <string>

#include "gmsfem/grid.hpp"
#include "gmsfem/snapshot.hpp"
#include "gmsfem/types.hpp"

namespace gmsfem {

/// Eigenvalue-problem tags. The offline pencils live in snapshot coordinates,
/// the online ones in offline coordinates; `multi` is the pruned union of
/// several offline spaces.
enum class Variant { off1, off2, off3, off4, off5, on1, on2, on3, multi };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);
bool is_offline_variant(Variant v);
bool is_online_variant(Variant v);

/// Keep the first M eigenpairs, or every eigenpair with lambda < threshold.
struct Selection {
    enum class Kind { count, threshold };
    Kind kind = Kind::count;
    int count = 0;
    double threshold = 0.0;

    static Selection Count(int m) { return {Kind::count, m, 0.0}; }
    static Selection Threshold(double t) { return {Kind::threshold, 0, t}; }
};

/// Congruence-transformed matrices of a basis pair: target-region and
/// oversampled-region stiffness and weighted mass.
struct ReducedMatrices {
    Mat A, S;           // over omega
    Mat A_plus, S_plus; // over omega_plus
};

ReducedMatrices reduced_matrices(const GridHierarchy& grid, const Region& omega,
                                 const Region& omega_plus, const Mat& basis,
                                 const Mat& basis_plus, const Vec& kappa_cells,
                                 const Vec& ktilde_cells);

constexpr double kNoExcludedEigenvalue = std::numeric_limits<double>::infinity();

/// Reduced basis in parent coordinates together with its realized fine-node
/// columns and the first excluded eigenvalue of the generating problem.
struct ReducedSpace {
    Region omega;
    Region omega_plus;
    Variant variant = Variant::off1;
    Mat coords;     // parent dim x M
    Mat basis;      // |nodes(omega)| x M
    Mat basis_plus; // |nodes(omega_plus)| x M
    Vec kept_eigenvalues;
    double lambda_next = kNoExcludedEigenvalue;
    // second constituent's excluded eigenvalue for the multi-problem union
    double lambda_next_secondary = kNoExcludedEigenvalue;

    int size() const { return static_cast<int>(coords.cols()); }
};

ReducedSpace offline_space(const SnapshotSpace& snap, const ReducedMatrices& rm, Variant variant,
                           const Selection& sel);

/// Union of several offline spaces (eigenvector sets of different pencils),
/// pruned for linear independence in the realized oversampled-region columns.
ReducedSpace multi_offline_space(const SnapshotSpace& snap, const ReducedMatrices& rm,
                                 std::span<const Variant> variants,
                                 std::span<const Selection> selections,
                                 double prune_tol = 1e-8);

ReducedSpace online_space(const GridHierarchy& grid, const ReducedSpace& offline, Variant variant,
                          const Vec& kappa_mu_cells, const Vec& ktilde_mu_cells,
                          const Selection& sel);

/// Minimum over neighborhoods of the first excluded eigenvalue; +inf when no
/// neighborhood truncates.
double lambda_star(std::span<const ReducedSpace> spaces);

} // namespace gmsfem
