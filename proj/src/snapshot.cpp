#include "gmsfem/snapshot.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "gmsfem/assemble.hpp"
#include "gmsfem/errors.hpp"

namespace gmsfem {

SnapshotSpace harmonic_snapshots(const GridHierarchy& grid, const Region& omega,
                                 const Region& omega_plus, const Vec& kappa_cells, int mu_index) {
    SnapshotSpace s;
    s.omega = omega;
    s.omega_plus = omega_plus;

    const SpMat A = stiffness(grid, omega_plus, kappa_cells);
    std::vector<int> bdry(omega_plus.boundary.size());
    for (std::size_t k = 0; k < bdry.size(); ++k)
        bdry[k] = omega_plus.local_node(grid, omega_plus.boundary[k]);
    const Vec zeros = Vec::Zero(static_cast<Eigen::Index>(bdry.size()));
    DirichletSystem sys =
        eliminate_dirichlet(A, Vec::Zero(omega_plus.num_nodes()), bdry, zeros);

    Eigen::SimplicialLDLT<SpMat> solver(sys.A_ii);
    if (solver.info() != Eigen::Success)
        throw NumericError("harmonic_snapshots: interior factorization failed");
    const Mat rhs = -Mat(sys.A_ib);
    const Mat X = solver.solve(rhs);
    const double rhs_norm = rhs.norm();
    const double res = (sys.A_ii * X - rhs).norm() / (rhs_norm > 0.0 ? rhs_norm : 1.0);
    if (!(res <= 1e-10))
        throw NumericError("harmonic_snapshots: interior solve residual above tolerance", res);

    const int m = static_cast<int>(bdry.size());
    s.basis_plus = Mat::Zero(omega_plus.num_nodes(), m);
    for (int c = 0; c < m; ++c) {
        for (std::size_t r = 0; r < sys.interior.size(); ++r)
            s.basis_plus(sys.interior[r], c) = X(static_cast<Eigen::Index>(r), c);
        s.basis_plus(bdry[static_cast<std::size_t>(c)], c) = 1.0;
        s.columns.push_back({SnapshotKind::harmonic, mu_index, c});
    }
    s.basis = restrict_to(grid, s.basis_plus, omega_plus, omega);
    return s;
}

SnapshotSpace spectral_snapshots(const GridHierarchy& grid, const Region& omega,
                                 const Region& omega_plus, const Vec& kappa_cells,
                                 const Vec& ktilde_cells, int L, int mu_index) {
    if (L < 1 || L > omega_plus.num_nodes())
        throw RangeError("spectral_snapshots: L = " + std::to_string(L) +
                         " outside [1, " + std::to_string(omega_plus.num_nodes()) + "]");

    const Mat A = Mat(stiffness(grid, omega_plus, kappa_cells));
    const Mat S = Mat(weighted_mass(grid, omega_plus, ktilde_cells));
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(A, S);
    if (ges.info() != Eigen::Success)
        throw NumericError("spectral_snapshots: generalized eigensolve failed");

    SnapshotSpace s;
    s.omega = omega;
    s.omega_plus = omega_plus;
    s.basis_plus = ges.eigenvectors().leftCols(L);
    s.eigenvalues = ges.eigenvalues().head(L);
    for (int c = 0; c < L; ++c) s.columns.push_back({SnapshotKind::spectral, mu_index, c});
    s.basis = restrict_to(grid, s.basis_plus, omega_plus, omega);
    return s;
}

namespace {

std::vector<int> prune_sweep(const Mat& columns, double tol, bool absolute) {
    const int m = static_cast<int>(columns.cols());
    Mat work = columns;
    Vec orig(m);
    double family_scale = 0.0;
    for (int c = 0; c < m; ++c) {
        orig[c] = columns.col(c).norm();
        family_scale = std::max(family_scale, orig[c]);
    }

    std::vector<char> taken(static_cast<std::size_t>(m), 0);
    std::vector<int> retained;
    for (;;) {
        int best = -1;
        double best_score = 0.0;
        for (int c = 0; c < m; ++c) {
            if (taken[static_cast<std::size_t>(c)] || orig[c] == 0.0) continue;
            const double score = work.col(c).norm() / (absolute ? family_scale : orig[c]);
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        if (best < 0 || best_score < tol) break;
        taken[static_cast<std::size_t>(best)] = 1;
        retained.push_back(best);
        const Vec q = work.col(best) / work.col(best).norm();
        for (int c = 0; c < m; ++c)
            if (!taken[static_cast<std::size_t>(c)] && orig[c] > 0.0)
                work.col(c) -= q * q.dot(work.col(c));
    }
    std::sort(retained.begin(), retained.end());
    return retained;
}

} // namespace

std::vector<int> pivoted_prune(const Mat& columns, double tol) {
    return prune_sweep(columns, tol, false);
}

std::vector<int> pivoted_prune_absolute(const Mat& columns, double tol) {
    return prune_sweep(columns, tol, true);
}

SnapshotSpace merge_parameter_snapshots(const std::vector<SnapshotSpace>& spaces, double tol) {
    if (spaces.empty()) throw ContractError("merge_parameter_snapshots: no input spaces");
    for (const auto& s : spaces)
        if (!s.omega_plus.same_extents(spaces.front().omega_plus) ||
            !s.omega.same_extents(spaces.front().omega))
            throw ContractError("merge_parameter_snapshots: region mismatch");

    int total = 0;
    for (const auto& s : spaces) total += s.size();
    Mat all_plus(spaces.front().basis_plus.rows(), total);
    Mat all(spaces.front().basis.rows(), total);
    std::vector<SnapshotColumn> cols;
    cols.reserve(static_cast<std::size_t>(total));
    int at = 0;
    for (const auto& s : spaces) {
        all_plus.middleCols(at, s.size()) = s.basis_plus;
        all.middleCols(at, s.size()) = s.basis;
        cols.insert(cols.end(), s.columns.begin(), s.columns.end());
        at += s.size();
    }

    const std::vector<int> keep = pivoted_prune(all_plus, tol);
    SnapshotSpace merged;
    merged.omega = spaces.front().omega;
    merged.omega_plus = spaces.front().omega_plus;
    merged.basis_plus.resize(all_plus.rows(), static_cast<Eigen::Index>(keep.size()));
    merged.basis.resize(all.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        merged.basis_plus.col(static_cast<Eigen::Index>(k)) = all_plus.col(keep[k]);
        merged.basis.col(static_cast<Eigen::Index>(k)) = all.col(keep[k]);
        merged.columns.push_back(cols[static_cast<std::size_t>(keep[k])]);
    }
    return merged;
}

} // namespace gmsfem
