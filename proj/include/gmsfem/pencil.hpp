#pragma once

#include "gmsfem/types.hpp"

namespace gmsfem {

/// Eigenpairs of the dense symmetric pencil A x = lambda B x with B positive
/// semidefinite. Directions outside range(B) are deflated before solving.
///
/// Directions annihilated by both matrices leave the pencil degenerate; with
/// `keep_common_null` they come back as lambda = 0 modes. That is wanted when
/// the right matrix is a stiffness form (its null directions are locally
/// constant functions the coarse space must keep selectable) and unwanted when
/// it is a mass form (its null directions are numerically zero functions).
struct PencilOptions {
    double drop_tol = 1e-12;
    double indefinite_tol = 1e-10;
    bool keep_common_null = false;
};

struct PencilSolution {
    Vec eigenvalues; // ascending
    Mat eigenvectors; // one column per eigenvalue
    Mat deflated; // orthonormal basis of the dropped directions
    int num_common_null = 0;
};

PencilSolution solve_pencil(const Mat& A, const Mat& B, const PencilOptions& opts = {});

/// Relative residual of eigenpair k measured in the solvable subspace
/// (components along deflated directions are excluded; with a definite B this
/// is the plain residual).
double pencil_residual(const Mat& A, const Mat& B, const PencilSolution& sol, int k);

} // namespace gmsfem
