#include "gmsfem/pencil.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gmsfem/errors.hpp"

namespace gmsfem {

PencilSolution solve_pencil(const Mat& A, const Mat& B, const PencilOptions& opts) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw ContractError("solve_pencil: dimension mismatch");
    const Eigen::Index n = A.rows();
    PencilSolution out;
    if (n == 0) {
        out.eigenvectors.resize(0, 0);
        out.deflated.resize(0, 0);
        return out;
    }

    const Mat As = 0.5 * (A + A.transpose());
    const Mat Bs = 0.5 * (B + B.transpose());

    // Directions annihilated by both matrices first: they are degenerate for
    // the pencil and must not leak into either the kept or the deflated set.
    // Extracting them from A^2 + B^2 is robust against the eigenvalue-cluster
    // mixing that a null-space test on B alone suffers from.
    Mat common(n, 0);
    Mat complement = Mat::Identity(n, n);
    if (opts.keep_common_null) {
        const Mat M = As * As + Bs * Bs;
        Eigen::SelfAdjointEigenSolver<Mat> mes(M);
        if (mes.info() != Eigen::Success)
            throw NumericError("solve_pencil: common-null factorization failed");
        // squaring halves the attainable precision: genuine common-null
        // eigenvalues of M land at the roundoff floor eps*|M|, so the cut
        // sits a little above it
        const double cut_m = 1e-13 * M.norm();
        Eigen::Index n_common = 0;
        while (n_common < n && mes.eigenvalues()[n_common] <= cut_m) ++n_common;
        common = mes.eigenvectors().leftCols(n_common);
        complement = mes.eigenvectors().rightCols(n - n_common);
    }

    const Mat Ap = complement.transpose() * As * complement;
    const Mat Bp = complement.transpose() * Bs * complement;
    const Eigen::Index np = Ap.rows();

    Mat X(n, 0);
    Vec mu(0);
    Mat deflated(n, 0);
    if (np > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> bes(Bp);
        if (bes.info() != Eigen::Success)
            throw NumericError("solve_pencil: eigendecomposition of the right matrix failed");
        const Vec d = bes.eigenvalues();
        const double b_max = d[np - 1];
        if (!(b_max > 0.0))
            throw NumericError("solve_pencil: right matrix has no positive direction");
        if (d[0] < -opts.indefinite_tol * b_max)
            throw NumericError("solve_pencil: right matrix indefinite beyond tolerance",
                               d[0] / b_max);

        const double cut = opts.drop_tol * b_max;
        std::vector<Eigen::Index> kept, dropped;
        for (Eigen::Index i = 0; i < np; ++i) (d[i] > cut ? kept : dropped).push_back(i);

        Mat W(np, static_cast<Eigen::Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k)
            W.col(static_cast<Eigen::Index>(k)) =
                bes.eigenvectors().col(kept[k]) / std::sqrt(d[kept[k]]);

        if (!kept.empty()) {
            const Mat C0 = W.transpose() * Ap * W;
            Eigen::SelfAdjointEigenSolver<Mat> ces(0.5 * (C0 + C0.transpose()));
            if (ces.info() != Eigen::Success)
                throw NumericError("solve_pencil: projected eigenproblem failed");
            mu = ces.eigenvalues();
            X = complement * (W * ces.eigenvectors());
        }
        deflated.resize(n, static_cast<Eigen::Index>(dropped.size()));
        for (std::size_t k = 0; k < dropped.size(); ++k)
            deflated.col(static_cast<Eigen::Index>(k)) =
                complement * bes.eigenvectors().col(dropped[k]);
    }

    const Eigen::Index nc = common.cols();
    const Eigen::Index total = mu.size() + nc;
    out.num_common_null = static_cast<int>(nc);
    out.eigenvalues.resize(total);
    out.eigenvectors.resize(n, total);
    // merge: common-null modes enter at lambda = 0, overall order ascending
    std::vector<std::pair<double, Eigen::Index>> order;
    order.reserve(static_cast<std::size_t>(total));
    for (Eigen::Index k = 0; k < nc; ++k) order.emplace_back(0.0, k);
    for (Eigen::Index k = 0; k < mu.size(); ++k) order.emplace_back(mu[k], nc + k);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (Eigen::Index k = 0; k < total; ++k) {
        out.eigenvalues[k] = order[static_cast<std::size_t>(k)].first;
        const Eigen::Index src = order[static_cast<std::size_t>(k)].second;
        out.eigenvectors.col(k) = src < nc ? common.col(src) : X.col(src - nc);
    }
    out.deflated = deflated;
    return out;
}

double pencil_residual(const Mat& A, const Mat& B, const PencilSolution& sol, int k) {
    const Vec x = sol.eigenvectors.col(k);
    const double lambda = sol.eigenvalues[k];
    Vec r = A * x - lambda * (B * x);
    if (sol.deflated.cols() > 0) r -= sol.deflated * (sol.deflated.transpose() * r);
    // backward-error scaling; the pointwise form (|Ax| + |lambda||Bx|) is 0/0
    // at the zero modes every Neumann-type pencil carries
    const double denom = (A.norm() + std::abs(lambda) * B.norm()) * x.norm();
    if (denom == 0.0) return 0.0;
    return r.norm() / denom;
}

} // namespace gmsfem
