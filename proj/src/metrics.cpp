#include "gmsfem/metrics.hpp"

#include <cmath>
#include <vector>

#include "gmsfem/assemble.hpp"
#include "gmsfem/errors.hpp"

namespace gmsfem {

std::pair<double, double> weighted_norms(const GridHierarchy& grid, const Vec& kappa_cells,
                                         const Vec& nodal) {
    if (nodal.size() != grid.num_fine_nodes())
        throw ContractError("weighted_norms: field is not a fine-node vector");
    const Mat ke = element_stiffness();
    const Mat me = element_mass(grid.h);
    const int nps = grid.nodes_per_side();
    double l2 = 0.0, h1 = 0.0;
    Eigen::Vector4d u;
    for (int cj = 0; cj < grid.n_fine; ++cj)
        for (int ci = 0; ci < grid.n_fine; ++ci) {
            const int n0 = cj * nps + ci;
            u << nodal[n0], nodal[n0 + 1], nodal[n0 + nps + 1], nodal[n0 + nps];
            const double k = kappa_cells[cj * grid.n_fine + ci];
            l2 += k * u.dot(me * u);
            h1 += k * u.dot(ke * u);
        }
    return {std::sqrt(std::max(l2, 0.0)), std::sqrt(std::max(h1, 0.0))};
}

ErrorPair relative_error(const GridHierarchy& grid, const Vec& u_ref, const Vec& u_approx,
                         const Vec& kappa_cells, std::string reference_tag) {
    if (u_ref.size() != u_approx.size())
        throw ContractError("relative_error: fields live on different grids");
    const auto [l2_ref, h1_ref] = weighted_norms(grid, kappa_cells, u_ref);
    if (!(l2_ref > 0.0) || !(h1_ref > 0.0))
        throw DegenerateInputError("relative_error: reference norm is zero");
    const auto [l2_diff, h1_diff] = weighted_norms(grid, kappa_cells, u_ref - u_approx);
    return {100.0 * l2_diff / l2_ref, 100.0 * h1_diff / h1_ref, std::move(reference_tag)};
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DegenerateInputError("pearson: need two equally sized series");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw DegenerateInputError("pearson: a series has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

double error_lambda_correlation(std::span<const double> lambda_stars,
                                std::span<const double> h1_errors_pct) {
    if (lambda_stars.size() != h1_errors_pct.size())
        throw ContractError("error_lambda_correlation: series size mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < lambda_stars.size(); ++i) {
        if (!std::isfinite(lambda_stars[i]) || !(lambda_stars[i] > 0.0)) continue;
        x.push_back(std::sqrt(1.0 / lambda_stars[i]));
        y.push_back(h1_errors_pct[i]);
    }
    if (x.size() < 3)
        throw DegenerateInputError("error_lambda_correlation: fewer than three finite points");
    return pearson(y, x);
}

} // namespace gmsfem
