#include "gmsfem/assemble.hpp"

#include <Eigen/SparseCholesky>
#include <string>

#include "gmsfem/errors.hpp"

namespace gmsfem {

Mat element_stiffness() {
    Mat k(4, 4);
    const double d = 2.0 / 3.0, e = -1.0 / 6.0, o = -1.0 / 3.0;
    k << d, e, o, e,
         e, d, e, o,
         o, e, d, e,
         e, o, e, d;
    return k;
}

Mat element_mass(double h) {
    Mat m(4, 4);
    m << 4, 2, 1, 2,
         2, 4, 2, 1,
         1, 2, 4, 2,
         2, 1, 2, 4;
    return (h * h / 36.0) * m;
}

namespace {

// Region-local node ids of a region-local cell, element corner order.
inline void cell_nodes(const Region& r, int lc, int out[4]) {
    const int ncx = r.cx1 - r.cx0;
    const int i = lc % ncx;
    const int j = lc / ncx;
    const int nx = r.nodes_x();
    out[0] = j * nx + i;
    out[1] = j * nx + i + 1;
    out[2] = (j + 1) * nx + i + 1;
    out[3] = (j + 1) * nx + i;
}

SpMat assemble_cellwise(const GridHierarchy& grid, const Region& region, const Vec& cell_values,
                        const Mat& element, const char* what, bool require_positive) {
    if (cell_values.size() != grid.num_fine_cells())
        throw ContractError(std::string(what) + ": coefficient has " +
                            std::to_string(cell_values.size()) + " cells, grid has " +
                            std::to_string(grid.num_fine_cells()));
    std::vector<Triplet> trip;
    trip.reserve(region.cells.size() * 16);
    int ln[4];
    for (std::size_t c = 0; c < region.cells.size(); ++c) {
        const double v = cell_values[region.cells[c]];
        if (require_positive && !(v > 0.0))
            throw ContractError(std::string(what) + ": non-positive weight at cell " +
                                std::to_string(region.cells[c]));
        cell_nodes(region, static_cast<int>(c), ln);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) trip.emplace_back(ln[a], ln[b], v * element(a, b));
    }
    SpMat A(region.num_nodes(), region.num_nodes());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

} // namespace

SpMat stiffness(const GridHierarchy& grid, const Region& region, const Vec& kappa_cells) {
    return assemble_cellwise(grid, region, kappa_cells, element_stiffness(), "stiffness", false);
}

SpMat weighted_mass(const GridHierarchy& grid, const Region& region, const Vec& weight_cells) {
    return assemble_cellwise(grid, region, weight_cells, element_mass(grid.h), "weighted_mass",
                             true);
}

Vec load_vector(const GridHierarchy& grid, const Region& region, const Vec& f_cells) {
    if (f_cells.size() != grid.num_fine_cells())
        throw ContractError("load_vector: source has wrong cell count");
    Vec b = Vec::Zero(region.num_nodes());
    const double quarter = grid.h * grid.h / 4.0;
    int ln[4];
    for (std::size_t c = 0; c < region.cells.size(); ++c) {
        const double fv = f_cells[region.cells[c]] * quarter;
        cell_nodes(region, static_cast<int>(c), ln);
        for (int a = 0; a < 4; ++a) b[ln[a]] += fv;
    }
    return b;
}

std::vector<int> node_injection(const GridHierarchy& grid, const Region& inner,
                                const Region& outer) {
    if (!inner.inside(outer))
        throw ContractError("node_injection: regions are not nested");
    std::vector<int> idx(inner.nodes.size());
    for (std::size_t k = 0; k < inner.nodes.size(); ++k) {
        idx[k] = outer.local_node(grid, inner.nodes[k]);
        if (idx[k] < 0) throw ContractError("node_injection: node map inconsistency");
    }
    return idx;
}

Vec restrict_to(const GridHierarchy& grid, const Vec& nodal, const Region& from,
                const Region& to) {
    const auto idx = node_injection(grid, to, from);
    Vec out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = nodal[idx[k]];
    return out;
}

Mat restrict_to(const GridHierarchy& grid, const Mat& nodal_columns, const Region& from,
                const Region& to) {
    const auto idx = node_injection(grid, to, from);
    Mat out(static_cast<Eigen::Index>(idx.size()), nodal_columns.cols());
    for (std::size_t k = 0; k < idx.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = nodal_columns.row(idx[k]);
    return out;
}

Vec DirichletSystem::recover(const Vec& x_interior) const {
    Vec full = Vec::Zero(full_dim);
    for (std::size_t k = 0; k < interior.size(); ++k)
        full[interior[k]] = x_interior[static_cast<Eigen::Index>(k)];
    for (std::size_t k = 0; k < boundary.size(); ++k)
        full[boundary[k]] = boundary_values[static_cast<Eigen::Index>(k)];
    return full;
}

DirichletSystem eliminate_dirichlet(const SpMat& A, const Vec& b, std::span<const int> boundary,
                                    const Vec& boundary_values) {
    const int n = static_cast<int>(A.rows());
    if (boundary.empty())
        throw ContractError("eliminate_dirichlet: empty boundary set");
    if (boundary_values.size() != static_cast<Eigen::Index>(boundary.size()))
        throw ContractError("eliminate_dirichlet: boundary values arity mismatch");

    std::vector<char> is_bdry(n, 0);
    for (int bnode : boundary) {
        if (bnode < 0 || bnode >= n) throw RangeError("eliminate_dirichlet: boundary node out of range");
        is_bdry[bnode] = 1;
    }

    DirichletSystem sys;
    sys.full_dim = n;
    sys.boundary.assign(boundary.begin(), boundary.end());
    sys.boundary_values = boundary_values;
    std::vector<int> to_interior(n, -1), to_bdry(n, -1);
    for (int i = 0; i < n; ++i)
        if (!is_bdry[i]) {
            to_interior[i] = static_cast<int>(sys.interior.size());
            sys.interior.push_back(i);
        }
    for (std::size_t k = 0; k < sys.boundary.size(); ++k) to_bdry[sys.boundary[k]] = static_cast<int>(k);

    if (sys.interior.empty())
        throw DegenerateInputError("eliminate_dirichlet: every node is a boundary node");

    std::vector<Triplet> tii, tib;
    for (int col = 0; col < A.outerSize(); ++col)
        for (SpMat::InnerIterator it(A, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            if (is_bdry[r]) continue;
            if (is_bdry[c])
                tib.emplace_back(to_interior[r], to_bdry[c], it.value());
            else
                tii.emplace_back(to_interior[r], to_interior[c], it.value());
        }
    sys.A_ii.resize(static_cast<int>(sys.interior.size()), static_cast<int>(sys.interior.size()));
    sys.A_ii.setFromTriplets(tii.begin(), tii.end());
    sys.A_ib.resize(static_cast<int>(sys.interior.size()), static_cast<int>(sys.boundary.size()));
    sys.A_ib.setFromTriplets(tib.begin(), tib.end());

    sys.rhs.resize(static_cast<Eigen::Index>(sys.interior.size()));
    for (std::size_t k = 0; k < sys.interior.size(); ++k)
        sys.rhs[static_cast<Eigen::Index>(k)] = b[sys.interior[k]];
    sys.rhs -= sys.A_ib * boundary_values;
    return sys;
}

Vec solve_spd(const SpMat& A, const Vec& b, double rel_residual_tol, const char* what) {
    Eigen::SimplicialLDLT<SpMat> solver(A);
    if (solver.info() != Eigen::Success)
        throw NumericError(std::string(what) + ": factorization failed");
    Vec x = solver.solve(b);
    const double bn = b.norm();
    const double res = bn > 0.0 ? (A * x - b).norm() / bn : (A * x - b).norm();
    if (!(res <= rel_residual_tol))
        throw NumericError(std::string(what) + ": residual " + std::to_string(res) +
                               " above tolerance",
                           res);
    return x;
}

} // namespace gmsfem
