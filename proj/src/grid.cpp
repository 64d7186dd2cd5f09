#include "gmsfem/grid.hpp"

#include <algorithm>
#include <string>

#include "gmsfem/errors.hpp"

namespace gmsfem {

Region GridHierarchy::domain_region() const {
    return make_region(*this, 0, 0, n_fine, n_fine, -1);
}

GridHierarchy build_grids(int n_fine, int n_coarse) {
    if (n_fine < 1 || n_coarse < 1)
        throw ConfigError("build_grids: sizes must be >= 1, got n_fine=" + std::to_string(n_fine) +
                          " n_coarse=" + std::to_string(n_coarse));
    if (n_fine % n_coarse != 0)
        throw ConfigError("build_grids: n_fine=" + std::to_string(n_fine) +
                          " is not divisible by n_coarse=" + std::to_string(n_coarse));

    GridHierarchy g;
    g.n_fine = n_fine;
    g.n_coarse = n_coarse;
    g.block = n_fine / n_coarse;
    g.h = 1.0 / n_fine;
    g.H = 1.0 / n_coarse;

    g.coarse_vertex_node.resize(g.num_coarse_vertices());
    for (int v = 0; v < g.num_coarse_vertices(); ++v) {
        auto [ci, cj] = g.coarse_vertex_ij(v);
        g.coarse_vertex_node[v] = g.fine_node_index(ci * g.block, cj * g.block);
    }

    g.coarse_cell_cells.resize(g.num_coarse_cells());
    for (int cc = 0; cc < g.num_coarse_cells(); ++cc) {
        const int ci = cc % n_coarse;
        const int cj = cc / n_coarse;
        auto& cells = g.coarse_cell_cells[cc];
        cells.reserve(g.block * g.block);
        for (int j = cj * g.block; j < (cj + 1) * g.block; ++j)
            for (int i = ci * g.block; i < (ci + 1) * g.block; ++i)
                cells.push_back(g.fine_cell_index(i, j));
    }
    return g;
}

Region make_region(const GridHierarchy& grid, int cx0, int cy0, int cx1, int cy1, int anchor) {
    Region r;
    r.cx0 = cx0;
    r.cy0 = cy0;
    r.cx1 = cx1;
    r.cy1 = cy1;
    r.anchor = anchor;

    r.cells.reserve(static_cast<std::size_t>(r.num_cells()));
    for (int j = cy0; j < cy1; ++j)
        for (int i = cx0; i < cx1; ++i)
            r.cells.push_back(grid.fine_cell_index(i, j));

    r.nodes.reserve(static_cast<std::size_t>(r.num_nodes()));
    for (int j = cy0; j <= cy1; ++j)
        for (int i = cx0; i <= cx1; ++i) {
            r.nodes.push_back(grid.fine_node_index(i, j));
            if (i == cx0 || i == cx1 || j == cy0 || j == cy1) {
                r.boundary.push_back(grid.fine_node_index(i, j));
                const bool on_domain =
                    i == 0 || i == grid.n_fine || j == 0 || j == grid.n_fine;
                r.boundary_on_domain.push_back(on_domain ? 1 : 0);
            }
        }
    return r;
}

Region neighborhood(const GridHierarchy& grid, int v) {
    if (v < 0 || v >= grid.num_coarse_vertices())
        throw RangeError("neighborhood: coarse vertex " + std::to_string(v) + " out of range");
    auto [ci, cj] = grid.coarse_vertex_ij(v);
    const int cc0 = std::max(ci - 1, 0);
    const int cc1 = std::min(ci + 1, grid.n_coarse);
    const int cr0 = std::max(cj - 1, 0);
    const int cr1 = std::min(cj + 1, grid.n_coarse);
    return make_region(grid, cc0 * grid.block, cr0 * grid.block, cc1 * grid.block,
                       cr1 * grid.block, v);
}

Region oversample(const GridHierarchy& grid, const Region& region, const OversampleSpec& spec) {
    const int ext = spec.kind == OversampleSpec::Kind::coarse_layers ? spec.amount * grid.block
                                                                     : spec.amount;
    return make_region(grid, std::max(region.cx0 - ext, 0), std::max(region.cy0 - ext, 0),
                       std::min(region.cx1 + ext, grid.n_fine),
                       std::min(region.cy1 + ext, grid.n_fine), region.anchor);
}

namespace {

// 1D hat profile on [c0, c1] (fine-node units) with apex at `a`; value at t.
double hat1d(int c0, int c1, int a, int t) {
    if (t <= a) return a == c0 ? 1.0 : double(t - c0) / double(a - c0);
    return double(c1 - t) / double(c1 - a);
}

} // namespace

PouEntry partition_of_unity(const GridHierarchy& grid, int v, const Region& region) {
    if (v < 0 || v >= grid.num_coarse_vertices())
        throw RangeError("partition_of_unity: coarse vertex " + std::to_string(v) + " out of range");
    auto [ci, cj] = grid.coarse_vertex_ij(v);
    const int ai = ci * grid.block; // anchor in fine-node units
    const int aj = cj * grid.block;
    if (ai < region.cx0 || ai > region.cx1 || aj < region.cy0 || aj > region.cy1)
        throw ContractError("partition_of_unity: region does not contain coarse vertex " +
                            std::to_string(v));

    const int nx = region.nodes_x();
    const int ny = region.nodes_y();
    Vec xi(nx), eta(ny);
    for (int i = 0; i < nx; ++i) xi[i] = hat1d(region.cx0, region.cx1, ai, region.cx0 + i);
    for (int j = 0; j < ny; ++j) eta[j] = hat1d(region.cy0, region.cy1, aj, region.cy0 + j);

    PouEntry e;
    e.chi.resize(region.num_nodes());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) e.chi[j * nx + i] = xi[i] * eta[j];

    // chi is bilinear within every fine cell (kinks sit on fine grid lines),
    // so the cell-center gradient is exact from the edge values.
    e.grad_sq.resize(region.num_cells());
    for (int j = 0; j < ny - 1; ++j)
        for (int i = 0; i < nx - 1; ++i) {
            const double xc = 0.5 * (xi[i] + xi[i + 1]);
            const double yc = 0.5 * (eta[j] + eta[j + 1]);
            const double dx = (xi[i + 1] - xi[i]) / grid.h;
            const double dy = (eta[j + 1] - eta[j]) / grid.h;
            e.grad_sq[j * (nx - 1) + i] = dx * dx * yc * yc + xc * xc * dy * dy;
        }
    return e;
}

NeighborhoodSet build_neighborhoods(const GridHierarchy& grid, const OversampleSpec& spec) {
    NeighborhoodSet nbh;
    const int nv = grid.num_coarse_vertices();
    nbh.omega.reserve(nv);
    nbh.omega_plus.reserve(nv);
    nbh.chi.reserve(nv);
    nbh.chi_plus.reserve(nv);
    for (int v = 0; v < nv; ++v) {
        Region w = neighborhood(grid, v);
        Region wp = oversample(grid, w, spec);
        nbh.chi.push_back(partition_of_unity(grid, v, w));
        nbh.chi_plus.push_back(partition_of_unity(grid, v, wp));
        nbh.omega.push_back(std::move(w));
        nbh.omega_plus.push_back(std::move(wp));
    }
    return nbh;
}

Vec pou_gradient_sum(const GridHierarchy& grid, const NeighborhoodSet& nbh) {
    Vec sum = Vec::Zero(grid.num_fine_cells());
    for (std::size_t v = 0; v < nbh.omega.size(); ++v) {
        const Region& w = nbh.omega[v];
        const Vec& gs = nbh.chi[v].grad_sq;
        for (std::size_t k = 0; k < w.cells.size(); ++k) sum[w.cells[k]] += gs[static_cast<int>(k)];
    }
    return sum;
}

} // namespace gmsfem
