#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gmsfem/types.hpp"

namespace gmsfem {

struct Region;

/// Nested uniform fine/coarse quadrilateral meshes on the unit square.
/// Node and cell indices are lexicographic with x running fastest; this
/// ordering is fixed so eigenvectors and tables reproduce across runs.
struct GridHierarchy {
    int n_fine = 0;   // fine cells per side
    int n_coarse = 0; // coarse cells per side
    int block = 0;    // fine cells per coarse cell per side
    double h = 0.0;
    double H = 0.0;

    std::vector<int> coarse_vertex_node;             // coarse vertex -> fine node
    std::vector<std::vector<int>> coarse_cell_cells; // coarse cell -> fine cells

    int nodes_per_side() const { return n_fine + 1; }
    int num_fine_nodes() const { return nodes_per_side() * nodes_per_side(); }
    int num_fine_cells() const { return n_fine * n_fine; }
    int num_coarse_vertices() const { return (n_coarse + 1) * (n_coarse + 1); }
    int num_coarse_cells() const { return n_coarse * n_coarse; }

    int fine_node_index(int i, int j) const { return j * nodes_per_side() + i; }
    int fine_cell_index(int i, int j) const { return j * n_fine + i; }

    std::pair<int, int> fine_node_ij(int node) const {
        return {node % nodes_per_side(), node / nodes_per_side()};
    }
    std::pair<int, int> fine_cell_ij(int cell) const {
        return {cell % n_fine, cell / n_fine};
    }
    std::pair<double, double> node_coords(int node) const {
        auto [i, j] = fine_node_ij(node);
        return {i * h, j * h};
    }
    std::pair<double, double> cell_center(int cell) const {
        auto [i, j] = fine_cell_ij(cell);
        return {(i + 0.5) * h, (j + 0.5) * h};
    }

    std::pair<int, int> coarse_vertex_ij(int v) const {
        return {v % (n_coarse + 1), v / (n_coarse + 1)};
    }
    bool coarse_vertex_is_interior(int v) const {
        auto [i, j] = coarse_vertex_ij(v);
        return i > 0 && i < n_coarse && j > 0 && j < n_coarse;
    }

    Region domain_region() const;
};

/// Axis-aligned rectangle of fine cells clipped to the domain, with its
/// node set, topological boundary and the anchor coarse vertex.
struct Region {
    // fine-cell rectangle [cx0, cx1) x [cy0, cy1); node rectangle is inclusive
    int cx0 = 0, cy0 = 0, cx1 = 0, cy1 = 0;
    int anchor = -1;

    std::vector<int> cells; // global fine-cell ids, lexicographic
    std::vector<int> nodes; // global fine-node ids, lexicographic
    std::vector<int> boundary; // global node ids on the rectangle boundary
    std::vector<std::uint8_t> boundary_on_domain; // aligned with `boundary`

    int nodes_x() const { return cx1 - cx0 + 1; }
    int nodes_y() const { return cy1 - cy0 + 1; }
    int num_nodes() const { return nodes_x() * nodes_y(); }
    int num_cells() const { return (cx1 - cx0) * (cy1 - cy0); }

    bool same_extents(const Region& o) const {
        return cx0 == o.cx0 && cy0 == o.cy0 && cx1 == o.cx1 && cy1 == o.cy1;
    }
    /// Rectangle containment (this inside `outer`).
    bool inside(const Region& outer) const {
        return cx0 >= outer.cx0 && cy0 >= outer.cy0 && cx1 <= outer.cx1 && cy1 <= outer.cy1;
    }

    /// Region-local index of a global fine node, or -1 if outside.
    int local_node(const GridHierarchy& grid, int global_node) const {
        const int i = global_node % grid.nodes_per_side();
        const int j = global_node / grid.nodes_per_side();
        if (i < cx0 || i > cx1 || j < cy0 || j > cy1) return -1;
        return (j - cy0) * nodes_x() + (i - cx0);
    }
    /// Region-local index of a global fine cell, or -1 if outside.
    int local_cell(const GridHierarchy& grid, int global_cell) const {
        const int i = global_cell % grid.n_fine;
        const int j = global_cell / grid.n_fine;
        if (i < cx0 || i >= cx1 || j < cy0 || j >= cy1) return -1;
        return (j - cy0) * (cx1 - cx0) + (i - cx0);
    }
};

/// Values of one partition-of-unity function over one region: nodal values
/// (region-local ordering) and the cell-center |grad chi|^2 per region cell.
struct PouEntry {
    Vec chi;
    Vec grad_sq;
};

/// Oversampling prescription: grow a neighborhood by whole coarse-cell layers
/// or by fine-cell layers; growth is clipped at the domain boundary.
struct OversampleSpec {
    enum class Kind { coarse_layers, fine_layers };
    Kind kind = Kind::coarse_layers;
    int amount = 1;

    static OversampleSpec CoarseLayers(int k) { return {Kind::coarse_layers, k}; }
    static OversampleSpec FineLayers(int m) { return {Kind::fine_layers, m}; }
};

GridHierarchy build_grids(int n_fine, int n_coarse);

Region make_region(const GridHierarchy& grid, int cx0, int cy0, int cx1, int cy1, int anchor = -1);

/// Union of the coarse cells touching coarse vertex v.
Region neighborhood(const GridHierarchy& grid, int v);

Region oversample(const GridHierarchy& grid, const Region& region, const OversampleSpec& spec);

/// Tensor-product hat anchored at coarse vertex v, scaled to the region
/// rectangle: equals the standard bilinear hat on the neighborhood itself and
/// the linearly decaying bump on an oversampled rectangle.
PouEntry partition_of_unity(const GridHierarchy& grid, int v, const Region& region);

/// Per-vertex neighborhoods, oversampled regions and partition-of-unity data.
struct NeighborhoodSet {
    std::vector<Region> omega;
    std::vector<Region> omega_plus;
    std::vector<PouEntry> chi;      // on omega
    std::vector<PouEntry> chi_plus; // on omega_plus
};

NeighborhoodSet build_neighborhoods(const GridHierarchy& grid, const OversampleSpec& spec);

/// Per-fine-cell sum over vertices of |grad chi_i|^2 (cell-center values),
/// the ingredient of the partition-of-unity weighted mass coefficient.
Vec pou_gradient_sum(const GridHierarchy& grid, const NeighborhoodSet& nbh);

} // namespace gmsfem
