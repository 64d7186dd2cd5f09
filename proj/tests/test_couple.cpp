#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gmsfem/assemble.hpp"
#include "gmsfem/coeff.hpp"
#include "gmsfem/couple.hpp"
#include "gmsfem/errors.hpp"
#include "gmsfem/metrics.hpp"
#include "gmsfem/reduce.hpp"
#include "gmsfem/snapshot.hpp"
#include "support/oracles.hpp"

using namespace gmsfem;
namespace oracle = gmsfem::testing;

namespace {

struct World {
    GridHierarchy grid;
    NeighborhoodSet nbh;
    Vec kappa;
    Vec f;
    std::vector<SnapshotSpace> snaps; // per coarse vertex, interior filled
};

World make_world(int n_fine, int n_coarse, bool contrast, double f_value,
                 const OversampleSpec& os = OversampleSpec::CoarseLayers(1)) {
    World w{build_grids(n_fine, n_coarse), {}, {}, {}, {}};
    w.nbh = build_neighborhoods(w.grid, os);
    w.kappa = contrast ? generate_field({"channels", 1e4, 3, 1, 31}, n_fine)
                       : Vec::Ones(w.grid.num_fine_cells());
    w.f = Vec::Constant(w.grid.num_fine_cells(), f_value);
    w.snaps.resize(static_cast<std::size_t>(w.grid.num_coarse_vertices()));
    for (int v = 0; v < w.grid.num_coarse_vertices(); ++v)
        if (w.grid.coarse_vertex_is_interior(v))
            w.snaps[static_cast<std::size_t>(v)] =
                harmonic_snapshots(w.grid, w.nbh.omega[v], w.nbh.omega_plus[v], w.kappa);
    return w;
}

std::vector<const Mat*> offline_bases(const World& w, Variant variant, const Selection& sel,
                                      std::vector<ReducedSpace>& storage) {
    storage.assign(static_cast<std::size_t>(w.grid.num_coarse_vertices()), {});
    std::vector<const Mat*> bases(storage.size(), nullptr);
    for (int v = 0; v < w.grid.num_coarse_vertices(); ++v) {
        if (!w.grid.coarse_vertex_is_interior(v)) continue;
        const std::size_t sv = static_cast<std::size_t>(v);
        const ReducedMatrices rm =
            reduced_matrices(w.grid, w.nbh.omega[v], w.nbh.omega_plus[v], w.snaps[sv].basis,
                             w.snaps[sv].basis_plus, w.kappa, w.kappa);
        storage[sv] = offline_space(w.snaps[sv], rm, variant, sel);
        bases[sv] = &storage[sv].basis;
    }
    return bases;
}

} // namespace

TEST_CASE("lifting is exact on the domain boundary, columns vanish there") {
    const World w = make_world(20, 4, true, 1.0);
    const auto g = [](double x, double y) { return 0.5 + 2.0 * x - y; };
    std::vector<ReducedSpace> storage;
    const auto bases = offline_bases(w, Variant::off1, Selection::Count(3), storage);
    const MultiscaleOperator op = build_operator(w.grid, w.nbh, bases, g);

    const Region dom = w.grid.domain_region();
    for (std::size_t k = 0; k < dom.boundary.size(); ++k) {
        auto [x, y] = w.grid.node_coords(dom.boundary[k]);
        CHECK(op.lifting[dom.boundary[k]] == doctest::Approx(g(x, y)).epsilon(1e-13));
        for (int c = 0; c < op.dim(); ++c)
            CHECK(op.R.coeff(dom.boundary[k], c) == 0.0);
    }

    // interior coarse vertex count times per-vertex modes
    CHECK(op.dim() == 9 * 3);
}

TEST_CASE("with one coarse cell the lifting interpolates linear data everywhere") {
    const GridHierarchy g = build_grids(8, 1);
    const auto nbh = build_neighborhoods(g, OversampleSpec::CoarseLayers(1));
    const auto lin = [](double x, double y) { return 1.0 - x + 4.0 * y; };
    std::vector<const Mat*> bases(static_cast<std::size_t>(g.num_coarse_vertices()), nullptr);
    const MultiscaleOperator op = build_operator(g, nbh, bases, lin);
    CHECK(op.dim() == 0);
    const Vec exact = oracle::nodal_function(g, lin);
    CHECK((op.lifting - exact).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("patch test: coarse solve reproduces linear solutions") {
    // wide oversampling for the pencils whose right side lives on omega, the
    // thin ring for the S-plus pencils, and no ring at all for off5: its
    // smallest mode picks up ring energy whenever the oversampled boundary is
    // larger than the neighborhood one
    const World w3 = make_world(16, 4, false, 0.0);
    const World w1 = make_world(16, 4, false, 0.0, OversampleSpec::FineLayers(1));
    const World w0 = make_world(16, 2, false, 0.0);
    const auto lin = [](double x, double y) { return 0.25 * x + 0.75 * y; };
    std::vector<ReducedSpace> storage;
    const auto run = [&](const World& w, Variant variant) {
        const Vec exact = oracle::nodal_function(w.grid, lin);
        const auto bases = offline_bases(w, variant, Selection::Count(2), storage);
        const MultiscaleOperator op = build_operator(w.grid, w.nbh, bases, lin);
        const Vec u = solve_coarse(w.grid, op, w.kappa, w.f);
        INFO("variant ", std::string(variant_name(variant)));
        CHECK((u - exact).cwiseAbs().maxCoeff() < 1e-10);
    };
    run(w3, Variant::off1);
    run(w3, Variant::off2);
    run(w1, Variant::off3);
    run(w1, Variant::off4);
    run(w0, Variant::off5);
}

TEST_CASE("full local spaces reproduce the fine solution") {
    for (auto [nf, nc] : {std::pair{8, 2}, std::pair{12, 3}}) {
        const GridHierarchy grid = build_grids(nf, nc);
        const auto nbh = build_neighborhoods(grid, OversampleSpec::CoarseLayers(1));
        Vec kappa = Vec::Ones(grid.num_fine_cells());
        for (int c = 0; c < kappa.size(); ++c)
            if ((c % 7) == 0) kappa[c] = 100.0;
        const Vec f = Vec::Constant(grid.num_fine_cells(), 1.0);
        const auto g = [](double x, double y) { return x + y; };

        std::vector<Mat> identities(static_cast<std::size_t>(grid.num_coarse_vertices()));
        std::vector<const Mat*> bases(identities.size(), nullptr);
        for (int v = 0; v < grid.num_coarse_vertices(); ++v)
            if (grid.coarse_vertex_is_interior(v)) {
                identities[static_cast<std::size_t>(v)] =
                    Mat::Identity(nbh.omega[v].num_nodes(), nbh.omega[v].num_nodes());
                bases[static_cast<std::size_t>(v)] = &identities[static_cast<std::size_t>(v)];
            }
        const MultiscaleOperator op = build_operator(grid, nbh, bases, g);
        const Vec u_coarse = solve_coarse(grid, op, kappa, f);
        const Vec u_fine = solve_fine(grid, kappa, f, g);
        const ErrorPair err = relative_error(grid, u_fine, u_coarse, kappa, "fine");
        CHECK(err.h1_pct < 1e-9 * 100.0);
    }
}

TEST_CASE("fine solve agrees with the dense oracle and is linear in f") {
    const GridHierarchy grid = build_grids(4, 2);
    Vec kappa(grid.num_fine_cells());
    for (int c = 0; c < kappa.size(); ++c) kappa[c] = 1.0 + (c % 3) * 4.0;
    const auto g = [](double x, double y) { return x - 0.5 * y; };
    const Vec f1 = Vec::Constant(grid.num_fine_cells(), 2.0);

    const Vec u = solve_fine(grid, kappa, f1, g);
    const Vec u_oracle = oracle::dense_fine_solve_oracle(grid, kappa, f1, g);
    CHECK((u - u_oracle).cwiseAbs().maxCoeff() < 1e-12 * u_oracle.cwiseAbs().maxCoeff());

    const auto zero = [](double, double) { return 0.0; };
    const Vec f2 = Vec::Constant(grid.num_fine_cells(), -0.5);
    const Vec ua = solve_fine(grid, kappa, f1, zero);
    const Vec ub = solve_fine(grid, kappa, f2, zero);
    const Vec uab = solve_fine(grid, kappa, f1 + f2, zero);
    CHECK((ua + ub - uab).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("snapshot reference: identical spaces give zero error, sweeps are monotone") {
    // thin ring and a unit coefficient: the only dependencies in the
    // restricted snapshot family are exact ones, which both paths drop
    // identically, so the full offline space equals the snapshot space
    const World w = make_world(16, 4, false, 1.0, OversampleSpec::FineLayers(1));
    const auto g = [](double x, double y) { return x + y; };
    const Vec u_snap = solve_snapshot_reference(w.grid, w.nbh, w.snaps, w.kappa, w.f, g);

    // offline space equal to the snapshot space reproduces the reference
    std::vector<ReducedSpace> storage;
    const auto bases = offline_bases(w, Variant::off1, Selection::Count(-1), storage);
    const MultiscaleOperator op = build_operator(w.grid, w.nbh, bases, g);
    const Vec u_full = solve_coarse(w.grid, op, w.kappa, w.f);
    const ErrorPair same = relative_error(w.grid, u_snap, u_full, w.kappa, "snapshot");
    CHECK(same.h1_pct < 1e-6);

    // truncation sweep vs the snapshot reference is non-increasing
    double last = std::numeric_limits<double>::infinity();
    for (int count : {2, 6, 12, 20}) {
        const auto b = offline_bases(w, Variant::off3, Selection::Count(count), storage);
        const MultiscaleOperator o = build_operator(w.grid, w.nbh, b, g);
        const Vec u = solve_coarse(w.grid, o, w.kappa, w.f);
        const double err = relative_error(w.grid, u_snap, u, w.kappa, "snapshot").h1_pct;
        CHECK(err <= last + 1e-6);
        last = err;
    }
}

TEST_CASE("galerkin energy optimality against random competitors") {
    const World w = make_world(12, 3, true, 1.0);
    const auto g = [](double x, double y) { return x; };
    std::vector<ReducedSpace> storage;
    const auto bases = offline_bases(w, Variant::off1, Selection::Count(4), storage);
    const MultiscaleOperator op = build_operator(w.grid, w.nbh, bases, g);
    const Vec u_h = solve_coarse(w.grid, op, w.kappa, w.f);
    const Vec u = solve_fine(w.grid, w.kappa, w.f, g);

    const auto h1 = [&](const Vec& field) {
        return weighted_norms(w.grid, w.kappa, field).second;
    };
    const double best = h1(u - u_h);
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 8; ++trial) {
        Vec c(op.dim());
        for (int k = 0; k < c.size(); ++k) c[k] = ((rng() % 2000) / 1000.0) - 1.0;
        const Vec competitor = op.R * c + op.lifting;
        CHECK(h1(u - competitor) >= best - 1e-10);
    }

    // coarse Gram matrix is symmetric positive definite
    const SpMat A = stiffness(w.grid, w.grid.domain_region(), w.kappa);
    const Mat Ac = Mat(SpMat(op.R.transpose()) * (A * op.R));
    CHECK((Ac - Ac.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * Ac.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Ac + Ac.transpose()));
    CHECK(es.eigenvalues()[0] > 0.0);
}

TEST_CASE("missing interior basis is a contract error") {
    const World w = make_world(8, 2, false, 1.0);
    std::vector<const Mat*> bases(static_cast<std::size_t>(w.grid.num_coarse_vertices()),
                                  nullptr);
    CHECK_THROWS_AS(build_operator(w.grid, w.nbh, bases, [](double, double) { return 0.0; }),
                    ContractError);
}
