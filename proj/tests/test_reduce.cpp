#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "gmsfem/assemble.hpp"
#include "gmsfem/errors.hpp"
#include "gmsfem/pencil.hpp"
#include "gmsfem/reduce.hpp"
#include "gmsfem/snapshot.hpp"
#include "support/oracles.hpp"

using namespace gmsfem;
namespace oracle = gmsfem::testing;

namespace {

struct Setup {
    GridHierarchy grid;
    Region omega;
    Region omega_plus;
    Vec kappa;
    SnapshotSpace snap;
    ReducedMatrices rm;
};

Setup harmonic_setup(int n_fine, int n_coarse, bool contrast) {
    Setup s{build_grids(n_fine, n_coarse), {}, {}, {}, {}, {}};
    const int v = (n_coarse / 2) * (n_coarse + 1) + n_coarse / 2;
    s.omega = neighborhood(s.grid, v);
    s.omega_plus = oversample(s.grid, s.omega, OversampleSpec::CoarseLayers(1));
    s.kappa = Vec::Ones(s.grid.num_fine_cells());
    if (contrast) {
        std::mt19937_64 rng(23);
        for (int c = 0; c < s.kappa.size(); ++c)
            if (rng() % 4 == 0) s.kappa[c] = 1e4;
    }
    s.snap = harmonic_snapshots(s.grid, s.omega, s.omega_plus, s.kappa);
    s.rm = reduced_matrices(s.grid, s.omega, s.omega_plus, s.snap.basis, s.snap.basis_plus,
                            s.kappa, s.kappa);
    return s;
}

int span_rank(const Mat& a, const Mat& b, double tol = 1e-8) {
    Mat concat(a.rows(), a.cols() + b.cols());
    concat << a, b;
    Eigen::ColPivHouseholderQR<Mat> qr(concat);
    qr.setThreshold(tol);
    return static_cast<int>(qr.rank());
}

} // namespace

TEST_CASE("reduced matrices: identity parent returns the assembled matrices") {
    const GridHierarchy g = build_grids(8, 2);
    const Region w = make_region(g, 2, 2, 6, 6);
    const Region wp = make_region(g, 0, 0, 8, 8);
    Vec kappa(g.num_fine_cells());
    for (int c = 0; c < kappa.size(); ++c) kappa[c] = 1.0 + (c % 4);

    Mat parent = Mat::Identity(w.num_nodes(), w.num_nodes());
    // a parent over omega_plus whose restriction is the omega identity
    Mat parent_plus = Mat::Zero(wp.num_nodes(), w.num_nodes());
    for (int k = 0; k < w.num_nodes(); ++k)
        parent_plus(wp.local_node(g, w.nodes[static_cast<std::size_t>(k)]), k) = 1.0;

    const ReducedMatrices rm = reduced_matrices(g, w, wp, parent, parent_plus, kappa, kappa);
    CHECK((rm.A - Mat(stiffness(g, w, kappa))).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((rm.S - Mat(weighted_mass(g, w, kappa))).cwiseAbs().maxCoeff() < 1e-14);

    // symmetry at the congruence level
    CHECK((rm.A_plus - rm.A_plus.transpose()).cwiseAbs().maxCoeff() <=
          1e-13 * rm.A_plus.cwiseAbs().maxCoeff());
}

TEST_CASE("reduced mass entries equal direct quadrature on a 4x4 region") {
    const Setup s = harmonic_setup(8, 2, true);
    // independent entrywise quadrature of the realized snapshot products
    const Mat S_direct =
        s.snap.basis.transpose() * oracle::dense_mass_oracle(s.grid, s.omega, s.kappa) *
        s.snap.basis;
    CHECK((s.rm.S - S_direct).cwiseAbs().maxCoeff() <= 1e-12 * S_direct.cwiseAbs().maxCoeff());

    // the ring contribution A_plus - A is positive semidefinite
    const Mat diff = 0.5 * (s.rm.A_plus + s.rm.A_plus.transpose()) -
                     0.5 * (s.rm.A + s.rm.A.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(diff);
    CHECK(es.eigenvalues()[0] >= -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("offline selection bookkeeping") {
    const Setup s = harmonic_setup(12, 3, true);

    const ReducedSpace full =
        offline_space(s.snap, s.rm, Variant::off1, Selection::Count(-1));
    const int solvable = full.size();
    CHECK(full.lambda_next == kNoExcludedEigenvalue);
    // realized columns stay independent and live inside the snapshot span
    CHECK(span_rank(full.basis_plus, Mat(full.basis_plus.rows(), 0)) == full.size());
    CHECK(span_rank(full.basis_plus, s.snap.basis_plus) == s.snap.size());

    const ReducedSpace few = offline_space(s.snap, s.rm, Variant::off1, Selection::Count(5));
    CHECK(few.size() == 5);
    CHECK(few.lambda_next > 0.0);
    CHECK(few.kept_eigenvalues.size() == 5);
    // prefix property
    CHECK((few.coords - full.coords.leftCols(5)).cwiseAbs().maxCoeff() == 0.0);

    const ReducedSpace thr =
        offline_space(s.snap, s.rm, Variant::off1, Selection::Threshold(few.lambda_next));
    CHECK(thr.size() >= 5);
    CHECK(thr.lambda_next >= few.lambda_next);

    CHECK_THROWS_AS(offline_space(s.snap, s.rm, Variant::off1, Selection::Count(solvable + 1)),
                    RangeError);
    CHECK_THROWS_AS(offline_space(s.snap, s.rm, Variant::on1, Selection::Count(1)),
                    ContractError);
}

TEST_CASE("eigen residuals of every offline pencil") {
    const Setup s = harmonic_setup(12, 3, true);
    const std::array<std::pair<const Mat*, const Mat*>, 5> pairs = {
        std::pair<const Mat*, const Mat*>{&s.rm.A, &s.rm.S},
        {&s.rm.A_plus, &s.rm.A},
        {&s.rm.A, &s.rm.S_plus},
        {&s.rm.A_plus, &s.rm.S_plus},
        {&s.rm.A_plus, &s.rm.S},
    };
    for (const auto& [left, right] : pairs) {
        const PencilSolution sol = solve_pencil(*left, *right);
        const int kept = std::min<int>(10, static_cast<int>(sol.eigenvalues.size()));
        for (int k = 0; k < kept; ++k) CHECK(pencil_residual(*left, *right, sol, k) < 1e-8);
        for (int k = 1; k < static_cast<int>(sol.eigenvalues.size()); ++k)
            CHECK(sol.eigenvalues[k] >= sol.eigenvalues[k - 1]);
    }
}

TEST_CASE("multi union prunes duplicates and records both excluded eigenvalues") {
    const Setup s = harmonic_setup(12, 3, true);
    const std::array<Variant, 2> same = {Variant::off1, Variant::off1};
    const std::array<Selection, 2> sels = {Selection::Count(6), Selection::Count(6)};
    const ReducedSpace dup = multi_offline_space(s.snap, s.rm, same, sels);
    CHECK(dup.size() == 6);

    const std::array<Variant, 2> pair = {Variant::off1, Variant::off4};
    const ReducedSpace multi = multi_offline_space(s.snap, s.rm, pair, sels);
    CHECK(multi.size() >= 6);
    CHECK(multi.size() <= 12);
    CHECK(multi.variant == Variant::multi);
    CHECK(std::isfinite(multi.lambda_next));
    CHECK(std::isfinite(multi.lambda_next_secondary));
    // union rank equals the rank of the concatenated realized columns
    const ReducedSpace a = offline_space(s.snap, s.rm, Variant::off1, sels[0]);
    const ReducedSpace b = offline_space(s.snap, s.rm, Variant::off4, sels[1]);
    CHECK(multi.size() == span_rank(a.basis_plus, b.basis_plus));

    const std::array<Variant, 1> lone = {Variant::off1};
    const std::array<Selection, 1> lone_sel = {Selection::Count(3)};
    CHECK_THROWS_AS(multi_offline_space(s.snap, s.rm, lone, lone_sel), ContractError);
}

TEST_CASE("online spaces nest inside the offline space") {
    const Setup s = harmonic_setup(12, 3, true);
    const ReducedSpace off = offline_space(s.snap, s.rm, Variant::off3, Selection::Count(10));

    Vec kappa_mu = s.kappa * 1.7;
    const ReducedSpace on_full =
        online_space(s.grid, off, Variant::on3, kappa_mu, kappa_mu, Selection::Count(-1));
    CHECK(on_full.size() == off.size());
    // same realized span
    CHECK(span_rank(on_full.basis_plus, off.basis_plus) == off.size());

    const ReducedSpace on_small =
        online_space(s.grid, off, Variant::on3, kappa_mu, kappa_mu, Selection::Count(4));
    CHECK(on_small.size() == 4);
    CHECK(span_rank(on_small.basis_plus, off.basis_plus) == off.size());
    CHECK(span_rank(on_small.basis_plus, s.snap.basis_plus) == s.snap.size());

    CHECK_THROWS_AS(online_space(s.grid, off, Variant::off1, kappa_mu, kappa_mu,
                                 Selection::Count(2)),
                    ContractError);
}

TEST_CASE("lambda_star takes the minimum over truncated neighborhoods") {
    ReducedSpace a, b, c;
    a.lambda_next = 3.0;
    b.lambda_next = 7.0;
    c.lambda_next = kNoExcludedEigenvalue;
    const std::array<ReducedSpace, 3> all = {a, b, c};
    CHECK(lambda_star(all) == 3.0);
    const std::array<ReducedSpace, 1> none = {c};
    CHECK(lambda_star(none) == kNoExcludedEigenvalue);
    const std::array<ReducedSpace, 2> two = {a, b};
    CHECK(lambda_star(two) == 3.0);
}

TEST_CASE("off5 worst-case quotient beats the multi union of equal dimension") {
    // small constant-free spectral snapshot space so the quotient can be
    // brute forced with a definite oversampled stiffness
    const GridHierarchy g = build_grids(8, 2);
    const int v = 1 * 3 + 1;
    const Region w = neighborhood(g, v);
    const Region wp = oversample(g, w, OversampleSpec::CoarseLayers(1));
    Vec kappa = Vec::Ones(g.num_fine_cells());
    for (int c = 0; c < kappa.size(); ++c)
        if ((c / 8 + c % 8) % 3 == 0) kappa[c] = 1e3;
    SnapshotSpace snap = spectral_snapshots(g, w, wp, kappa, kappa, 13);
    snap.basis = snap.basis.rightCols(12).eval();
    snap.basis_plus = snap.basis_plus.rightCols(12).eval();
    snap.eigenvalues = snap.eigenvalues.tail(12).eval();
    snap.columns.erase(snap.columns.begin());
    const ReducedMatrices rm =
        reduced_matrices(g, w, wp, snap.basis, snap.basis_plus, kappa, kappa);

    const std::array<Variant, 2> pair = {Variant::off1, Variant::off4};
    const std::array<Selection, 2> sels = {Selection::Count(2), Selection::Count(2)};
    const ReducedSpace multi = multi_offline_space(snap, rm, pair, sels);
    const ReducedSpace off5 =
        offline_space(snap, rm, Variant::off5, Selection::Count(multi.size()));

    const double gamma_off5 = oracle::supinf_rayleigh(rm.S, rm.A_plus, off5.coords);
    const double gamma_multi = oracle::supinf_rayleigh(rm.S, rm.A_plus, multi.coords);
    CHECK(gamma_off5 <= gamma_multi * (1.0 + 1e-8) + 1e-12);
}
