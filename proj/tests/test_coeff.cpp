#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmsfem/coeff.hpp"
#include "gmsfem/errors.hpp"
#include "gmsfem/grid.hpp"

using namespace gmsfem;

namespace {

CoefficientField two_term_field(int n) {
    Vec k1 = Vec::Ones(n * n);
    Vec k2 = Vec::Ones(n * n);
    for (int c = 0; c < n * n; ++c) {
        k1[c] = 1.0 + (c % 7);
        k2[c] = 2.0 + (c % 3);
    }
    return make_field(n, k1, k2);
}

} // namespace

TEST_CASE("evaluate: affine combination and admissibility") {
    const CoefficientField f = two_term_field(6);
    const Vec mid = evaluate(f, (Vec(2) << 0.5, 0.5).finished());
    CHECK((mid - 0.5 * f.terms[0] - 0.5 * f.terms[1]).cwiseAbs().maxCoeff() == 0.0);

    // vertex of the parameter box picks out one term
    const Vec k1 = evaluate(f, (Vec(2) << 1.0, 0.0).finished());
    CHECK((k1 - f.terms[0]).cwiseAbs().maxCoeff() == 0.0);

    const CoefficientField one = make_field(4, Vec::Ones(16));
    CHECK(evaluate(one, Vec::Ones(1)).maxCoeff() == 1.0);
    CHECK(evaluate(one, Vec::Ones(1)).minCoeff() == 1.0);

    CHECK_THROWS_AS(evaluate(f, Vec::Ones(1)), ParameterError);
    CHECK_THROWS_AS(evaluate(f, (Vec(2) << 1.0, -0.1).finished()), ParameterError);
    CHECK_THROWS_AS(evaluate(f, (Vec(2) << 0.0, 0.0).finished()), ParameterError);
}

TEST_CASE("evaluate: single linear term scales linearly") {
    const CoefficientField f = make_field(5, Vec::LinSpaced(25, 1.0, 3.0));
    const Vec a = evaluate(f, Vec::Constant(1, 0.7));
    const Vec b = evaluate(f, Vec::Constant(1, 1.4));
    CHECK((2.0 * a - b).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("parameter_average") {
    const CoefficientField f = two_term_field(5);
    const Vec mu1 = (Vec(2) << 0.3, 0.9).finished();
    CHECK((parameter_average(f, {mu1}) - evaluate(f, mu1)).cwiseAbs().maxCoeff() == 0.0);

    // symmetric samples around (0.5, 0.5) average to the midpoint field
    const std::vector<Vec> sym = {(Vec(2) << 0.2, 0.8).finished(),
                                  (Vec(2) << 0.8, 0.2).finished()};
    const Vec avg = parameter_average(f, sym);
    const Vec mid = evaluate(f, (Vec(2) << 0.5, 0.5).finished());
    CHECK((avg - mid).cwiseAbs().maxCoeff() < 1e-14);

    // a parameter-independent field reproduces itself
    CoefficientField fixed = make_field(4, Vec::Constant(16, 3.0));
    fixed.theta.push_back([](double) { return 1.0; });
    const std::vector<Vec> mus = {Vec::Constant(1, 0.1), Vec::Constant(1, 0.9)};
    CHECK((parameter_average(fixed, mus) - Vec::Constant(16, 3.0)).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(parameter_average(f, {}), ParameterError);
}

TEST_CASE("mass weight: identity and pou-weighted") {
    const GridHierarchy g = build_grids(10, 2);
    const auto nbh = build_neighborhoods(g, OversampleSpec::CoarseLayers(1));
    const Vec ones = Vec::Ones(g.num_fine_cells());

    const MassWeight ident = mass_weight(ones, MassWeight::Kind::identity);
    CHECK((ident.values - ones).cwiseAbs().maxCoeff() == 0.0);

    const Vec grad_sum = pou_gradient_sum(g, nbh);
    const MassWeight pw = mass_weight(ones, MassWeight::Kind::pou_weighted, &grad_sum, g.H);
    CHECK(pw.values.minCoeff() > 0.0);

    // center cell of a coarse cell: sum |grad chi|^2 = 2/H^2, so ktilde = 2
    const int center_cell = g.fine_cell_index(2, 2); // block=5, center at (2,2)
    CHECK(pw.values[center_cell] == doctest::Approx(2.0).epsilon(1e-12));

    // linear in kappa
    const MassWeight pw2 = mass_weight(2.0 * ones, MassWeight::Kind::pou_weighted, &grad_sum, g.H);
    CHECK((pw2.values - 2.0 * pw.values).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(mass_weight(ones, MassWeight::Kind::pou_weighted), ContractError);
}

TEST_CASE("chop divides the ring only") {
    const GridHierarchy g = build_grids(20, 4);
    const Region w = neighborhood(g, 2 * 6 + 2);
    const Region wp = oversample(g, w, OversampleSpec::CoarseLayers(1));
    const Vec kappa = Vec::Constant(g.num_fine_cells(), 8.0);

    const Vec chopped = chop(g, kappa, w, wp, 1e4);
    for (int c = 0; c < g.num_fine_cells(); ++c) {
        const bool in_w = w.local_cell(g, c) >= 0;
        const bool in_wp = wp.local_cell(g, c) >= 0;
        if (in_wp && !in_w)
            CHECK(chopped[c] == doctest::Approx(8.0e-4));
        else
            CHECK(chopped[c] == 8.0);
    }

    CHECK((chop(g, kappa, w, wp, 1.0) - kappa).cwiseAbs().maxCoeff() == 0.0);
    CHECK((chop(g, kappa, w, w, 1e4) - kappa).cwiseAbs().maxCoeff() == 0.0);

    // multiplicative on the ring
    const Vec twice = chop(g, chop(g, kappa, w, wp, 10.0), w, wp, 20.0);
    const Vec once = chop(g, kappa, w, wp, 200.0);
    CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(chop(g, kappa, wp, w, 2.0), ContractError);
    CHECK_THROWS_AS(chop(g, kappa, w, wp, 0.0), ContractError);
}

TEST_CASE("generate_field kinds and determinism") {
    const Vec c = generate_field({"constant", 1e6, 3, 1, 42}, 8);
    CHECK(c.minCoeff() == 1.0);
    CHECK(c.maxCoeff() == 1.0);

    FieldSpec channels{"channels", 1e4, 3, 1, 7};
    const Vec f = generate_field(channels, 16);
    int hot = 0;
    for (int k = 0; k < f.size(); ++k)
        if (f[k] == 1e4) ++hot;
    CHECK(hot == 3 * 16); // three one-cell strips across the full width
    CHECK(f.minCoeff() == 1.0);

    const Vec again = generate_field(channels, 16);
    CHECK((f - again).cwiseAbs().maxCoeff() == 0.0);

    FieldSpec blobs{"inclusions", 100.0, 4, 3, 11};
    const Vec inc = generate_field(blobs, 12);
    CHECK(inc.maxCoeff() == 100.0);
    CHECK(inc.minCoeff() == 1.0);
    CHECK((inc - generate_field(blobs, 12)).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(generate_field({"perlin", 2.0, 1, 1, 0}, 8), ConfigError);
    CHECK_THROWS_AS(generate_field({"channels", -1.0, 1, 1, 0}, 8), ConfigError);
}
