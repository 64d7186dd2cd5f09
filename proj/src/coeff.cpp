#include "gmsfem/coeff.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "gmsfem/errors.hpp"

namespace gmsfem {

Vec evaluate(const CoefficientField& field, const Vec& mu) {
    if (mu.size() != field.num_terms())
        throw ParameterError("evaluate: expected " + std::to_string(field.num_terms()) +
                             " parameters, got " + std::to_string(mu.size()));
    // box vertices with zero entries are admissible as long as the evaluated
    // coefficient stays positive
    for (int q = 0; q < mu.size(); ++q)
        if (!(mu[q] >= 0.0))
            throw ParameterError("evaluate: mu[" + std::to_string(q) + "] = " +
                                 std::to_string(mu[q]) + " is negative");

    const int n_cells = field.n_fine * field.n_fine;
    Vec out = Vec::Zero(n_cells);
    for (int q = 0; q < field.num_terms(); ++q) {
        const bool has_law = q < static_cast<int>(field.theta.size()) && field.theta[q];
        const double w = has_law ? field.theta[q](mu[q]) : mu[q];
        out += w * field.terms[q];
    }
    if (!(out.minCoeff() > 0.0))
        throw ParameterError("evaluate: coefficient is not positive at this mu");
    return out;
}

Vec parameter_average(const CoefficientField& field, const std::vector<Vec>& mus) {
    if (mus.empty()) throw ParameterError("parameter_average: empty sample set");
    Vec avg = Vec::Zero(field.n_fine * field.n_fine);
    for (const Vec& mu : mus) avg += evaluate(field, mu);
    avg /= static_cast<double>(mus.size());
    return avg;
}

MassWeight mass_weight(const Vec& kappa_cells, MassWeight::Kind kind, const Vec* pou_grad_sum,
                       double H) {
    MassWeight w;
    w.kind = kind;
    if (kind == MassWeight::Kind::identity) {
        w.values = kappa_cells;
        return w;
    }
    if (pou_grad_sum == nullptr || pou_grad_sum->size() != kappa_cells.size() || !(H > 0.0))
        throw ContractError("mass_weight: pou-weighted variant needs the gradient sum and H");
    w.values = kappa_cells.cwiseProduct(H * H * (*pou_grad_sum));
    return w;
}

Vec chop(const GridHierarchy& grid, const Vec& kappa_cells, const Region& omega,
         const Region& omega_plus, double factor) {
    if (!omega.inside(omega_plus))
        throw ContractError("chop: omega is not nested in omega_plus");
    if (!(factor > 0.0)) throw ContractError("chop: factor must be positive");
    Vec out = kappa_cells;
    for (int cell : omega_plus.cells)
        if (omega.local_cell(grid, cell) < 0) out[cell] /= factor;
    return out;
}

namespace {

// Deterministic integer draw; std::uniform_int_distribution is not portable
// across standard libraries, the raw engine stream is.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

} // namespace

Vec generate_field(const FieldSpec& spec, int n_fine) {
    if (!(spec.contrast > 0.0)) throw ConfigError("generate_field: contrast must be positive");
    if (n_fine < 1) throw ConfigError("generate_field: n_fine must be >= 1");
    Vec field = Vec::Ones(n_fine * n_fine);

    if (spec.kind == "constant") return field;

    std::mt19937_64 rng(spec.seed);
    if (spec.kind == "channels") {
        // horizontal strips of full width, distinct rows so cell counts are exact
        const int width = std::max(1, spec.width);
        std::set<int> rows;
        int guard = 0;
        while (static_cast<int>(rows.size()) < spec.count && guard++ < 10000) {
            const int r0 = static_cast<int>(draw(rng, static_cast<std::uint64_t>(
                                                          std::max(1, n_fine - width + 1))));
            bool clash = false;
            for (int r = r0; r < r0 + width; ++r)
                if (rows.count(r)) clash = true;
            if (clash) continue;
            for (int r = r0; r < r0 + width && r < n_fine; ++r) rows.insert(r);
        }
        for (int r : rows)
            for (int i = 0; i < n_fine; ++i) field[r * n_fine + i] = spec.contrast;
        return field;
    }
    if (spec.kind == "inclusions") {
        const int max_side = std::max(1, spec.width);
        for (int b = 0; b < spec.count; ++b) {
            const int w = 1 + static_cast<int>(draw(rng, static_cast<std::uint64_t>(max_side)));
            const int ht = 1 + static_cast<int>(draw(rng, static_cast<std::uint64_t>(max_side)));
            const int i0 = static_cast<int>(draw(rng, static_cast<std::uint64_t>(
                                                          std::max(1, n_fine - w + 1))));
            const int j0 = static_cast<int>(draw(rng, static_cast<std::uint64_t>(
                                                          std::max(1, n_fine - ht + 1))));
            for (int j = j0; j < std::min(j0 + ht, n_fine); ++j)
                for (int i = i0; i < std::min(i0 + w, n_fine); ++i)
                    field[j * n_fine + i] = spec.contrast;
        }
        return field;
    }
    throw ConfigError("generate_field: unknown kind '" + spec.kind + "'");
}

CoefficientField make_field(int n_fine, Vec cells) {
    CoefficientField f;
    f.n_fine = n_fine;
    f.terms.push_back(std::move(cells));
    return f;
}

CoefficientField make_field(int n_fine, Vec k1, Vec k2) {
    CoefficientField f;
    f.n_fine = n_fine;
    f.terms.push_back(std::move(k1));
    f.terms.push_back(std::move(k2));
    return f;
}

} // namespace gmsfem
