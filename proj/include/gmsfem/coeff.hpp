#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gmsfem/grid.hpp"
#include "gmsfem/types.hpp"

namespace gmsfem {

/// Affinely parameter-dependent coefficient: kappa(x; mu) = sum_q theta_q(mu_q) kappa_q(x),
/// with one positive value per fine cell and term. theta defaults to the identity.
struct CoefficientField {
    int n_fine = 0;
    std::vector<Vec> terms;
    std::vector<std::function<double(double)>> theta; // empty entry slots mean identity

    int num_terms() const { return static_cast<int>(terms.size()); }
};

/// Resolved per-cell mass weight for the spectral problems: either kappa itself
/// or kappa * sum_i H^2 |grad chi_i|^2.
struct MassWeight {
    enum class Kind { identity, pou_weighted };
    Kind kind = Kind::identity;
    Vec values;
};

Vec evaluate(const CoefficientField& field, const Vec& mu);

/// Arithmetic mean of kappa(.; mu_j) over the training parameters.
Vec parameter_average(const CoefficientField& field, const std::vector<Vec>& mus);

MassWeight mass_weight(const Vec& kappa_cells, MassWeight::Kind kind,
                       const Vec* pou_grad_sum = nullptr, double H = 0.0);

/// Divide the coefficient by `factor` on the ring omega_plus \ omega.
Vec chop(const GridHierarchy& grid, const Vec& kappa_cells, const Region& omega,
         const Region& omega_plus, double factor);

struct FieldSpec {
    std::string kind = "constant"; // constant | channels | inclusions
    double contrast = 1.0;
    int count = 3;     // strips or blobs
    int width = 1;     // strip width / max blob side, in fine cells
    std::uint64_t seed = 0;
};

/// Deterministic synthetic high-contrast fields on a unit background.
Vec generate_field(const FieldSpec& spec, int n_fine);

/// Single-term field with the given per-cell values.
CoefficientField make_field(int n_fine, Vec cells);

/// Two-term field kappa = mu1*k1 + mu2*k2.
CoefficientField make_field(int n_fine, Vec k1, Vec k2);

} // namespace gmsfem
