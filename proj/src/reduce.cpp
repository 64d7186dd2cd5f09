#include "gmsfem/reduce.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "gmsfem/assemble.hpp"
#include "gmsfem/errors.hpp"
#include "gmsfem/pencil.hpp"

namespace gmsfem {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::off1: return "off1";
        case Variant::off2: return "off2";
        case Variant::off3: return "off3";
        case Variant::off4: return "off4";
        case Variant::off5: return "off5";
        case Variant::on1: return "on1";
        case Variant::on2: return "on2";
        case Variant::on3: return "on3";
        case Variant::multi: return "multi";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    for (Variant v : {Variant::off1, Variant::off2, Variant::off3, Variant::off4, Variant::off5,
                      Variant::on1, Variant::on2, Variant::on3, Variant::multi})
        if (name == variant_name(v)) return v;
    throw ConfigError("unknown eigenvalue-problem variant '" + name + "'");
}

bool is_offline_variant(Variant v) {
    return v == Variant::off1 || v == Variant::off2 || v == Variant::off3 || v == Variant::off4 ||
           v == Variant::off5;
}

bool is_online_variant(Variant v) {
    return v == Variant::on1 || v == Variant::on2 || v == Variant::on3;
}

ReducedMatrices reduced_matrices(const GridHierarchy& grid, const Region& omega,
                                 const Region& omega_plus, const Mat& basis,
                                 const Mat& basis_plus, const Vec& kappa_cells,
                                 const Vec& ktilde_cells) {
    ReducedMatrices rm;
    rm.A = basis.transpose() * (stiffness(grid, omega, kappa_cells) * basis);
    rm.S = basis.transpose() * (weighted_mass(grid, omega, ktilde_cells) * basis);
    rm.A_plus = basis_plus.transpose() * (stiffness(grid, omega_plus, kappa_cells) * basis_plus);
    rm.S_plus =
        basis_plus.transpose() * (weighted_mass(grid, omega_plus, ktilde_cells) * basis_plus);
    return rm;
}

namespace {

struct PencilPair {
    const Mat* left;
    const Mat* right;
    bool right_is_stiffness; // its null modes are constants worth keeping
};

PencilPair pencil_pair(const ReducedMatrices& rm, Variant v) {
    switch (v) {
        case Variant::off1: return {&rm.A, &rm.S, false};
        case Variant::off2: return {&rm.A_plus, &rm.A, true};
        case Variant::off3: return {&rm.A, &rm.S_plus, false};
        case Variant::off4: return {&rm.A_plus, &rm.S_plus, false};
        case Variant::off5: return {&rm.A_plus, &rm.S, false};
        case Variant::on1: return {&rm.A, &rm.S, false};
        case Variant::on2: return {&rm.A_plus, &rm.A, true};
        case Variant::on3: return {&rm.A, &rm.S_plus, false};
        default: throw ContractError("pencil_pair: no matrix pair for this variant");
    }
}

int select_prefix(const Vec& eigenvalues, const Selection& sel) {
    const int n = static_cast<int>(eigenvalues.size());
    if (sel.kind == Selection::Kind::count) {
        if (sel.count == -1) return n; // "all": every solvable eigenpair
        if (sel.count < 0 || sel.count > n)
            throw RangeError("selection count " + std::to_string(sel.count) +
                             " outside the solvable range [0, " + std::to_string(n) + "]");
        return sel.count;
    }
    int m = 0;
    while (m < n && eigenvalues[m] < sel.threshold) ++m;
    return m;
}

ReducedSpace reduce_with(const Region& omega, const Region& omega_plus, const Mat& parent,
                         const Mat& parent_plus, const ReducedMatrices& rm, Variant variant,
                         const Selection& sel) {
    const PencilPair pair = pencil_pair(rm, variant);
    PencilOptions opts;
    opts.keep_common_null = pair.right_is_stiffness;
    const PencilSolution sol = solve_pencil(*pair.left, *pair.right, opts);
    const int m = select_prefix(sol.eigenvalues, sel);

    ReducedSpace r;
    r.omega = omega;
    r.omega_plus = omega_plus;
    r.variant = variant;
    r.coords = sol.eigenvectors.leftCols(m);
    r.kept_eigenvalues = sol.eigenvalues.head(m);
    r.lambda_next =
        m < sol.eigenvalues.size() ? sol.eigenvalues[m] : kNoExcludedEigenvalue;
    r.basis = parent * r.coords;
    r.basis_plus = parent_plus * r.coords;
    return r;
}

} // namespace

ReducedSpace offline_space(const SnapshotSpace& snap, const ReducedMatrices& rm, Variant variant,
                           const Selection& sel) {
    if (!is_offline_variant(variant))
        throw ContractError(std::string("offline_space: '") + variant_name(variant) +
                            "' is not an offline variant");
    return reduce_with(snap.omega, snap.omega_plus, snap.basis, snap.basis_plus, rm, variant, sel);
}

ReducedSpace multi_offline_space(const SnapshotSpace& snap, const ReducedMatrices& rm,
                                 std::span<const Variant> variants,
                                 std::span<const Selection> selections, double prune_tol) {
    if (variants.size() < 2)
        throw ContractError("multi_offline_space: needs at least two variants");
    if (variants.size() != selections.size())
        throw ContractError("multi_offline_space: one selection per variant required");

    std::vector<ReducedSpace> parts;
    parts.reserve(variants.size());
    int total = 0;
    for (std::size_t k = 0; k < variants.size(); ++k) {
        parts.push_back(offline_space(snap, rm, variants[k], selections[k]));
        total += parts.back().size();
    }

    Mat coords(snap.size(), total);
    Mat all_plus(snap.basis_plus.rows(), total);
    Mat all(snap.basis.rows(), total);
    int at = 0;
    for (const auto& p : parts) {
        coords.middleCols(at, p.size()) = p.coords;
        all_plus.middleCols(at, p.size()) = p.basis_plus;
        all.middleCols(at, p.size()) = p.basis;
        at += p.size();
    }
    const std::vector<int> keep = pivoted_prune(all_plus, prune_tol);

    ReducedSpace r;
    r.omega = snap.omega;
    r.omega_plus = snap.omega_plus;
    r.variant = Variant::multi;
    r.coords.resize(snap.size(), static_cast<Eigen::Index>(keep.size()));
    r.basis.resize(all.rows(), static_cast<Eigen::Index>(keep.size()));
    r.basis_plus.resize(all_plus.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        r.coords.col(static_cast<Eigen::Index>(k)) = coords.col(keep[k]);
        r.basis.col(static_cast<Eigen::Index>(k)) = all.col(keep[k]);
        r.basis_plus.col(static_cast<Eigen::Index>(k)) = all_plus.col(keep[k]);
    }
    r.lambda_next = parts[0].lambda_next;
    r.lambda_next_secondary = parts[1].lambda_next;
    return r;
}

ReducedSpace online_space(const GridHierarchy& grid, const ReducedSpace& offline, Variant variant,
                          const Vec& kappa_mu_cells, const Vec& ktilde_mu_cells,
                          const Selection& sel) {
    if (!is_online_variant(variant))
        throw ContractError(std::string("online_space: '") + variant_name(variant) +
                            "' is not an online variant");
    const ReducedMatrices rm =
        reduced_matrices(grid, offline.omega, offline.omega_plus, offline.basis,
                         offline.basis_plus, kappa_mu_cells, ktilde_mu_cells);
    return reduce_with(offline.omega, offline.omega_plus, offline.basis, offline.basis_plus, rm,
                       variant, sel);
}

double lambda_star(std::span<const ReducedSpace> spaces) {
    double out = kNoExcludedEigenvalue;
    for (const auto& s : spaces) out = std::min(out, s.lambda_next);
    return out;
}

} // namespace gmsfem
