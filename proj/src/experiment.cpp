#include "gmsfem/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "gmsfem/errors.hpp"
#include "gmsfem/io.hpp"
#include "gmsfem/metrics.hpp"
#include "gmsfem/parallel.hpp"
#include "gmsfem/pencil.hpp"

namespace gmsfem {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

Selection parse_selection(const json& j, const std::string& where) {
    require_keys(j, {"count", "threshold"}, where);
    if (j.contains("count") == j.contains("threshold"))
        throw ConfigError(where + ": exactly one of 'count' or 'threshold' is required");
    if (j.contains("count")) {
        if (j["count"].is_string()) {
            if (j["count"].get<std::string>() != "all")
                throw ConfigError(where + ": count must be a number or \"all\"");
            return Selection::Count(-1); // resolved to the full solvable size per neighborhood
        }
        return Selection::Count(j["count"].get<int>());
    }
    return Selection::Threshold(j["threshold"].get<double>());
}

ExperimentConfig::ScheduleEntry parse_schedule_entry(const json& j, const std::string& where) {
    require_keys(j, {"count", "threshold", "counts", "thresholds"}, where);
    ExperimentConfig::ScheduleEntry e;
    if (j.contains("counts")) {
        for (const auto& v : j["counts"]) e.selections.push_back(parse_selection(json{{"count", v}}, where));
        return e;
    }
    if (j.contains("thresholds")) {
        for (const auto& v : j["thresholds"])
            e.selections.push_back(parse_selection(json{{"threshold", v}}, where));
        return e;
    }
    e.selections.push_back(parse_selection(j, where));
    return e;
}

Vec parse_mu(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array");
    Vec mu(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) mu[static_cast<Eigen::Index>(k)] = j[k].get<double>();
    return mu;
}

std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

namespace {
ExperimentConfig parse_config_json(const std::string& json_text);
} // namespace

ExperimentConfig parse_config_text(const std::string& json_text) {
    try {
        return parse_config_json(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

namespace {

ExperimentConfig parse_config_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j,
                 {"grid", "field", "mu", "training_mu", "snapshot", "snapshot_cache", "merge_tol",
                  "oversample", "mass_weight", "variant", "multi_variants", "chop_factor",
                  "schedule", "references", "online", "decay_variants", "rhs", "boundary",
                  "export_solutions", "output_dir", "seed", "threads"},
                 "config");
    ExperimentConfig cfg;

    const json& grid = j.at("grid");
    require_keys(grid, {"n_fine", "n_coarse"}, "grid");
    cfg.n_fine = grid.at("n_fine").get<int>();
    cfg.n_coarse = grid.at("n_coarse").get<int>();

    const json& field = j.at("field");
    require_keys(field, {"terms"}, "field");
    for (const auto& t : field.at("terms")) {
        require_keys(t, {"file", "kind", "contrast", "count", "width", "seed"}, "field term");
        ExperimentConfig::TermSpec ts;
        if (t.contains("file")) {
            if (t.size() != 1) throw ConfigError("field term: 'file' excludes generator keys");
            ts.from_file = true;
            ts.file = t["file"].get<std::string>();
        } else {
            ts.gen.kind = t.at("kind").get<std::string>();
            if (t.contains("contrast")) ts.gen.contrast = t["contrast"].get<double>();
            if (t.contains("count")) ts.gen.count = t["count"].get<int>();
            if (t.contains("width")) ts.gen.width = t["width"].get<int>();
            if (t.contains("seed")) {
                ts.gen.seed = t["seed"].get<std::uint64_t>();
                ts.seed_set = true;
            }
        }
        cfg.field_terms.push_back(std::move(ts));
    }
    if (cfg.field_terms.empty()) throw ConfigError("field: at least one term is required");

    if (j.contains("mu")) cfg.mu = parse_mu(j["mu"], "mu");
    if (j.contains("training_mu"))
        for (const auto& m : j["training_mu"]) cfg.training_mu.push_back(parse_mu(m, "training_mu"));

    if (j.contains("snapshot")) {
        const json& s = j["snapshot"];
        require_keys(s, {"type", "count"}, "snapshot");
        const std::string type = s.at("type").get<std::string>();
        if (type == "harmonic") {
            cfg.snapshot_kind = SnapshotKind::harmonic;
        } else if (type == "spectral") {
            cfg.snapshot_kind = SnapshotKind::spectral;
            if (s.contains("count")) cfg.spectral_count = s["count"].get<int>();
        } else {
            throw ConfigError("snapshot: unknown type '" + type + "'");
        }
    }
    if (j.contains("snapshot_cache")) cfg.snapshot_cache = j["snapshot_cache"].get<std::string>();
    if (j.contains("merge_tol")) cfg.merge_tol = j["merge_tol"].get<double>();

    if (j.contains("oversample")) {
        const json& o = j["oversample"];
        require_keys(o, {"coarse_layers", "fine_layers"}, "oversample");
        if (o.contains("coarse_layers") == o.contains("fine_layers"))
            throw ConfigError("oversample: exactly one of coarse_layers/fine_layers is required");
        cfg.oversample = o.contains("coarse_layers")
                             ? OversampleSpec::CoarseLayers(o["coarse_layers"].get<int>())
                             : OversampleSpec::FineLayers(o["fine_layers"].get<int>());
    }

    if (j.contains("mass_weight")) {
        const std::string mw = j["mass_weight"].get<std::string>();
        if (mw == "identity")
            cfg.mass_weight_kind = MassWeight::Kind::identity;
        else if (mw == "pou_weighted")
            cfg.mass_weight_kind = MassWeight::Kind::pou_weighted;
        else
            throw ConfigError("mass_weight: unknown variant '" + mw + "'");
    }

    if (j.contains("variant")) cfg.variant = variant_from_name(j["variant"].get<std::string>());
    if (j.contains("multi_variants"))
        for (const auto& v : j["multi_variants"])
            cfg.multi_variants.push_back(variant_from_name(v.get<std::string>()));
    if (cfg.variant == Variant::multi && cfg.multi_variants.size() < 2)
        throw ConfigError("variant 'multi' needs at least two multi_variants");
    if (j.contains("chop_factor")) cfg.chop_factor = j["chop_factor"].get<double>();

    if (!j.contains("schedule") || !j["schedule"].is_array() || j["schedule"].empty())
        throw ConfigError("schedule: a non-empty array is required");
    for (const auto& e : j["schedule"])
        cfg.schedule.push_back(parse_schedule_entry(e, "schedule entry"));

    if (j.contains("references"))
        for (const auto& r : j["references"]) {
            const std::string name = r.get<std::string>();
            if (name != "fine" && name != "snapshot" && name != "offline")
                throw ConfigError("references: unknown reference '" + name + "'");
            cfg.references.push_back(name);
        }
    if (cfg.references.empty()) cfg.references.push_back("fine");

    if (j.contains("online")) {
        const json& o = j["online"];
        require_keys(o, {"variant", "mu", "offline_selection"}, "online");
        cfg.has_online = true;
        cfg.online_variant = variant_from_name(o.at("variant").get<std::string>());
        if (!is_online_variant(cfg.online_variant))
            throw ConfigError("online: variant must be one of on1/on2/on3");
        cfg.online_mu = parse_mu(o.at("mu"), "online mu");
        const json& os = o.at("offline_selection");
        if (os.is_array())
            for (const auto& s : os) cfg.offline_selection.push_back(parse_selection(s, "offline_selection"));
        else
            cfg.offline_selection.push_back(parse_selection(os, "offline_selection"));
    }

    if (j.contains("decay_variants"))
        for (const auto& v : j["decay_variants"])
            cfg.decay_variants.push_back(variant_from_name(v.get<std::string>()));

    if (j.contains("rhs")) cfg.rhs = j["rhs"].get<double>();
    if (j.contains("boundary")) {
        const json& b = j["boundary"];
        require_keys(b, {"a", "b", "c"}, "boundary");
        if (b.contains("a")) cfg.bc_a = b["a"].get<double>();
        if (b.contains("b")) cfg.bc_b = b["b"].get<double>();
        if (b.contains("c")) cfg.bc_c = b["c"].get<double>();
    }
    if (j.contains("export_solutions")) cfg.export_solutions = j["export_solutions"].get<bool>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();

    const Eigen::Index q = static_cast<Eigen::Index>(cfg.field_terms.size());
    if (cfg.mu.size() == 0) cfg.mu = q == 1 ? Vec::Ones(1) : Vec::Constant(q, 0.5);
    if (cfg.mu.size() != q) throw ConfigError("mu: arity does not match the field term count");
    for (const Vec& m : cfg.training_mu)
        if (m.size() != q) throw ConfigError("training_mu: arity does not match the field terms");
    if (cfg.has_online && cfg.online_mu.size() != q)
        throw ConfigError("online mu: arity does not match the field terms");
    return cfg;
}

} // namespace

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

std::string selection_echo(const Selection& s) {
    if (s.kind == Selection::Kind::count)
        return s.count < 0 ? std::string("count=all") : "count=" + std::to_string(s.count);
    return "tol=" + format_g(s.threshold);
}

/// Shared state of one study: grid, neighborhoods, coefficients, snapshots
/// and the per-neighborhood reduced matrices.
struct Study {
    const ExperimentConfig& cfg;
    GridHierarchy grid;
    NeighborhoodSet nbh;
    CoefficientField field;
    Vec kappa;           // coefficient of the global problem (at cfg.mu or online mu)
    Vec kappa_bar;       // parameter-averaged offline coefficient
    Vec pou_grad;        // only for the pou-weighted mass variant
    Vec f_cells;
    std::vector<int> interior;                // interior coarse vertex ids
    std::vector<SnapshotSpace> snapshots;     // indexed by coarse vertex (interior only filled)
    std::vector<ReducedMatrices> reduced;     // same indexing
    BoundaryData g;

    explicit Study(const ExperimentConfig& c, std::ostream& log) : cfg(c) {
        grid = build_grids(cfg.n_fine, cfg.n_coarse);
        nbh = build_neighborhoods(grid, cfg.oversample);
        for (int v = 0; v < grid.num_coarse_vertices(); ++v)
            if (grid.coarse_vertex_is_interior(v)) interior.push_back(v);

        field.n_fine = cfg.n_fine;
        for (std::size_t q = 0; q < cfg.field_terms.size(); ++q) {
            const auto& ts = cfg.field_terms[q];
            if (ts.from_file) {
                int n = 0;
                Vec cells = read_cell_field(ts.file, n);
                if (n != cfg.n_fine)
                    throw ConfigError("field file '" + ts.file + "' is " + std::to_string(n) +
                                      "x" + std::to_string(n) + ", grid wants " +
                                      std::to_string(cfg.n_fine));
                field.terms.push_back(std::move(cells));
            } else {
                FieldSpec gen = ts.gen;
                if (!ts.seed_set) gen.seed = cfg.seed + q;
                field.terms.push_back(generate_field(gen, cfg.n_fine));
            }
        }

        const Vec eval_mu = cfg.has_online ? cfg.online_mu : cfg.mu;
        kappa = evaluate(field, eval_mu);
        kappa_bar = cfg.training_mu.empty() ? evaluate(field, cfg.mu)
                                            : parameter_average(field, cfg.training_mu);
        if (cfg.mass_weight_kind == MassWeight::Kind::pou_weighted)
            pou_grad = pou_gradient_sum(grid, nbh);
        f_cells = Vec::Constant(grid.num_fine_cells(), cfg.rhs);
        const double ga = cfg.bc_a, gb = cfg.bc_b, gc = cfg.bc_c;
        g = [ga, gb, gc](double x, double y) { return ga + gb * x + gc * y; };

        build_snapshots(log);
        build_reduced_matrices();
    }

    Vec ktilde_of(const Vec& kappa_cells) const {
        return mass_weight(kappa_cells, cfg.mass_weight_kind,
                           pou_grad.size() ? &pou_grad : nullptr, grid.H)
            .values;
    }

    Vec local_coeff(const Vec& kappa_cells, int v) const {
        if (cfg.chop_factor == 1.0) return kappa_cells;
        return chop(grid, kappa_cells, nbh.omega[v], nbh.omega_plus[v], cfg.chop_factor);
    }

    SnapshotSpace build_one_snapshot(int v) const {
        std::vector<Vec> mus;
        if (cfg.training_mu.empty())
            mus.push_back(cfg.mu);
        else
            mus = std::vector<Vec>(cfg.training_mu.begin(), cfg.training_mu.end());

        std::vector<SnapshotSpace> per_mu;
        per_mu.reserve(mus.size());
        for (std::size_t m = 0; m < mus.size(); ++m) {
            const Vec kmu = local_coeff(evaluate(field, mus[m]), v);
            if (cfg.snapshot_kind == SnapshotKind::harmonic)
                per_mu.push_back(harmonic_snapshots(grid, nbh.omega[v], nbh.omega_plus[v], kmu,
                                                    static_cast<int>(m)));
            else
                per_mu.push_back(spectral_snapshots(grid, nbh.omega[v], nbh.omega_plus[v], kmu,
                                                    ktilde_of(kmu), cfg.spectral_count,
                                                    static_cast<int>(m)));
        }
        if (per_mu.size() == 1) return std::move(per_mu.front());
        return merge_parameter_snapshots(per_mu, cfg.merge_tol);
    }

    void build_snapshots(std::ostream& log) {
        const auto t0 = std::chrono::steady_clock::now();
        snapshots.resize(static_cast<std::size_t>(grid.num_coarse_vertices()));
        parallel_for(static_cast<int>(interior.size()), cfg.threads, [&](int k) {
            const int v = interior[static_cast<std::size_t>(k)];
            const std::size_t sv = static_cast<std::size_t>(v);
            if (!cfg.snapshot_cache.empty()) {
                const std::string path =
                    cfg.snapshot_cache + "/snap_v" + std::to_string(v) + ".txt";
                if (std::filesystem::exists(path)) {
                    SnapshotSpace s = load_snapshot_cache(path, grid);
                    if (s.omega_plus.same_extents(nbh.omega_plus[v]) &&
                        s.omega.same_extents(nbh.omega[v])) {
                        snapshots[sv] = std::move(s);
                        return;
                    }
                }
                snapshots[sv] = build_one_snapshot(v);
                save_snapshot_cache(path, snapshots[sv]);
                return;
            }
            snapshots[sv] = build_one_snapshot(v);
        });
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        log << "[gmsfem] snapshots: " << interior.size() << " neighborhoods, " << dt.count()
            << " s\n";
    }

    void build_reduced_matrices() {
        reduced.resize(static_cast<std::size_t>(grid.num_coarse_vertices()));
        const Vec ktilde_bar_full = ktilde_of(kappa_bar);
        parallel_for(static_cast<int>(interior.size()), cfg.threads, [&](int k) {
            const int v = interior[static_cast<std::size_t>(k)];
            const std::size_t sv = static_cast<std::size_t>(v);
            const Vec kbar_v = local_coeff(kappa_bar, v);
            const Vec ktilde_v = cfg.chop_factor == 1.0 ? ktilde_bar_full : ktilde_of(kbar_v);
            reduced[sv] = reduced_matrices(grid, nbh.omega[v], nbh.omega_plus[v],
                                           snapshots[sv].basis, snapshots[sv].basis_plus, kbar_v,
                                           ktilde_v);
        });
    }

};

} // namespace

std::string config_echo(const ExperimentConfig& cfg) {
    std::string e = "grid=" + std::to_string(cfg.n_fine) + "/" + std::to_string(cfg.n_coarse);
    e += " snapshots=";
    e += cfg.snapshot_kind == SnapshotKind::harmonic
             ? "harmonic"
             : "spectral(" + std::to_string(cfg.spectral_count) + ")";
    e += " oversample=";
    e += cfg.oversample.kind == OversampleSpec::Kind::coarse_layers ? "coarse:" : "fine:";
    e += std::to_string(cfg.oversample.amount);
    e += " variant=";
    e += variant_name(cfg.variant);
    if (cfg.variant == Variant::multi) {
        e += "[";
        for (std::size_t k = 0; k < cfg.multi_variants.size(); ++k)
            e += std::string(k ? "," : "") + variant_name(cfg.multi_variants[k]);
        e += "]";
    }
    if (cfg.has_online) {
        e += " online=";
        e += variant_name(cfg.online_variant);
    }
    if (cfg.chop_factor != 1.0) e += " chop=" + format_g(cfg.chop_factor);
    e += " mass_weight=";
    e += cfg.mass_weight_kind == MassWeight::Kind::identity ? "identity" : "pou_weighted";
    e += " seed=" + std::to_string(cfg.seed);
    return e;
}

std::vector<SolveReport> run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    Study study(cfg, log);
    const GridHierarchy& grid = study.grid;

    const bool wants_fine = std::count(cfg.references.begin(), cfg.references.end(), "fine") > 0;
    const bool wants_snap =
        std::count(cfg.references.begin(), cfg.references.end(), "snapshot") > 0;
    const bool wants_off = std::count(cfg.references.begin(), cfg.references.end(), "offline") > 0;
    if (wants_off && !cfg.has_online)
        throw ConfigError("reference 'offline' is only available for online runs");

    Vec u_fine, u_snap;
    if (wants_fine) u_fine = solve_fine(grid, study.kappa, study.f_cells, study.g);
    if (wants_snap) {
        std::vector<SnapshotSpace> snaps = study.snapshots;
        u_snap = solve_snapshot_reference(grid, study.nbh, snaps, study.kappa, study.f_cells,
                                          study.g);
    }

    // fixed offline stage for online sweeps
    std::vector<ReducedSpace> offline_fixed(
        static_cast<std::size_t>(grid.num_coarse_vertices()));
    Vec u_offline;
    if (cfg.has_online) {
        parallel_for(static_cast<int>(study.interior.size()), cfg.threads, [&](int k) {
            const int v = study.interior[static_cast<std::size_t>(k)];
            const std::size_t sv = static_cast<std::size_t>(v);
            const auto& snap = study.snapshots[sv];
            const auto& rm = study.reduced[sv];
            if (cfg.variant == Variant::multi) {
                offline_fixed[sv] =
                    multi_offline_space(snap, rm, cfg.multi_variants, cfg.offline_selection);
            } else {
                offline_fixed[sv] =
                    offline_space(snap, rm, cfg.variant, cfg.offline_selection.at(0));
            }
        });
        if (wants_off) {
            std::vector<const Mat*> bases(
                static_cast<std::size_t>(grid.num_coarse_vertices()), nullptr);
            for (int v : study.interior)
                bases[static_cast<std::size_t>(v)] = &offline_fixed[static_cast<std::size_t>(v)].basis;
            const MultiscaleOperator op = build_operator(grid, study.nbh, bases, study.g);
            u_offline = solve_coarse(grid, op, study.kappa, study.f_cells);
        }
    }

    const Vec ktilde_online =
        cfg.has_online ? study.ktilde_of(study.kappa) : Vec();

    std::vector<SolveReport> rows;
    for (std::size_t entry = 0; entry < cfg.schedule.size(); ++entry) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto& sched = cfg.schedule[entry];
        std::vector<ReducedSpace> spaces(static_cast<std::size_t>(grid.num_coarse_vertices()));

        parallel_for(static_cast<int>(study.interior.size()), cfg.threads, [&](int k) {
            const int v = study.interior[static_cast<std::size_t>(k)];
            const std::size_t sv = static_cast<std::size_t>(v);
            const auto& snap = study.snapshots[sv];
            const auto& rm = study.reduced[sv];
            if (cfg.has_online) {
                // for online sweeps the schedule selects M_on; chop is an
                // offline-stage device and does not enter the online coefficient
                spaces[sv] = online_space(grid, offline_fixed[sv], cfg.online_variant,
                                          study.kappa, ktilde_online, sched.selections.at(0));
            } else if (cfg.variant == Variant::multi) {
                if (sched.selections.size() != cfg.multi_variants.size())
                    throw ConfigError("schedule entry needs one selection per multi variant");
                spaces[sv] = multi_offline_space(snap, rm, cfg.multi_variants, sched.selections);
            } else {
                spaces[sv] =
                    offline_space(snap, rm, cfg.variant, sched.selections.at(0));
            }
        });

        std::vector<const Mat*> bases(static_cast<std::size_t>(grid.num_coarse_vertices()),
                                      nullptr);
        for (int v : study.interior)
            bases[static_cast<std::size_t>(v)] = &spaces[static_cast<std::size_t>(v)].basis;
        const MultiscaleOperator op = build_operator(grid, study.nbh, bases, study.g);
        const Vec u = solve_coarse(grid, op, study.kappa, study.f_cells);

        SolveReport rep;
        rep.dim = op.dim();
        {
            std::vector<ReducedSpace> interior_spaces;
            interior_spaces.reserve(study.interior.size());
            for (int v : study.interior)
                interior_spaces.push_back(spaces[static_cast<std::size_t>(v)]);
            rep.lambda_star = lambda_star(interior_spaces);
            double lsp = kNoExcludedEigenvalue;
            for (const auto& s : interior_spaces) lsp = std::min(lsp, s.lambda_next_secondary);
            rep.lambda_star_plus = lsp;
        }
        if (wants_fine) {
            const ErrorPair e = relative_error(grid, u_fine, u, study.kappa, "fine");
            rep.errors.push_back({e.reference, e.l2_pct, e.h1_pct});
        }
        if (wants_snap) {
            const ErrorPair e = relative_error(grid, u_snap, u, study.kappa, "snapshot");
            rep.errors.push_back({e.reference, e.l2_pct, e.h1_pct});
        }
        if (wants_off) {
            const ErrorPair e = relative_error(grid, u_offline, u, study.kappa, "offline");
            rep.errors.push_back({e.reference, e.l2_pct, e.h1_pct});
        }
        rep.tag = cfg.has_online ? variant_name(cfg.online_variant) : variant_name(cfg.variant);
        rep.tag += " ";
        for (std::size_t s = 0; s < sched.selections.size(); ++s)
            rep.tag += std::string(s ? "," : "") + selection_echo(sched.selections[s]);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        rep.seconds = dt.count();
        log << "[gmsfem] entry " << entry + 1 << "/" << cfg.schedule.size() << ": dim=" << rep.dim
            << " lambda*=" << rep.lambda_star << " (" << rep.seconds << " s)\n";
        rows.push_back(std::move(rep));

        if (cfg.export_solutions && entry + 1 == cfg.schedule.size()) {
            write_nodal_field(cfg.output_dir + "/u_multiscale.txt", cfg.n_fine, u);
            if (wants_fine) write_nodal_field(cfg.output_dir + "/u_fine.txt", cfg.n_fine, u_fine);
        }
    }
    return rows;
}

void write_table_csv(const std::string& path, const ExperimentConfig& cfg,
                     const std::vector<SolveReport>& rows, const std::string& reference) {
    std::string text = "# gmsfem experiment table\n# " + config_echo(cfg) +
                       "\n# reference: " + reference + "\ndim,lambda_star,l2_pct,h1_pct\n";
    for (const auto& r : rows) {
        const auto it = std::find_if(r.errors.begin(), r.errors.end(),
                                     [&](const auto& e) { return e.reference == reference; });
        if (it == r.errors.end())
            throw ContractError("write_table_csv: reference '" + reference + "' missing in row");
        text += std::to_string(r.dim) + ',' + format_g(r.lambda_star) + ',' +
                format_g(it->l2_pct) + ',' + format_g(it->h1_pct) + '\n';
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open table '" + path + "' for writing");
    out << text;
    if (!out) throw ConfigError("write failed for table '" + path + "'");
}

void print_table(std::ostream& out, const std::vector<SolveReport>& rows,
                 const std::string& reference) {
    out << "  dim      lambda*           L2%      H1%    (vs " << reference << ")\n";
    char buf[160];
    for (const auto& r : rows) {
        const auto it = std::find_if(r.errors.begin(), r.errors.end(),
                                     [&](const auto& e) { return e.reference == reference; });
        if (it == r.errors.end()) continue;
        std::string lam;
        {
            char lb[64];
            if (std::isfinite(r.lambda_star_plus)) {
                std::snprintf(lb, sizeof lb, "%.4g(%.4g)", r.lambda_star, r.lambda_star_plus);
            } else {
                std::snprintf(lb, sizeof lb, "%.4g", r.lambda_star);
            }
            lam = lb;
        }
        std::snprintf(buf, sizeof buf, "%5d  %-16s %8.2f %8.2f\n", r.dim, lam.c_str(), it->l2_pct,
                      it->h1_pct);
        out << buf;
    }
}

void export_eigen_decay(const ExperimentConfig& cfg, const std::string& path, std::ostream& log) {
    if (cfg.decay_variants.empty())
        throw ConfigError("decay export: config names no decay_variants");
    Study study(cfg, log);

    std::string text = "# gmsfem eigenvalue decay\n# " + config_echo(cfg) + "\n";
    text += "neighborhood,k,lambda,inv_lambda\n";
    for (Variant v : cfg.decay_variants) {
        if (!is_offline_variant(v))
            throw ConfigError("decay export: only offline variants have snapshot-space spectra");
        text += std::string("# variant ") + variant_name(v) + "\n";
        // full spectra are cheap relative to snapshot construction; serial keeps
        // the output order fixed
        for (std::size_t k = 0; k < study.interior.size(); ++k) {
            const int vert = study.interior[k];
            const std::size_t sv = static_cast<std::size_t>(vert);
            const ReducedSpace full = offline_space(study.snapshots[sv], study.reduced[sv], v,
                                                    Selection::Count(-1));
            for (Eigen::Index e = 0; e < full.kept_eigenvalues.size(); ++e) {
                const double lam = full.kept_eigenvalues[e];
                text += std::to_string(vert) + ',' + std::to_string(e + 1) + ',' + format_g(lam) +
                        ',' + format_g(lam > 0.0 ? 1.0 / lam : std::numeric_limits<double>::infinity()) + '\n';
            }
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open decay export '" + path + "' for writing");
    out << text;
    if (!out) throw ConfigError("write failed for decay export '" + path + "'");
}

} // namespace gmsfem
