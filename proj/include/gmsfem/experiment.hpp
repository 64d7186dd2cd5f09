#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gmsfem/coeff.hpp"
#include "gmsfem/couple.hpp"
#include "gmsfem/grid.hpp"
#include "gmsfem/reduce.hpp"
#include "gmsfem/snapshot.hpp"
#include "gmsfem/types.hpp"

namespace gmsfem {

/// Declarative description of one study: grid, field, snapshot type,
/// oversampling, eigenvalue-problem variant and a selection schedule.
struct ExperimentConfig {
    int n_fine = 0;
    int n_coarse = 0;

    struct TermSpec {
        bool from_file = false;
        std::string file;
        FieldSpec gen;
        bool seed_set = false;
    };
    std::vector<TermSpec> field_terms;

    Vec mu;                       // evaluation parameter; defaults to 0.5 per term (1.0 if Q=1)
    std::vector<Vec> training_mu; // snapshot/averaging parameters (optional)

    SnapshotKind snapshot_kind = SnapshotKind::harmonic;
    int spectral_count = 20;
    double merge_tol = 1e-8;
    std::string snapshot_cache; // directory; empty disables the cache

    OversampleSpec oversample = OversampleSpec::CoarseLayers(1);
    MassWeight::Kind mass_weight_kind = MassWeight::Kind::identity;

    Variant variant = Variant::off1;
    std::vector<Variant> multi_variants; // used when variant == multi
    double chop_factor = 1.0;            // local-coefficient reduction on the ring; 1 disables

    struct ScheduleEntry {
        std::vector<Selection> selections; // one per variant (two for multi)
    };
    std::vector<ScheduleEntry> schedule;

    std::vector<std::string> references; // fine | snapshot | offline

    bool has_online = false;
    Variant online_variant = Variant::on1;
    Vec online_mu;
    std::vector<Selection> offline_selection; // fixed offline stage for online runs

    std::vector<Variant> decay_variants; // for the eigenvalue-decay export

    double rhs = 1.0;
    double bc_a = 0.0, bc_b = 1.0, bc_c = 1.0; // g = a + b x + c y

    bool export_solutions = false; // nodal files for the last entry's solve
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    int threads = 0;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& json_text);

/// Deterministic one-line echo of the configuration for table headers.
std::string config_echo(const ExperimentConfig& cfg);

/// Run the schedule; one report per entry. Progress notes go to `log`.
std::vector<SolveReport> run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Write one reference's table: `#`-prefixed config echo, then
/// dim,lambda_star,l2_pct,h1_pct rows in full precision.
void write_table_csv(const std::string& path, const ExperimentConfig& cfg,
                     const std::vector<SolveReport>& rows, const std::string& reference);

/// Human-readable table (two-decimal percentages) for one reference.
void print_table(std::ostream& out, const std::vector<SolveReport>& rows,
                 const std::string& reference);

/// Per-variant, per-neighborhood sorted eigenvalue export:
/// neighborhood,k,lambda,inv_lambda with one `# variant <name>` block each.
void export_eigen_decay(const ExperimentConfig& cfg, const std::string& path, std::ostream& log);

} // namespace gmsfem
