// Experiment drivers behind the CLI: run configuration, comparison series,
// CSV and SVG emission, figure reproduction and parameter sweeps.

#ifndef IONSIM_DRIVER_HPP
#define IONSIM_DRIVER_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ionsim/closed_form.hpp"
#include "ionsim/report.hpp"

namespace ionsim {

struct RunConfig {
    double lambda = 0.1;
    double eta = 0.1;
    double kappa = 0.0;
    double alpha = 4.0;
    int order = 2;
    int fock_cutoff = 128;
    double tau_max = 10.0;
    int tau_steps = 1000;
    InitialKind initial_kind = InitialKind::coherent_excited;
    int initial_n = 0;  // Fock kinds
    bool out_csv = true;
    bool out_svg = true;
    bool out_deviation_report = true;
    std::string out_dir = ".";
    int threads = 0;  // 0 = hardware concurrency
    // Sweep axes; empty lists fall back to the scalar value above.
    std::vector<double> lambdas, etas, alphas;

    void validate() const;  // throws std::invalid_argument on bad invariants
    IonParams params() const { return IonParams::from_lambda(lambda, eta, kappa); }
    InitialStateSpec initial() const;
    TruncationConfig truncation() const { return TruncationConfig(fock_cutoff); }
};

/// Flat key = value configuration files; '#' starts a comment.  Unknown keys
/// are an error so that a config file always reproduces one run exactly.
void apply_config_file(RunConfig& config, const std::string& path);
void apply_config_line(RunConfig& config, const std::string& key, const std::string& value);
void print_config(std::ostream& os, const RunConfig& config);

struct ComparisonRow {
    double tau;
    double pe_pert;          // normalized perturbative state
    double pe_small_rot;     // small-rotation comparator
    double pe_exact;         // truncated-space propagator
    double err_pert_exact;
    double err_pert_smallrot;
    double norm_defect;      // worst |norm - 1| over the two state paths
};

/// One comparison series over a uniform tau grid at fixed parameters.
/// Coherent-excited initial states go through the closed-form solutions;
/// Fock initial states go through the engine's stacked propagator.
std::vector<ComparisonRow> compute_comparison_series(const IonParams& p,
                                                     const InitialStateSpec& initial, int order,
                                                     TruncationConfig t, double tau_max,
                                                     int tau_steps,
                                                     DeviationReport* report = nullptr);

/// Header is exactly
///   tau,pe_pert,pe_small_rot,pe_exact,err_pert_exact,err_pert_smallrot,norm_defect
/// with every float printed as %.12e; bit-stable across runs.
void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);

/// Static polyline plot with the series {perturbative, small-rotation, exact}.
void write_comparison_svg(std::ostream& os, const std::vector<ComparisonRow>& rows,
                          const std::string& title);

struct SweepRow {
    double lambda, eta, alpha;
    ComparisonRow row;
    std::string error;  // empty on success
};

int cmd_fig1(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_evolve(const RunConfig& config, std::ostream& log);
int cmd_validate(const RunConfig& config, std::ostream& log);

std::vector<SweepRow> run_sweep(const RunConfig& config);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

std::string format_float_short(double v);  // for file names, %g

}  // namespace ionsim

#endif  // IONSIM_DRIVER_HPP
