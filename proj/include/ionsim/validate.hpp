// Validation suites: operator identities, engine two-path equivalence,
// Taylor-order scaling, closed-form/engine agreement, normalization, figure
// shape, Rabi equivalence and singularity safety.  Shared by the `validate`
// subcommand and the acceptance test binary.

#ifndef IONSIM_VALIDATE_HPP
#define IONSIM_VALIDATE_HPP

#include <string>
#include <vector>

#include "ionsim/report.hpp"

namespace ionsim {

struct SuiteResult {
    std::string name;
    bool pass;
    double max_defect;   // worst measured deviation (suite-specific meaning)
    double tolerance;    // hard limit it was checked against
    double seconds;
    std::string detail;  // where the worst case happened
};

SuiteResult suite_operator_identities();
SuiteResult suite_engine_two_path();
SuiteResult suite_taylor_scaling();
SuiteResult suite_closed_form_vs_engine(DeviationReport& report);
SuiteResult suite_normalization();
SuiteResult suite_fig1_shape();
SuiteResult suite_rabi_equivalence(DeviationReport& report);
SuiteResult suite_singularity_safety();

/// All suites in acceptance order.
std::vector<SuiteResult> run_validation_suites(DeviationReport& report);

}  // namespace ionsim

#endif  // IONSIM_VALIDATE_HPP
