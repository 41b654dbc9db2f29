// Deviation report: hand-integrated formula values are evaluated alongside
// the direct numerical path and mismatches are recorded here, never silently
// patched.

#ifndef IONSIM_REPORT_HPP
#define IONSIM_REPORT_HPP

#include <mutex>
#include <ostream>
#include <string>
#include <vector>

namespace ionsim {

struct DeviationRow {
    std::string operation;
    int order;
    double lambda, eta, kappa, alpha, tau;
    std::string branch;
    double paper_value;
    double direct_value;
    double abs_diff;
};

class DeviationReport {
public:
    /// Records a row when |paper - direct| > 1e-6 * max(1, |direct|).
    /// Returns true when a row was recorded.
    bool record(const std::string& operation, int order, double lambda, double eta, double kappa,
                double alpha, double tau, const std::string& branch, double paper_value,
                double direct_value);

    const std::vector<DeviationRow>& rows() const { return rows_; }
    size_t count_for(const std::string& operation_prefix) const;
    void clear() { rows_.clear(); }

    void write_csv(std::ostream& os) const;

private:
    std::vector<DeviationRow> rows_;
    std::mutex mutex_;
};

}  // namespace ionsim

#endif  // IONSIM_REPORT_HPP
