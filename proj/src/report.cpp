#include "ionsim/report.hpp"

#include <cmath>
#include <cstdio>

namespace ionsim {

bool DeviationReport::record(const std::string& operation, int order, double lambda, double eta,
                             double kappa, double alpha, double tau, const std::string& branch,
                             double paper_value, double direct_value) {
    const double abs_diff = std::abs(paper_value - direct_value);
    if (!(abs_diff > 1e-6 * std::max(1.0, std::abs(direct_value)))) return false;
    std::lock_guard<std::mutex> lock(mutex_);
    rows_.push_back({operation, order, lambda, eta, kappa, alpha, tau, branch, paper_value,
                     direct_value, abs_diff});
    return true;
}

size_t DeviationReport::count_for(const std::string& operation_prefix) const {
    size_t n = 0;
    for (const auto& r : rows_)
        if (r.operation.rfind(operation_prefix, 0) == 0) ++n;
    return n;
}

void DeviationReport::write_csv(std::ostream& os) const {
    os << "operation,order,lambda,eta,kappa,alpha,tau,branch,paper_value,direct_value,abs_diff\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12e", v);
        return std::string(buf);
    };
    for (const auto& r : rows_) {
        os << r.operation << ',' << r.order << ',' << num(r.lambda) << ',' << num(r.eta) << ','
           << num(r.kappa) << ',' << num(r.alpha) << ',' << num(r.tau) << ',' << r.branch << ','
           << num(r.paper_value) << ',' << num(r.direct_value) << ',' << num(r.abs_diff) << '\n';
    }
}

}  // namespace ionsim
