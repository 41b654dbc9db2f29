#include "ionsim/validate.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ionsim/driver.hpp"
#include "ionsim/nmpm.hpp"
#include "ionsim/rabi.hpp"

namespace ionsim {

namespace {

constexpr Complex kI{0.0, 1.0};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Worst {
    double value = 0.0;
    std::string where;

    void update(double v, const std::string& w) {
        if (v > value) {
            value = v;
            where = w;
        }
    }
};

std::string tag(double eta, double kappa, double tau, int k = -1) {
    std::ostringstream os;
    os << "eta=" << eta << " kappa=" << kappa << " tau=" << tau;
    if (k >= 0) os << " k=" << k;
    return os.str();
}

double max_ket_diff(const PerturbativeKets& a, const PerturbativeKets& b) {
    double mx = 0.0;
    for (size_t i = 0; i < a.kets.size(); ++i)
        mx = std::max(mx, (a.kets[i].amps - b.kets[i].amps).cwiseAbs().maxCoeff());
    return mx;
}

}  // namespace

SuiteResult suite_operator_identities() {
    Stopwatch clock;
    const TruncationConfig t(64);
    Worst worst;
    for (double eta : {0.05, 0.1, 0.3}) {
        for (double kappa : {0.0, 1.0}) {
            const IonParams p(10.0, 1.0, kappa, eta);
            const IonOperators ops(p, t);
            const Matrix id = Matrix::Identity(t.dim(), t.dim());
            const Matrix adm_sz = ops.ada_minus * ops.sz;

            worst.update(guard_max_abs(ops.h0 * ops.h0 - id, t), tag(eta, kappa, 0) + " h0^2");

            // commutator [H0, n] = -eta H0 [eta + i(a-a+)sz]
            const Matrix comm = ops.h0 * ops.num_full - ops.num_full * ops.h0;
            const Matrix comm_rhs = -eta * ops.h0 * (eta * id + kI * adm_sz);
            worst.update(guard_max_abs(comm - comm_rhs, t), tag(eta, kappa, 0) + " commutator");

            // sandwich H0 n H0 = n + eta^2 + i eta (a-a+) sz
            const Matrix sandwich = ops.h0 * ops.num_full * ops.h0;
            const Matrix sandwich_rhs = ops.num_full + eta * eta * id + kI * eta * adm_sz;
            worst.update(guard_max_abs(sandwich - sandwich_rhs, t), tag(eta, kappa, 0) + " sandwich");

            // propagator closed form vs eigendecomposition expm
            {
                const DenseOperator u = expm_unitary(DenseOperator{ops.h0, t}, -1.3);
                const DenseOperator v = propagator_h0(p, 1.3, t);
                worst.update((u.mat - v.mat).cwiseAbs().maxCoeff(),
                             tag(eta, kappa, 1.3) + " propagator");
            }

            // conjugation of the perturbation at a few times
            for (double tau : {0.3, 1.0, 2.5}) {
                const DenseOperator u = expm_unitary(DenseOperator{ops.h0, t}, -tau);  // e^{+i h0 tau}
                const Matrix lhs = u.mat * ops.hp * u.mat.adjoint();
                const double s2 = std::sin(2.0 * tau), ssq = std::sin(tau) * std::sin(tau);
                const Matrix rhs =
                    ops.num_full -
                    0.5 * kI * s2 * ops.h0 * (eta * eta * id + kI * eta * adm_sz - kappa * ops.sz) +
                    0.5 * kappa * std::cos(2.0 * tau) * ops.sz +
                    eta * ssq * (eta * id + kI * adm_sz);
                worst.update(guard_max_abs(lhs - rhs, t), tag(eta, kappa, tau) + " conjugation");
            }
        }
    }
    return {"operator_identities", worst.value <= 1e-9, worst.value, 1e-9, clock.seconds(),
            worst.where};
}

SuiteResult suite_engine_two_path() {
    Stopwatch clock;
    Worst worst;
    {
        const TruncationConfig t(64);
        for (double eta : {0.05, 0.1}) {
            for (double kappa : {0.0, 1.0}) {
                const IonParams p(10.0, 1.0, kappa, eta);
                const auto split = split_high_intensity(p, t);
                for (const auto& psi0 : {FockSpinState::basis(3, Spin::g, t),
                                         FockSpinState::basis(0, Spin::e, t)}) {
                    for (double tau : {0.3, 1.0, 2.0}) {
                        for (int k : {1, 2}) {
                            const auto block =
                                corrections_block_matrix(split.h0, split.hp, psi0, tau, k, 0.1);
                            const auto quad =
                                corrections_quadrature(split.h0, split.hp, psi0, tau, k, 0.1);
                            worst.update(max_ket_diff(block, quad), tag(eta, kappa, tau, k));
                        }
                    }
                }
            }
        }
    }
    {
        const TruncationConfig t(128);
        const IonParams p(10.0, 1.0, 0.0, 0.1);
        const auto split = split_high_intensity(p, t);
        const auto psi0 = build_initial_state(InitialStateSpec::coherent_excited(4.0), t);
        for (double tau : {1.0, 2.0}) {
            for (int k : {1, 2}) {
                const auto block = corrections_block_matrix(split.h0, split.hp, psi0, tau, k, 0.1);
                const auto quad = corrections_quadrature(split.h0, split.hp, psi0, tau, k, 0.1);
                worst.update(max_ket_diff(block, quad), tag(0.1, 0.0, tau, k) + " coherent");
            }
        }
    }
    return {"engine_two_path", worst.value <= 1e-8, worst.value, 1e-8, clock.seconds(),
            worst.where};
}

SuiteResult suite_taylor_scaling() {
    Stopwatch clock;
    const TruncationConfig t(128);
    const double tau = 1.0;
    const auto psi0 = build_initial_state(InitialStateSpec::coherent_excited(4.0), t);

    auto error_norm = [&](double lambda, int k) {
        const IonParams p = IonParams::from_lambda(lambda, 0.1, 0.0);
        const auto split = split_high_intensity(p, t);
        const auto kets = corrections_block_matrix(split.h0, split.hp, psi0, tau, k, lambda);
        const FockSpinState exact = ExactPropagator(p, t).evolve(psi0, tau);
        return (partial_sum(kets).amps - exact.amps).norm();
    };

    Worst worst;
    std::ostringstream detail;
    for (int k : {1, 2}) {
        const double ratio = error_norm(0.1, k) / error_norm(0.05, k);
        const double expected = std::pow(2.0, k + 1);
        worst.update(std::abs(ratio / expected - 1.0), "k=" + std::to_string(k));
        detail << "k=" << k << " ratio=" << ratio << " (expect " << expected << ")  ";
    }
    return {"taylor_scaling", worst.value <= 0.3, worst.value, 0.3, clock.seconds(), detail.str()};
}

SuiteResult suite_closed_form_vs_engine(DeviationReport& report) {
    Stopwatch clock;
    Worst worst_state;
    Worst worst_norm;

    auto compare_state = [&](const ClosedFormResult& cf, const PerturbativeKets& kets,
                             const std::string& where) {
        PerturbativeKets pk = kets;
        pk.lambda = cf.params.lambda();
        const FockSpinState engine_state = assemble_state(pk);
        worst_state.update((cf.state.amps - engine_state.amps).cwiseAbs().maxCoeff(), where);
        worst_norm.update(cf.norm_rel_diff, where + " norm");
    };

    // Fock initial states, N = 64.
    {
        const TruncationConfig t(64);
        for (double eta : {0.05, 0.1}) {
            for (double kappa : {0.0, 1.0}) {
                for (double tau : {0.3, 1.0, 2.0}) {
                    // engine kets are lambda-independent; reuse across lambda
                    const IonParams pref(10.0, 1.0, kappa, eta);
                    const auto split = split_high_intensity(pref, t);
                    const IonOperators ops1(pref, t);
                    for (int n : {0, 2}) {
                        const auto kets_g = corrections_block_matrix(
                            split.h0, split.hp, FockSpinState::basis(n, Spin::g, t), tau, 1, 0.1);
                        const auto kets_e = corrections_block_matrix(
                            split.h0, split.hp, FockSpinState::basis(n, Spin::e, t), tau, 1, 0.1);
                        for (double lambda : {0.05, 0.1}) {
                            const IonParams p = IonParams::from_lambda(lambda, eta, kappa);
                            compare_state(first_order_fock_ground(p, n, tau, t, &report), kets_g,
                                          tag(eta, kappa, tau) + " fock_g n=" + std::to_string(n));
                            compare_state(first_order_fock_excited(p, n, tau, t, &report), kets_e,
                                          tag(eta, kappa, tau) + " fock_e n=" + std::to_string(n));
                        }
                    }
                    // general form on |3>|g>
                    const auto psi0 = FockSpinState::basis(3, Spin::g, t);
                    const auto kets3 =
                        corrections_block_matrix(split.h0, split.hp, psi0, tau, 1, 0.1);
                    for (double lambda : {0.05, 0.1}) {
                        const IonParams p = IonParams::from_lambda(lambda, eta, kappa);
                        compare_state(first_order_general(IonOperators(p, t), psi0, tau, &report),
                                      kets3, tag(eta, kappa, tau) + " general |3>g");
                    }
                }
            }
        }
    }

    // Coherent initial state, N = 128, first and second order.
    {
        const TruncationConfig t(128);
        const double alpha = 4.0;
        const auto psi0 = build_initial_state(InitialStateSpec::coherent_excited(alpha), t);
        for (double eta : {0.05, 0.1}) {
            for (double kappa : {0.0, 1.0}) {
                const IonParams pref(10.0, 1.0, kappa, eta);
                const auto split = split_high_intensity(pref, t);
                for (double tau : {0.3, 1.0, 2.0}) {
                    const auto kets2 =
                        corrections_block_matrix(split.h0, split.hp, psi0, tau, 2, 0.1);
                    PerturbativeKets kets1{{kets2.kets[0], kets2.kets[1]}, 1, 0.1};
                    for (double lambda : {0.05, 0.1}) {
                        const IonParams p = IonParams::from_lambda(lambda, eta, kappa);
                        compare_state(first_order_coherent_excited(p, alpha, tau, t, &report),
                                      kets1, tag(eta, kappa, tau) + " coherent k=1");
                        compare_state(second_order_coherent_excited(p, alpha, tau, t, &report),
                                      kets2, tag(eta, kappa, tau) + " coherent k=2");
                    }
                }
            }
        }
    }

    std::ostringstream detail;
    detail << "state " << worst_state.value << " @ " << worst_state.where << "; first-order norm "
           << "deviation rows: " << report.count_for("first_order");
    const bool pass = worst_state.value <= 1e-7 && report.count_for("first_order") == 0;
    return {"closed_form_vs_engine", pass, worst_state.value, 1e-7, clock.seconds(), detail.str()};
}

SuiteResult suite_normalization() {
    Stopwatch clock;
    Worst worst;
    const TruncationConfig t(128);
    const IonParams p = IonParams::from_lambda(0.1, 0.1, 0.0);
    const auto psi0 = build_initial_state(InitialStateSpec::coherent_excited(4.0), t);

    // exact propagator unitarity across the whole grid
    const ExactPropagator prop(p, t);
    for (int i = 0; i <= 200; ++i) {
        const double tau = 10.0 * i / 200.0;
        worst.update(std::abs(prop.evolve(psi0, tau).norm() - 1.0),
                     "exact tau=" + std::to_string(tau));
    }

    // assembled perturbative states
    const auto split = split_high_intensity(p, t);
    for (double tau : {0.5, 2.0, 5.0, 10.0}) {
        const auto kets = corrections_block_matrix(split.h0, split.hp, psi0, tau, 2, 0.1);
        worst.update(std::abs(assemble_state(kets).norm() - 1.0),
                     "engine tau=" + std::to_string(tau));
        worst.update(std::abs(second_order_coherent_excited(p, 4.0, tau, t).state.norm() - 1.0),
                     "closed-form tau=" + std::to_string(tau));
    }
    // formula-normalized specializations
    const IonParams pk(10.0, 1.0, 1.0, 0.1);
    for (double tau : {0.5, 1.0, 2.0})
        worst.update(std::abs(first_order_fock_ground(pk, 2, tau, TruncationConfig(64)).state.norm() - 1.0),
                     "fock formula tau=" + std::to_string(tau));
    return {"normalization", worst.value <= 1e-10, worst.value, 1e-10, clock.seconds(),
            worst.where};
}

SuiteResult suite_fig1_shape() {
    Stopwatch clock;
    RunConfig config;  // defaults are the figure parameters

    auto series = [&](double lambda) {
        const IonParams p = IonParams::from_lambda(lambda, config.eta, config.kappa);
        return compute_comparison_series(p, InitialStateSpec::coherent_excited(config.alpha),
                                         2, config.truncation(), config.tau_max, config.tau_steps);
    };

    double max_err_01 = 0.0;
    for (const auto& row : series(0.1)) max_err_01 = std::max(max_err_01, row.err_pert_smallrot);

    double early = 0.0, late = 0.0;
    for (const auto& row : series(0.4)) {
        if (row.tau <= 5.0)
            early = std::max(early, row.err_pert_smallrot);
        else
            late = std::max(late, row.err_pert_smallrot);
    }

    std::ostringstream detail;
    detail << "lambda=0.1 max|pe_pert-pe_sr|=" << max_err_01 << "; lambda=0.4 early=" << early
           << " late=" << late;
    const bool pass = max_err_01 <= 0.05 && late > early;
    return {"fig1_shape", pass, max_err_01, 0.05, clock.seconds(), detail.str()};
}

SuiteResult suite_rabi_equivalence(DeviationReport& report) {
    Stopwatch clock;
    const TruncationConfig t(128);
    const double eta = 0.1;
    Worst worst;

    const DenseOperator T = build_T(eta, t);
    worst.update(guard_max_abs(T.mat.adjoint() * T.mat - Matrix::Identity(t.dim(), t.dim()), t),
                 "T unitarity");

    const IonParams p(10.0, 1.0, 0.0, eta);
    const DenseOperator h_ion = hamiltonian_full(p, t);
    const DenseOperator h_rabi = rabi_hamiltonian(RabiParams::from_ion(p), t);
    const Matrix conj = T.mat * h_ion.mat * T.mat.adjoint();
    const double conj_defect = guard_max_abs(conj - h_rabi.mat, t);

    // transformed second-order solution vs the explicit gamma expression
    const IonParams pf = IonParams::from_lambda(0.1, eta, 0.0);
    const auto ion_state = second_order_coherent_excited(pf, 4.0, 1.0, t);
    const auto transformed = transform_solution(ion_state, &report);
    const double norm_defect = std::abs(transformed.state.norm() - 1.0);

    std::ostringstream detail;
    detail << "T unitarity " << worst.value << "; conjugation " << conj_defect
           << "; transform norm defect " << norm_defect << "; gamma-expression rows "
           << report.count_for("transform_solution");
    const bool pass = worst.value <= 1e-9 && conj_defect <= 1e-8 && norm_defect <= 1e-10 &&
                      report.count_for("transform_solution") == 0;
    return {"rabi_equivalence", pass, std::max(worst.value, conj_defect), 1e-8, clock.seconds(),
            detail.str()};
}

SuiteResult suite_singularity_safety() {
    Stopwatch clock;
    const double lambda = 0.1, eta = 0.1, kappa = 1.0, alpha = 4.0;
    const IonParams p = IonParams::from_lambda(lambda, eta, kappa);

    std::vector<double> taus;
    const int n = 10000;
    for (int i = 0; i <= n; ++i) taus.push_back(4.0 * M_PI * i / n);
    for (int m = 0; m < 4; ++m) {
        const double pole = M_PI / 2.0 + m * M_PI;
        taus.push_back(pole - 1e-8);
        taus.push_back(pole);
        taus.push_back(pole + 1e-8);
    }

    long bad = 0;
    std::string where;
    auto check = [&](double v, double tau, const char* what) {
        if (!std::isfinite(v)) {
            ++bad;
            if (where.empty()) where = std::string(what) + " at tau=" + std::to_string(tau);
        }
    };
    for (double tau : taus) {
        const auto f = f_coefficients(alpha, tau, eta, kappa);
        for (double v : {f.f1, f.f2, f.f3, f.f4, f.f5, f.f6}) check(v, tau, "F");
        const auto g = g_coefficients(alpha, tau, eta, kappa);
        for (double v : {g.g1, g.g2, g.g3, g.g4}) check(v, tau, "g");
        check(first_order_norm_inv_sq_coherent(p, alpha, tau), tau, "N1 coherent");
        check(first_order_norm_inv_sq_fock_ground(p, 2, tau), tau, "N1 fock g");
        check(first_order_norm_inv_sq_fock_excited(p, 2, tau), tau, "N1 fock e");
        check(second_order_norm_inv_sq_coherent(p, alpha, tau), tau, "N2 coherent");
        check(p_excited_second_order(p, alpha, tau), tau, "Pe second order");
        check(p_excited_small_rotation(alpha, eta, lambda, tau), tau, "Pe small rotation");
    }
    return {"singularity_safety", bad == 0, double(bad), 0.0, clock.seconds(),
            bad ? where : "all finite"};
}

std::vector<SuiteResult> run_validation_suites(DeviationReport& report) {
    std::vector<SuiteResult> results;
    results.push_back(suite_operator_identities());
    results.push_back(suite_engine_two_path());
    results.push_back(suite_taylor_scaling());
    results.push_back(suite_closed_form_vs_engine(report));
    results.push_back(suite_normalization());
    results.push_back(suite_fig1_shape());
    results.push_back(suite_rabi_equivalence(report));
    results.push_back(suite_singularity_safety());
    return results;
}

}  // namespace ionsim
