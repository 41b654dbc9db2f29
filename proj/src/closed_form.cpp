#include "ionsim/closed_form.hpp"

#include <cmath>

namespace ionsim {

namespace {

constexpr Complex kI{0.0, 1.0};

// Pole-free building blocks.
double t_cos_minus_sin(double tau) { return tau * std::cos(tau) - std::sin(tau); }           // cos*[tau - tan]
double t_cos_minus_sin_p(double tau) {                                                       // cos*[tau - tan*(1+tau^2)]
    return tau * std::cos(tau) - (1.0 + tau * tau) * std::sin(tau);
}
double t_cos_minus_sin_m(double tau) {                                                       // cos*[tau - tan*(1-tau^2)]
    return tau * std::cos(tau) - (1.0 - tau * tau) * std::sin(tau);
}

Validity validity_for(double lambda, double tau) {
    return lambda * tau > 1.0 ? Validity::warning_lambda_tau : Validity::ok;
}

double factor_from_inv_sq(double inv_sq) {
    if (!(inv_sq > 0.0))
        throw NonPositiveNormSquared("closed_form: explicit N^-2 = " + std::to_string(inv_sq));
    return 1.0 / std::sqrt(inv_sq);
}

void record_norm(DeviationReport* report, const char* operation, int order, const IonParams& p,
                 double alpha, double tau, double formula_factor, double direct_factor) {
    if (report)
        report->record(operation, order, p.lambda(), p.eta, p.kappa, alpha, tau, "norm",
                       formula_factor, direct_factor);
}

}  // namespace

FCoefficients f_coefficients(double alpha, double tau, double eta, double kappa) {
    const double c = std::cos(tau), s = std::sin(tau);
    const double tc = t_cos_minus_sin(tau);
    FCoefficients f;
    f.f1 = tau / 8.0 * (eta * tc * (alpha * alpha * eta + (eta * eta + 1.0) * (eta - 2.0 * alpha)) +
                        kappa * kappa * s);
    f.f2 = tau / 4.0 *
           (2.0 * alpha * tau * c +
            eta * (3.0 * eta * alpha - 2.0 * alpha * alpha - (eta * eta + 1.0)) * tc +
            2.0 * alpha * kappa * s);
    f.f3 = tau / 8.0 * (4.0 * tau * alpha * alpha * c + eta * (eta - 4.0 * alpha) * tc);
    // The tau^2 sin(tau) bracket here is [alpha^2 eta + 2 alpha - eta].  The
    // widely quoted variant adds alpha(eta^2 + 1) to it; assembling the
    // second-order solution with that variant breaks the agreement with the
    // perturbation engine by exactly the added term (see
    // f4_quoted_variant and the deviation report).
    f.f4 = (eta * tau * tau * (alpha * alpha * eta + 2.0 * alpha - eta) * s -
            (2.0 * eta * (alpha * kappa + eta - alpha) + eta * eta * (alpha * alpha + 1.0) +
             kappa * kappa) *
                tc) /
           8.0;
    f.f5 = (eta * (alpha * eta + kappa + 1.0) * tc -
            (2.0 * alpha - eta) * (alpha * eta + 1.0) * tau * tau * s) /
           4.0;
    f.f6 = (tau * tau * (4.0 * alpha * (eta - alpha) - eta * eta) * s + eta * eta * tc) / 8.0;
    return f;
}

GCoefficients g_coefficients(double alpha, double tau, double eta, double kappa) {
    const double c = std::cos(tau), s = std::sin(tau);
    const double tc = t_cos_minus_sin(tau);
    GCoefficients g;
    g.g1 = 0.5 * (eta * (alpha - eta) * tc - kappa * s);
    g.g2 = 0.5 * (2.0 * alpha * tau * c - eta * tc);
    g.g3 = 0.5 * tau * alpha * eta * s;
    g.g4 = 0.5 * tau * (2.0 * alpha - eta) * s;
    return g;
}

Vector derivative_bracket_ket(double alpha, int order, TruncationConfig t) {
    const Vector k = coherent_ket(alpha, t);
    const Vector d1 = coherent_derivative_ket(alpha, 1, t);
    if (order == 1) return d1 + alpha * k;
    if (order == 2) {
        const Vector d2 = coherent_derivative_ket(alpha, 2, t);
        // (d/da + a)^2 = d2 + 2 a d1 + (a^2 + 1); the +1 is the [d/da, a]
        // commutator that the naive expansion drops.
        return d2 + 2.0 * alpha * d1 + (alpha * alpha + 1.0) * k;
    }
    throw std::invalid_argument("derivative_bracket_ket: order must be 1 or 2");
}

// ---------------------------------------------------------------------------
// Correction operators applied to a vector

Vector first_order_correction(const IonOperators& ops, const Vector& psi0, double tau) {
    const double eta = ops.params.eta, kappa = ops.params.kappa;
    const double c = std::cos(tau), s = std::sin(tau);
    const double tc = t_cos_minus_sin(tau);

    const Vector nv = ops.num_full * psi0;
    const Vector av = eta * psi0 + kI * (ops.ada_minus * (ops.sz * psi0));  // [eta + i(a-a+)sz]
    const Vector branch_cos =
        -kI * (tau * c * nv + 0.5 * eta * tc * av + 0.5 * kappa * s * (ops.sz * psi0));
    const Vector branch_sin = -tau * s * (ops.h0 * (nv + 0.5 * eta * av));
    return branch_cos + branch_sin;
}

Vector second_order_correction(const IonOperators& ops, const Vector& psi0, double tau) {
    const double eta = ops.params.eta, kappa = ops.params.kappa;
    const double c = std::cos(tau), s = std::sin(tau);
    const double tc = t_cos_minus_sin(tau);
    const double tp = t_cos_minus_sin_p(tau);
    const double tm = t_cos_minus_sin_m(tau);
    const int nf = ops.trunc.fock_dim();
    const Matrix fock_id = Matrix::Identity(nf, nf);

    const Matrix aa2 = spin_identity_fock(ops.a * ops.a + ops.a_dag * ops.a_dag);
    const Matrix adm = ops.ada_minus;  // I2 (x) (a - a+)
    const Matrix adp = ops.ada_plus;   // I2 (x) (a + a+)
    const Vector szv = ops.sz * psi0;
    const Vector nv = ops.num_full * psi0;

    Vector out = Vector::Zero(psi0.size());

    // diagonal-in-spin part
    out += -(tau / 8.0) * (4.0 * tau * c * (ops.num_full * nv) +
                           eta * eta * tc * (6.0 * nv + (eta * eta + 1.0) * psi0) -
                           eta * eta * tc * (aa2 * psi0));
    // sigma+- D branches
    out += -kI * (eta * eta / 8.0) * tp * (ops.h0 * (2.0 * nv + (eta * eta + 1.0) * psi0));
    out += kI * (eta * eta / 8.0) * tp * (ops.h0 * (aa2 * psi0));
    out += -kI * (kappa * eta / 4.0) * tc *
           (ops.h0_minus * (eta * psi0 + kI * (adm * szv)));
    out += -(eta * eta * eta / 4.0) * tp * (ops.h0_minus * (adm * psi0));
    out += -(eta / 4.0) * tm * (ops.h0_minus * (adp * psi0));
    // a (2n + eta^2 - 1) - a+ (2n + eta^2 + 1), times sigma_z
    {
        const Matrix low = ops.a * (2.0 * ops.num + (eta * eta - 1.0) * fock_id);
        const Matrix high = ops.a_dag * (2.0 * ops.num + (eta * eta + 1.0) * fock_id);
        out += -kI * (eta * tau / 4.0) * tc * (spin_identity_fock(low - high) * szv);
    }
    out += -kI * (kappa * kappa / 8.0) * tc * (ops.h0 * psi0);
    out += 0.5 * eta * tau * tau * s * (ops.h0_minus * (spin_identity_fock((ops.a - ops.a_dag) * ops.num) * psi0));
    out += kI * 0.5 * tau * tau * s *
           (ops.h0 * (spin_identity_fock(ops.num * (ops.num + eta * eta * fock_id)) * psi0));
    out += -(kappa / 8.0) * tau * s * (4.0 * (ops.num_full * szv) + kappa * psi0);
    return out;
}

// ---------------------------------------------------------------------------
// Explicit normalization formulas

double first_order_norm_inv_sq(const IonOperators& ops, const Vector& psi0, double tau) {
    const double lambda = ops.params.lambda();
    const double eta = ops.params.eta, kappa = ops.params.kappa;
    const double s = std::sin(tau), s2 = std::sin(2.0 * tau);
    const double big_s = s * s + tau * tau - tau * s2;  // sin^2 + tau[tau - sin 2tau]
    const double l2 = lambda * lambda;

    const Vector nv = ops.num_full * psi0;
    const Vector szv = ops.sz * psi0;
    const Matrix aa2 = spin_identity_fock(ops.a * ops.a + ops.a_dag * ops.a_dag);
    const Matrix adm_n = spin_identity_fock((ops.a - ops.a_dag) * ops.num);

    const double e_nsq = nv.squaredNorm();
    const double e_x1 =
        (psi0.dot(2.0 * nv - aa2 * psi0 + 2.0 * kI * eta * (ops.ada_minus * szv))).real();
    const double e_x2 =
        (psi0.dot(2.0 * eta * nv + kI * (2.0 * (adm_n * szv) - ops.ada_plus * szv))).real();
    // kappa cross term: sin(2tau) {n tau + (eta/2)[tau - tan][eta + i(a-a+)sz]} sz
    const Vector av = eta * psi0 + kI * (ops.ada_minus * szv);
    const double tc2 = tau * s2 - 2.0 * s * s;  // sin(2tau)[tau - tan(tau)]
    const double e_x3 =
        (psi0.dot(ops.sz * (tau * s2 * nv + 0.5 * eta * tc2 * av))).real();

    return 1.0 + 0.25 * l2 * eta * eta * (eta * eta + 1.0) * big_s +
           0.25 * l2 * kappa * kappa * s * s + l2 * tau * tau * e_nsq +
           0.25 * l2 * eta * eta * big_s * e_x1 + 0.25 * l2 * tau * eta * (2.0 * tau - s2) * e_x2 +
           0.5 * l2 * kappa * e_x3;
}

double first_order_norm_inv_sq_fock_ground(const IonParams& p, int n, double tau) {
    const double lambda = p.lambda(), eta = p.eta, kappa = p.kappa;
    const double s = std::sin(tau), s2 = std::sin(2.0 * tau);
    const double l2 = lambda * lambda, e2 = eta * eta;
    const double tc2 = tau * s2 - 2.0 * s * s;  // sin(2tau)[tau - tan(tau)]
    return 1.0 +
           l2 / 8.0 *
               (4.0 * tau * tau * n * (e2 + 2.0 * n) +
                2.0 * (e2 * (e2 + 2.0 * n + 1.0) + kappa * kappa) * s * s +
                2.0 * tau * e2 * (e2 + 4.0 * n + 1.0) * (tau - s2)) -
           l2 * kappa / 4.0 * (2.0 * n * tau * s2 + e2 * tc2);
}

double first_order_norm_inv_sq_fock_excited(const IonParams& p, int n, double tau) {
    const double lambda = p.lambda(), eta = p.eta, kappa = p.kappa;
    const double s = std::sin(tau), s2 = std::sin(2.0 * tau);
    const double tc2 = tau * s2 - 2.0 * s * s;
    return first_order_norm_inv_sq_fock_ground(p, n, tau) +
           lambda * lambda * kappa / 2.0 * (2.0 * n * tau * s2 + eta * eta * tc2);
}

double first_order_norm_inv_sq_coherent(const IonParams& p, double alpha, double tau) {
    const double lambda = p.lambda(), eta = p.eta, kappa = p.kappa;
    const double s = std::sin(tau), s2 = std::sin(2.0 * tau), c2 = std::cos(2.0 * tau);
    const double l2 = lambda * lambda, e2 = eta * eta, t2 = tau * tau;
    const double am = alpha - eta, two_am = 2.0 * alpha - eta;
    const double tc2 = tau * s2 - 2.0 * s * s;
    return 1.0 +
           l2 / 2.0 *
               (alpha * eta * am * (eta - 4.0 * alpha * t2) +
                2.0 * alpha * t2 * (alpha * (alpha * alpha + 1.0) - eta * (e2 + 1.0))) +
           l2 * kappa * kappa / 4.0 * s * s -
           l2 / 8.0 *
               (e2 * (two_am * two_am + 1.0) * c2 -
                2.0 * tau * eta * two_am * (e2 + 2.0 * alpha * am + 1.0) * s2) +
           l2 * kappa / 4.0 * (2.0 * alpha * alpha * tau * s2 - two_am * eta * tc2) +
           l2 * e2 / 8.0 * (e2 + 1.0) * (2.0 * t2 + 1.0);
}

double second_order_norm_inv_sq_coherent(const IonParams& p, double alpha, double tau) {
    const double lambda = p.lambda(), eta = p.eta;
    const auto [f1, f2, f3, f4, f5, f6] = f_coefficients(alpha, tau, eta, p.kappa);
    const double l2 = lambda * lambda, l4 = l2 * l2;
    const double s = std::sin(tau);
    const double am = alpha - eta;
    return 1.0 - 0.25 * tau * tau * l2 * alpha * eta * (eta * eta + 1.0) * s * s +
           l4 * (f1 * f1 + f2 * f2 + 2.0 * (f3 * f3 + f6 * f6) + f4 * f4 + f5 * f5) +
           alpha * alpha * l4 * (2.0 * (f1 + 2.0 * f3) * f3 + f2 * f2) +
           alpha * alpha * alpha * l4 * (2.0 * f2 + alpha * f3) * f3 +
           2.0 * alpha * l4 * (f1 + 2.0 * f3) * f2 + 2.0 * am * l4 * (2.0 * f6 - f4) * f5 +
           am * am * l4 * (f5 * f5 - 2.0 * (f4 - 2.0 * f6) * f6) +
           am * am * am * l4 * (2.0 * f5 + am * f6) * f6;
}

// ---------------------------------------------------------------------------
// First-order solutions

ClosedFormResult first_order_general(const IonOperators& ops, const FockSpinState& psi0,
                                     double tau, DeviationReport* report) {
    if (!(psi0.trunc == ops.trunc))
        throw DimensionMismatch("first_order_general: truncation mismatch");
    if (psi0.boundary_leakage() > 1e-10)
        throw TruncationInsufficient("first_order_general: psi0 leaks past the guard level");
    const IonParams& p = ops.params;
    const double lambda = p.lambda();
    const double c = std::cos(tau), s = std::sin(tau);

    const Vector psi0_evolved = c * psi0.amps - kI * s * (ops.h0 * psi0.amps);
    const Vector psi1 = first_order_correction(ops, psi0.amps, tau);
    Vector sum = psi0_evolved + lambda * psi1;

    const double direct_inv_sq = sum.squaredNorm();
    const double direct = factor_from_inv_sq(direct_inv_sq);
    const double formula = factor_from_inv_sq(first_order_norm_inv_sq(ops, psi0.amps, tau));
    record_norm(report, "first_order_general", 1, p, 0.0, tau, formula, direct);

    sum *= direct;
    return {FockSpinState{std::move(sum), ops.trunc},
            direct,
            1,
            validity_for(lambda, tau),
            p,
            tau,
            InitialStateSpec{},
            formula,
            std::abs(formula - direct) / direct};
}

ClosedFormResult first_order_general(const IonParams& p, const FockSpinState& psi0, double tau,
                                     DeviationReport* report) {
    return first_order_general(IonOperators(p, psi0.trunc), psi0, tau, report);
}

namespace {

// Shared assembly for the |n>|g> and |n>|e> specializations.  Branch signs
// follow the sigma_z eigenvalue of the initial spin.
ClosedFormResult first_order_fock(const IonParams& p, int n, double tau, TruncationConfig t,
                                  bool excited, DeviationReport* report) {
    if (n < 0 || n > t.guard_n - 2)
        throw TruncationInsufficient("first_order_fock: need 0 <= n <= guard_n - 2");
    const double lambda = p.lambda(), eta = p.eta, kappa = p.kappa;
    const double c = std::cos(tau), s = std::sin(tau);
    const double tc = t_cos_minus_sin(tau);
    const double sz = excited ? 1.0 : -1.0;
    const int nf = t.fock_dim();

    // Stationary-spin branch: {cos(1 - i lam tau n) - i lam eta^2/2 [tc]
    //                          - i lam kappa/2 sin * sz} |n>
    // plus the ladder-shifted pair; sign of the shifted pair follows sz.
    Vector fock_same = Vector::Zero(nf);
    const Complex coef_n =
        c * (1.0 - kI * lambda * tau * double(n)) - kI * 0.5 * lambda * eta * eta * tc -
        kI * 0.5 * lambda * kappa * s * sz;
    fock_same[n] = coef_n;
    const Complex coef_shift = sz * 0.5 * lambda * eta * tc;
    if (n >= 1) fock_same[n - 1] += coef_shift * std::sqrt(double(n));
    fock_same[n + 1] += -coef_shift * std::sqrt(double(n + 1));

    // Spin-flipped branch lives on displaced number states |±i eta; m>.
    const Matrix disp = fock_displacement(kI * (excited ? -eta : eta), t);
    Vector fock_flip = Vector::Zero(nf);
    const Complex coef_disp = -kI * s * (1.0 - kI * lambda * tau * (n + 0.5 * eta * eta));
    fock_flip += coef_disp * disp.col(n);
    const Complex coef_disp_shift = -sz * kI * 0.5 * lambda * eta * tau * s;
    if (n >= 1) fock_flip += coef_disp_shift * std::sqrt(double(n)) * disp.col(n - 1);
    fock_flip += -coef_disp_shift * std::sqrt(double(n + 1)) * disp.col(n + 1);

    Vector full = Vector::Zero(t.dim());
    full.segment(excited ? 0 : nf, nf) = fock_same;
    full.segment(excited ? nf : 0, nf) = fock_flip;

    const double direct = factor_from_inv_sq(full.squaredNorm());
    const double inv_sq = excited ? first_order_norm_inv_sq_fock_excited(p, n, tau)
                                  : first_order_norm_inv_sq_fock_ground(p, n, tau);
    const double formula = factor_from_inv_sq(inv_sq);
    const char* op = excited ? "first_order_fock_excited" : "first_order_fock_ground";
    record_norm(report, op, 1, p, 0.0, tau, formula, direct);

    full *= formula;  // explicit formula is the advertised normalization here
    auto spec = excited ? InitialStateSpec::fock_excited(n) : InitialStateSpec::fock_ground(n);
    return {FockSpinState{std::move(full), t},
            formula,
            1,
            validity_for(lambda, tau),
            p,
            tau,
            spec,
            formula,
            std::abs(formula - direct) / direct};
}

}  // namespace

ClosedFormResult first_order_fock_ground(const IonParams& p, int n, double tau, TruncationConfig t,
                                         DeviationReport* report) {
    return first_order_fock(p, n, tau, t, false, report);
}

ClosedFormResult first_order_fock_excited(const IonParams& p, int n, double tau, TruncationConfig t,
                                          DeviationReport* report) {
    return first_order_fock(p, n, tau, t, true, report);
}

ClosedFormResult first_order_coherent_excited(const IonParams& p, double alpha, double tau,
                                              TruncationConfig t, DeviationReport* report) {
    const double lambda = p.lambda(), eta = p.eta;
    const double s = std::sin(tau), c = std::cos(tau);
    const auto g = g_coefficients(alpha, tau, eta, p.kappa);

    const Vector k = coherent_ket(alpha, t);
    const Vector km = coherent_ket(alpha - eta, t);
    const Vector b1 = derivative_bracket_ket(alpha, 1, t);
    const Vector b1m = derivative_bracket_ket(alpha - eta, 1, t);

    const int nf = t.fock_dim();
    Vector full = Vector::Zero(t.dim());
    full.segment(0, nf) = (c + kI * lambda * g.g1) * k - kI * lambda * g.g2 * b1;
    full.segment(nf, nf) = (-kI * s - lambda * g.g3) * km - lambda * g.g4 * b1m;

    const double direct = factor_from_inv_sq(full.squaredNorm());
    const double formula = factor_from_inv_sq(first_order_norm_inv_sq_coherent(p, alpha, tau));
    record_norm(report, "first_order_coherent_excited", 1, p, alpha, tau, formula, direct);

    full *= direct;
    return {FockSpinState{std::move(full), t},
            direct,
            1,
            validity_for(lambda, tau),
            p,
            tau,
            InitialStateSpec::coherent_excited(alpha),
            formula,
            std::abs(formula - direct) / direct};
}

// ---------------------------------------------------------------------------
// Second order

ClosedFormResult second_order_coherent_excited(const IonParams& p, double alpha, double tau,
                                               TruncationConfig t, DeviationReport* report) {
    const double lambda = p.lambda(), eta = p.eta;
    const double s = std::sin(tau), c = std::cos(tau);
    const double l2 = lambda * lambda;
    const auto g = g_coefficients(alpha, tau, eta, p.kappa);
    const auto [f1, f2, f3, f4, f5, f6] = f_coefficients(alpha, tau, eta, p.kappa);

    const Vector k = coherent_ket(alpha, t);
    const Vector km = coherent_ket(alpha - eta, t);
    const Vector b1 = derivative_bracket_ket(alpha, 1, t);
    const Vector b1m = derivative_bracket_ket(alpha - eta, 1, t);
    const Vector b2 = derivative_bracket_ket(alpha, 2, t);
    const Vector b2m = derivative_bracket_ket(alpha - eta, 2, t);

    const int nf = t.fock_dim();
    Vector full = Vector::Zero(t.dim());
    full.segment(0, nf) = (c + kI * lambda * g.g1 - l2 * f1) * k -
                          (kI * lambda * g.g2 + l2 * f2) * b1 - l2 * f3 * b2;
    full.segment(nf, nf) = (-kI * s - lambda * g.g3 + kI * l2 * f4) * km -
                           (lambda * g.g4 + kI * l2 * f5) * b1m - kI * l2 * f6 * b2m;

    const double direct = factor_from_inv_sq(full.squaredNorm());
    const double formula = factor_from_inv_sq(second_order_norm_inv_sq_coherent(p, alpha, tau));
    record_norm(report, "second_order_coherent_excited", 2, p, alpha, tau, formula, direct);

    full *= direct;
    return {FockSpinState{std::move(full), t},
            direct,
            2,
            validity_for(lambda, tau),
            p,
            tau,
            InitialStateSpec::coherent_excited(alpha),
            formula,
            std::abs(formula - direct) / direct};
}

double p_excited_second_order(const IonParams& p, double alpha, double tau,
                              DeviationReport* report, TruncationConfig* t) {
    const double lambda = p.lambda(), eta = p.eta;
    const double c = std::cos(tau);
    const double l2 = lambda * lambda, l4 = l2 * l2;
    const auto [f1, f2, f3, f4, f5, f6] = f_coefficients(alpha, tau, eta, p.kappa);
    const auto g = g_coefficients(alpha, tau, eta, p.kappa);
    const double a2 = alpha * alpha;

    const double braces =
        -l2 * c * (2.0 * a2 * f3 + alpha * f2 + 2.0 * f1) +
        l4 * (f1 * f1 + f2 * f2 + 2.0 * f3 * f3) + c * c +
        l2 * (g.g1 * g.g1 + (a2 + 1.0) * g.g2 * g.g2 - 2.0 * alpha * g.g1 * g.g2) +
        2.0 * l4 * alpha * a2 * f2 * f3 + a2 * l4 * (f2 * f2 + 2.0 * f3 * (f1 + 2.0 * f3)) +
        alpha * l4 * (2.0 * f2 * (f1 + 2.0 * f3) + a2 * alpha * f3 * f3);
    // The normalization enters as the square of the factor, i.e. divided by
    // the explicit N^-2 (multiplying by N^-2 drives P_e out of [0,1] as soon
    // as lambda*tau grows).
    const double pe = braces / second_order_norm_inv_sq_coherent(p, alpha, tau);

    if (report && t) {
        const double pe_state = p_excited(second_order_coherent_excited(p, alpha, tau, *t).state);
        report->record("p_excited_second_order", 2, lambda, eta, p.kappa, alpha, tau, "pe", pe,
                       pe_state);
    }
    return pe;
}

double p_excited_small_rotation(double alpha, double eta, double lambda, double tau) {
    const double chi = -0.5 * lambda * lambda * eta * eta;
    const double msq = (alpha - 0.5 * eta) * (alpha - 0.5 * eta);
    const double sin_chi = std::sin(tau * chi);
    return 0.5 * (1.0 + std::exp(-2.0 * msq * sin_chi * sin_chi) *
                            std::cos(tau * (2.0 - chi) - msq * std::sin(2.0 * tau * chi)));
}

}  // namespace ionsim
