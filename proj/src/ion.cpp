#include "ionsim/ion.hpp"

#include <cmath>

namespace ionsim {

namespace {
constexpr Complex kI{0.0, 1.0};
}

std::vector<std::string> parameter_warnings(const IonParams& p) {
    std::vector<std::string> w;
    if (!p.high_intensity())
        w.push_back("lambda = nu/omega = " + std::to_string(p.lambda()) +
                    " >= 1: outside the high-intensity regime, perturbative results unreliable");
    if (std::abs(p.kappa - std::round(p.kappa)) > 1e-12)
        w.push_back("kappa = " + std::to_string(p.kappa) +
                    " is not an integer multiple of the trap frequency");
    return w;
}

TimeGrid TimeGrid::linspace(double tau_max, int steps) {
    if (steps < 2) throw std::invalid_argument("TimeGrid::linspace: need steps >= 2");
    std::vector<double> t(steps);
    for (int i = 0; i < steps; ++i) t[i] = tau_max * double(i) / double(steps - 1);
    return TimeGrid(std::move(t));
}

FockSpinState build_initial_state(const InitialStateSpec& spec, TruncationConfig t) {
    switch (spec.kind) {
        case InitialKind::fock_ground:
            return FockSpinState::basis(spec.n, Spin::g, t);
        case InitialKind::fock_excited:
            return FockSpinState::basis(spec.n, Spin::e, t);
        case InitialKind::coherent_excited:
            return FockSpinState::from_fock(coherent_ket(spec.alpha, t), Spin::e, t);
    }
    throw std::logic_error("build_initial_state: unknown kind");
}

IonOperators::IonOperators(const IonParams& p, TruncationConfig t)
    : trunc(t),
      params(p),
      a(fock_annihilation(t)),
      a_dag(a.adjoint()),
      num(fock_number(t)),
      disp(fock_displacement(kI * p.eta, t)) {
    h0 = spin_fock(pauli_plus(), disp) + spin_fock(pauli_minus(), disp.adjoint());
    h0_minus = spin_fock(pauli_plus(), disp) - spin_fock(pauli_minus(), disp.adjoint());
    sz = spin_fock(pauli_z(), Matrix::Identity(t.fock_dim(), t.fock_dim()));
    num_full = spin_identity_fock(num);
    ada_minus = spin_identity_fock(a - a_dag);
    ada_plus = spin_identity_fock(a + a_dag);
    hp = num_full + 0.5 * p.kappa * sz;
}

DenseOperator hamiltonian_full(const IonParams& p, TruncationConfig t) {
    IonOperators ops(p, t);
    const double delta = p.nu * p.kappa;
    return {p.nu * ops.num_full + 0.5 * delta * ops.sz + p.omega * ops.h0, t};
}

HighIntensitySplit split_high_intensity(const IonParams& p, TruncationConfig t) {
    IonOperators ops(p, t);
    return {DenseOperator{ops.h0, t}, DenseOperator{ops.hp, t}};
}

DenseOperator propagator_h0(const IonParams& p, double tau, TruncationConfig t) {
    IonOperators ops(p, t);
    Matrix u = std::cos(tau) * Matrix::Identity(t.dim(), t.dim()) + kI * std::sin(tau) * ops.h0;
    return {std::move(u), t};
}

ExactPropagator::ExactPropagator(const IonParams& p, TruncationConfig t) : trunc_(t) {
    IonOperators ops(p, t);
    const Matrix h = ops.h0 + p.lambda() * ops.hp;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    vecs_ = es.eigenvectors();
    vals_ = es.eigenvalues();
}

FockSpinState ExactPropagator::evolve(const FockSpinState& psi0, double tau) const {
    if (!(psi0.trunc == trunc_)) throw DimensionMismatch("ExactPropagator: truncation mismatch");
    Vector w = vecs_.adjoint() * psi0.amps;
    for (int i = 0; i < w.size(); ++i) w[i] *= std::exp(-kI * vals_[i] * tau);
    return {vecs_ * w, trunc_};
}

std::vector<FockSpinState> exact_evolve(const IonParams& p, const FockSpinState& psi0,
                                        const TimeGrid& grid) {
    if (psi0.boundary_leakage() > 1e-10)
        throw TruncationInsufficient("exact_evolve: initial state leaks past the guard level");
    ExactPropagator prop(p, psi0.trunc);
    std::vector<FockSpinState> out;
    out.reserve(grid.taus.size());
    for (double tau : grid.taus) {
        out.push_back(prop.evolve(psi0, tau));
        if (out.back().boundary_leakage() > 1e-6)
            throw TruncationInsufficient("exact_evolve: evolved state leaks past the guard level");
    }
    return out;
}

double p_excited(const FockSpinState& psi) { return psi.e_block().squaredNorm(); }

}  // namespace ionsim
