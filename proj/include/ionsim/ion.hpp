// Trapped-ion Hamiltonian, its high-intensity splitting, rescaled time and
// the exact truncated-space propagator used as the numerical oracle.

#ifndef IONSIM_ION_HPP
#define IONSIM_ION_HPP

#include <vector>

#include "ionsim/fock.hpp"

namespace ionsim {

/// Physical parameters.  Only ratios matter; time is always the rescaled
/// tau = Omega t, and the evolution operator is exp(-i (H/Omega) tau).
struct IonParams {
    double omega;  // Rabi frequency (laser coupling strength)
    double nu;     // trap frequency
    double kappa;  // detuning in trap-frequency units, delta = nu*kappa
    double eta;    // Lamb-Dicke parameter

    IonParams(double omega_, double nu_, double kappa_, double eta_)
        : omega(omega_), nu(nu_), kappa(kappa_), eta(eta_) {
        if (!(omega > 0.0) || !(nu > 0.0) || eta < 0.0)
            throw std::invalid_argument("IonParams: need omega > 0, nu > 0, eta >= 0");
    }

    /// Perturbation parameter of the high-intensity expansion.
    double lambda() const { return nu / omega; }
    bool high_intensity() const { return lambda() < 1.0; }

    /// Convenience for sweeps: fixes omega = 1, nu = lambda.
    static IonParams from_lambda(double lambda, double eta, double kappa = 0.0) {
        return {1.0, lambda, kappa, eta};
    }
};

/// Non-blocking parameter checks surfaced by the CLI.
std::vector<std::string> parameter_warnings(const IonParams& p);

/// Strictly ascending rescaled-time samples, first element >= 0.
struct TimeGrid {
    std::vector<double> taus;

    explicit TimeGrid(std::vector<double> t) : taus(std::move(t)) {
        if (taus.empty() || taus.front() < 0.0)
            throw std::invalid_argument("TimeGrid: need nonempty grid starting at tau >= 0");
        for (size_t i = 1; i < taus.size(); ++i)
            if (!(taus[i] > taus[i - 1]))
                throw std::invalid_argument("TimeGrid: taus must be strictly ascending");
    }

    static TimeGrid linspace(double tau_max, int steps);
};

enum class InitialKind { fock_ground, fock_excited, coherent_excited };

struct InitialStateSpec {
    InitialKind kind = InitialKind::coherent_excited;
    int n = 0;           // Fock kinds
    double alpha = 0.0;  // coherent kind

    static InitialStateSpec fock_ground(int n) { return {InitialKind::fock_ground, n, 0.0}; }
    static InitialStateSpec fock_excited(int n) { return {InitialKind::fock_excited, n, 0.0}; }
    static InitialStateSpec coherent_excited(double alpha) {
        return {InitialKind::coherent_excited, 0, alpha};
    }
};

FockSpinState build_initial_state(const InitialStateSpec& spec, TruncationConfig t);

// ---------------------------------------------------------------------------
// Operator bundle
//
// All the matrices the closed forms and identity checks keep re-using, built
// once per (params, truncation).  Everything is immutable after construction.
struct IonOperators {
    TruncationConfig trunc;
    IonParams params;
    Matrix a, a_dag, num;       // Fock blocks, fock_dim square
    Matrix disp;                // D(i eta) Fock block
    Matrix h0;                  // sigma+ D(i eta) + sigma- D(i eta)^dag   (full space)
    Matrix h0_minus;            // sigma+ D(i eta) - sigma- D(i eta)^dag
    Matrix hp;                  // n + (kappa/2) sigma_z                   (full space)
    Matrix sz;                  // sigma_z (x) I
    Matrix num_full;            // I2 (x) n
    Matrix ada_minus;           // I2 (x) (a - a^dag)
    Matrix ada_plus;            // I2 (x) (a + a^dag)

    IonOperators(const IonParams& p, TruncationConfig t);
};

// ---------------------------------------------------------------------------
// Spec operations

/// nu n + (delta/2) sigma_z + Omega [sigma+ D(i eta) + sigma- D(i eta)^dag]
DenseOperator hamiltonian_full(const IonParams& p, TruncationConfig t);

struct HighIntensitySplit {
    DenseOperator h0;  // sigma+ D + sigma- D^dag (squares to the identity)
    DenseOperator hp;  // n + (kappa/2) sigma_z
};

/// Splitting such that H/Omega = h0 + lambda*hp holds entrywise.
HighIntensitySplit split_high_intensity(const IonParams& p, TruncationConfig t);

/// exp(+i h0 tau) = cos(tau) I + i sin(tau) h0; the exp(-i h0 tau) variant is
/// the conjugate (replace tau by -tau).
DenseOperator propagator_h0(const IonParams& p, double tau, TruncationConfig t);

/// Exact evolution under H/Omega = h0 + lambda*hp with the eigendecomposition
/// computed once and reused across the whole grid.
class ExactPropagator {
public:
    ExactPropagator(const IonParams& p, TruncationConfig t);

    FockSpinState evolve(const FockSpinState& psi0, double tau) const;

private:
    TruncationConfig trunc_;
    Matrix vecs_;
    Eigen::VectorXd vals_;
};

/// psi(tau_j) for every grid point.  Throws TruncationInsufficient when any
/// output state leaks more than 1e-6 past the guard level.
std::vector<FockSpinState> exact_evolve(const IonParams& p, const FockSpinState& psi0,
                                        const TimeGrid& grid);

/// Probability of the internal excited state: squared norm of the e block.
double p_excited(const FockSpinState& psi);

}  // namespace ionsim

#endif  // IONSIM_ION_HPP
