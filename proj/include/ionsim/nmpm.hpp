// Generic normalized matrix perturbation engine for H = H0 + lambda*Hp.
//
// Order-k correction kets are produced along two independent routes:
//
//  * block matrix: exponentiate the (k+1)x(k+1) block upper-bidiagonal
//    matrix M (H0 on the diagonal, Hp on the superdiagonal) and read the
//    corrections off the top block row of exp(-i M tau);
//
//  * quadrature: evaluate the nested time-ordered integrals of the Dyson
//    terms numerically.
//
// The unnormalized partial sum  sum_n lambda^n psi^(n)  is the degree-k
// lambda-Taylor polynomial of exp(-i(H0+lambda Hp)tau) psi0; the engine's
// normalization factor restores unit norm at any order.

#ifndef IONSIM_NMPM_HPP
#define IONSIM_NMPM_HPP

#include <vector>

#include "ionsim/fock.hpp"

namespace ionsim {

/// Correction kets psi^(0..k), not individually normalized.
struct PerturbativeKets {
    std::vector<FockSpinState> kets;  // kets[0] = exp(-i H0 tau) psi0, unit norm
    int order;                        // k >= 1
    double lambda;
};

enum class QuadratureScheme { gauss_legendre_nested, composite_simpson };

struct QuadratureConfig {
    QuadratureScheme scheme = QuadratureScheme::gauss_legendre_nested;
    int points_per_unit_tau = 16;  // per nesting level, minimum 8 nodes per interval
    bool check_convergence = true; // re-evaluate at doubled density and compare

    QuadratureConfig() = default;
    QuadratureConfig(QuadratureScheme s, int ppu, bool check = true)
        : scheme(s), points_per_unit_tau(ppu), check_convergence(check) {
        if (ppu < 1) throw std::invalid_argument("QuadratureConfig: positive point density required");
    }
};

/// Correction kets from the block-matrix exponential (scaling-and-squaring
/// Pade; M is defective by construction, so no eigendecomposition).
/// Supported orders: k in {1, 2}.
PerturbativeKets corrections_block_matrix(const DenseOperator& h0, const DenseOperator& hp,
                                          const FockSpinState& psi0, double tau, int k,
                                          double lambda);

/// Correction kets from nested numerical quadrature of the time-ordered
/// integrals.  Inner propagators use the cos/sin closed form whenever
/// H0^2 = I holds to 1e-10, otherwise a reusable eigendecomposition.
/// Throws QuadratureNotConverged if doubling the node density moves any
/// component by more than 1e-7.
PerturbativeKets corrections_quadrature(const DenseOperator& h0, const DenseOperator& hp,
                                        const FockSpinState& psi0, double tau, int k, double lambda,
                                        const QuadratureConfig& q = {});

struct NormalizationInfo {
    double factor;          // N^(k) > 0
    double inv_square;      // N^(k)^{-2} as given by the order-k formula
    bool validity_warning;  // inv_square in (0, 0.1): normalization is rescuing
                            // a badly diverged sum (lambda*tau too large)
};

/// Normalization factor from the explicit order-k inner-product formula
/// (diagonal terms, the 2 lambda^n Re<psi0|psi_n> terms and the cross terms
/// 2 lambda^m Re<psi_n|psi_{m-n}> for k > 1).
/// Throws NonPositiveNormSquared when the formula yields <= 0.
NormalizationInfo normalization_info(const PerturbativeKets& pk);
double normalization_factor(const PerturbativeKets& pk);

/// N^(k) sum_n lambda^n psi^(n); unit norm by construction.
FockSpinState assemble_state(const PerturbativeKets& pk);

/// Unnormalized partial sum (the bare lambda-Taylor polynomial).
FockSpinState partial_sum(const PerturbativeKets& pk);

/// Propagates the stacked correction kets over a uniform tau grid with a
/// single block-matrix exponential, for order-k evolution at many times
/// (used by the evolve driver).  One step() call advances all kets by dtau.
class EnginePropagator {
public:
    EnginePropagator(const DenseOperator& h0, const DenseOperator& hp, int k, double dtau);

    void reset(const FockSpinState& psi0);
    void step();
    /// Corrections at the current tau = (steps taken) * dtau.
    PerturbativeKets kets(double lambda) const;

private:
    TruncationConfig trunc_;
    int order_;
    int dim_;
    Matrix step_exp_;  // exp(-i M dtau)
    Vector stacked_;   // block i holds psi^(k-i)
};

}  // namespace ionsim

#endif  // IONSIM_NMPM_HPP
