#include "ionsim/nmpm.hpp"

#include <cmath>

#include "ionsim/quadrature.hpp"

namespace ionsim {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_compatible(const DenseOperator& h0, const DenseOperator& hp,
                        const FockSpinState& psi0) {
    if (!(h0.trunc == hp.trunc) || !(h0.trunc == psi0.trunc))
        throw DimensionMismatch("nmpm: h0, hp and psi0 must share one truncation");
}

void require_order(int k) {
    if (k < 1 || k > 2) throw std::invalid_argument("nmpm: order k must be 1 or 2");
}

Matrix build_block_matrix(const Matrix& h0, const Matrix& hp, int k) {
    const auto d = h0.rows();
    Matrix m = Matrix::Zero((k + 1) * d, (k + 1) * d);
    for (int i = 0; i <= k; ++i) {
        m.block(i * d, i * d, d, d) = h0;
        if (i < k) m.block(i * d, (i + 1) * d, d, d) = hp;
    }
    return m;
}

// Applies exp(s * i * H0 t) to a vector, s = +-1.  When H0^2 = I holds on the
// truncated space the cos/sin closed form is exact and needs one matvec.
class H0Propagator {
public:
    explicit H0Propagator(const Matrix& h0) : h0_(h0) {
        const auto d = h0.rows();
        involutory_ = (h0 * h0 - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10;
        if (!involutory_) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(h0);
            vecs_ = es.eigenvectors();
            vals_ = es.eigenvalues();
        }
    }

    Vector apply(double t, int sign, const Vector& v) const {
        if (involutory_) return std::cos(t) * v + (double(sign) * std::sin(t)) * (kI * (h0_ * v));
        Vector w = vecs_.adjoint() * v;
        for (int i = 0; i < w.size(); ++i) w[i] *= std::exp(double(sign) * kI * vals_[i] * t);
        return vecs_ * w;
    }

private:
    const Matrix& h0_;
    bool involutory_ = false;
    Matrix vecs_;
    Eigen::VectorXd vals_;
};

QuadratureRule make_rule(const QuadratureConfig& q, int ppu, double a, double b) {
    const int n = std::max(8, int(std::ceil(ppu * (b - a))));
    if (q.scheme == QuadratureScheme::gauss_legendre_nested) return gauss_legendre(n, a, b);
    return composite_simpson(n, a, b);
}

// Correction kets at one node density.
std::vector<Vector> quadrature_kets(const H0Propagator& prop, const Matrix& hp, const Vector& psi0,
                                    double tau, int k, const QuadratureConfig& q, int ppu) {
    auto hp_interaction = [&](double t, const Vector& v) {
        return prop.apply(t, +1, hp * prop.apply(t, -1, v));
    };

    std::vector<Vector> kets;
    kets.reserve(k + 1);
    kets.push_back(prop.apply(tau, -1, psi0));

    if (tau == 0.0) {
        for (int n = 1; n <= k; ++n) kets.push_back(Vector::Zero(psi0.size()));
        return kets;
    }

    const QuadratureRule outer = make_rule(q, ppu, 0.0, tau);
    Vector first = Vector::Zero(psi0.size());
    for (size_t i = 0; i < outer.nodes.size(); ++i)
        first += outer.weights[i] * hp_interaction(outer.nodes[i], psi0);
    kets.push_back(-kI * prop.apply(tau, -1, first));

    if (k >= 2) {
        Vector second = Vector::Zero(psi0.size());
        for (size_t i = 0; i < outer.nodes.size(); ++i) {
            const double t1 = outer.nodes[i];
            const QuadratureRule inner = make_rule(q, ppu, 0.0, t1);
            Vector v = Vector::Zero(psi0.size());
            for (size_t j = 0; j < inner.nodes.size(); ++j)
                v += inner.weights[j] * hp_interaction(inner.nodes[j], psi0);
            second += outer.weights[i] * hp_interaction(t1, v);
        }
        kets.push_back(-prop.apply(tau, -1, second));
    }
    return kets;
}

}  // namespace

PerturbativeKets corrections_block_matrix(const DenseOperator& h0, const DenseOperator& hp,
                                          const FockSpinState& psi0, double tau, int k,
                                          double lambda) {
    require_compatible(h0, hp, psi0);
    require_order(k);
    const auto d = h0.mat.rows();
    const Matrix m = build_block_matrix(h0.mat, hp.mat, k);
    const Matrix u = expm_general((-kI * tau) * m);
    PerturbativeKets pk{{}, k, lambda};
    pk.kets.reserve(k + 1);
    for (int n = 0; n <= k; ++n)
        pk.kets.emplace_back(Vector(u.block(0, n * d, d, d) * psi0.amps), psi0.trunc);
    return pk;
}

PerturbativeKets corrections_quadrature(const DenseOperator& h0, const DenseOperator& hp,
                                        const FockSpinState& psi0, double tau, int k, double lambda,
                                        const QuadratureConfig& q) {
    require_compatible(h0, hp, psi0);
    require_order(k);
    const H0Propagator prop(h0.mat);
    auto coarse = quadrature_kets(prop, hp.mat, psi0.amps, tau, k, q, q.points_per_unit_tau);
    auto fine = q.check_convergence
                    ? quadrature_kets(prop, hp.mat, psi0.amps, tau, k, q, 2 * q.points_per_unit_tau)
                    : coarse;
    if (q.check_convergence) {
        for (int n = 0; n <= k; ++n) {
            const double moved = (fine[n] - coarse[n]).cwiseAbs().maxCoeff();
            if (moved > 1e-7)
                throw QuadratureNotConverged("corrections_quadrature: doubling the density moved "
                                             "order-" + std::to_string(n) + " kets by " +
                                             std::to_string(moved));
        }
    }
    PerturbativeKets pk{{}, k, lambda};
    pk.kets.reserve(k + 1);
    for (int n = 0; n <= k; ++n) pk.kets.emplace_back(std::move(fine[n]), psi0.trunc);
    return pk;
}

NormalizationInfo normalization_info(const PerturbativeKets& pk) {
    const int k = pk.order;
    if (k < 1 || int(pk.kets.size()) != k + 1)
        throw std::invalid_argument("normalization_info: kets length must be order + 1");
    const double lambda = pk.lambda;
    double inv_sq = 1.0;
    for (int n = 1; n <= k; ++n) {
        inv_sq += 2.0 * std::pow(lambda, n) * inner(pk.kets[0], pk.kets[n]).real();
        inv_sq += std::pow(lambda, 2 * n) * inner(pk.kets[n], pk.kets[n]).real();
    }
    for (int n = 1; n <= k - 1; ++n)
        for (int m = 2 * n + 1; m <= n + k; ++m)
            inv_sq += 2.0 * std::pow(lambda, m) * inner(pk.kets[n], pk.kets[m - n]).real();
    if (!(inv_sq > 0.0))
        throw NonPositiveNormSquared("normalization_info: N^-2 = " + std::to_string(inv_sq) +
                                     " (lambda*tau far outside validity)");
    return {1.0 / std::sqrt(inv_sq), inv_sq, inv_sq < 0.1};
}

double normalization_factor(const PerturbativeKets& pk) { return normalization_info(pk).factor; }

FockSpinState partial_sum(const PerturbativeKets& pk) {
    Vector sum = pk.kets[0].amps;
    for (int n = 1; n <= pk.order; ++n) sum += std::pow(pk.lambda, n) * pk.kets[n].amps;
    return {std::move(sum), pk.kets[0].trunc};
}

FockSpinState assemble_state(const PerturbativeKets& pk) {
    const double factor = normalization_factor(pk);
    FockSpinState s = partial_sum(pk);
    s.amps *= factor;
    return s;
}

EnginePropagator::EnginePropagator(const DenseOperator& h0, const DenseOperator& hp, int k,
                                   double dtau)
    : trunc_(h0.trunc), order_(k), dim_(int(h0.mat.rows())) {
    if (!(h0.trunc == hp.trunc)) throw DimensionMismatch("EnginePropagator: truncation mismatch");
    require_order(k);
    step_exp_ = expm_general((-kI * dtau) * build_block_matrix(h0.mat, hp.mat, k));
    stacked_ = Vector::Zero((k + 1) * dim_);
}

void EnginePropagator::reset(const FockSpinState& psi0) {
    if (!(psi0.trunc == trunc_)) throw DimensionMismatch("EnginePropagator: truncation mismatch");
    stacked_.setZero();
    stacked_.segment(order_ * dim_, dim_) = psi0.amps;  // exp(-iM tau) maps the last
    // block slot onto the stacked column (psi^(k), ..., psi^(0)).
}

void EnginePropagator::step() { stacked_ = step_exp_ * stacked_; }

PerturbativeKets EnginePropagator::kets(double lambda) const {
    PerturbativeKets pk{{}, order_, lambda};
    pk.kets.reserve(order_ + 1);
    for (int n = 0; n <= order_; ++n)
        pk.kets.emplace_back(Vector(stacked_.segment((order_ - n) * dim_, dim_)), trunc_);
    return pk;
}

}  // namespace ionsim
