#include "ionsim/fock.hpp"

#include <cmath>

namespace ionsim {

namespace {
constexpr Complex kI{0.0, 1.0};
}

// ---------------------------------------------------------------------------
// FockSpinState

FockSpinState FockSpinState::basis(int n, Spin s, TruncationConfig t) {
    if (n < 0 || n > t.cutoff_n)
        throw std::invalid_argument("FockSpinState::basis: n outside truncation");
    Vector v = Vector::Zero(t.dim());
    v[(s == Spin::e ? 0 : t.fock_dim()) + n] = 1.0;
    return {std::move(v), t};
}

FockSpinState FockSpinState::from_fock(const Vector& fock, Spin s, TruncationConfig t) {
    if (fock.size() != t.fock_dim())
        throw DimensionMismatch("FockSpinState::from_fock: Fock vector length mismatch");
    Vector v = Vector::Zero(t.dim());
    v.segment(s == Spin::e ? 0 : t.fock_dim(), t.fock_dim()) = fock;
    return {std::move(v), t};
}

double FockSpinState::boundary_leakage() const {
    const int nf = fock_dim();
    double leak = 0.0;
    for (int n = trunc.guard_n + 1; n <= trunc.cutoff_n; ++n)
        leak += std::norm(amps[n]) + std::norm(amps[nf + n]);
    return leak;
}

FockSpinState FockSpinState::normalized() const {
    const double nrm = norm();
    if (!(nrm > 0.0)) throw NonPositiveNormSquared("normalized: zero-norm state");
    return {amps / nrm, trunc};
}

// ---------------------------------------------------------------------------
// Fock blocks

Matrix fock_annihilation(TruncationConfig t) {
    const int nf = t.fock_dim();
    Matrix a = Matrix::Zero(nf, nf);
    for (int n = 1; n < nf; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

Matrix fock_number(TruncationConfig t) {
    const int nf = t.fock_dim();
    Matrix num = Matrix::Zero(nf, nf);
    for (int n = 0; n < nf; ++n) num(n, n) = double(n);
    return num;
}

Matrix fock_displacement(Complex beta, TruncationConfig t) {
    // beta a^dag - beta* a is antihermitian, so i*(that) is hermitian and the
    // eigendecomposition route yields an exactly unitary truncated matrix.
    const Matrix a = fock_annihilation(t);
    const Matrix gen = beta * a.adjoint() - std::conj(beta) * a;   // antihermitian
    const Matrix h = kI * gen;                                     // hermitian
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& w = es.eigenvalues();
    Vector phases(w.size());
    for (int i = 0; i < w.size(); ++i) phases[i] = std::exp(-kI * w[i]);  // exp(gen) = exp(-i h)
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix fock_displacement_laguerre(Complex beta, TruncationConfig t) {
    const int nf = t.fock_dim();
    const double x = std::norm(beta);  // |beta|^2
    const double gauss = std::exp(-0.5 * x);
    Matrix d(nf, nf);
    for (int n = 0; n < nf; ++n) {
        for (int m = n; m < nf; ++m) {
            const int k = m - n;
            // L_n^{(k)}(x) by the three-term recurrence.
            double lm2 = 1.0;            // L_0
            double lm1 = 1.0 + k - x;    // L_1
            double l = (n == 0) ? lm2 : lm1;
            for (int j = 2; j <= n; ++j) {
                l = ((2.0 * j - 1.0 + k - x) * lm1 - (j - 1.0 + k) * lm2) / double(j);
                lm2 = lm1;
                lm1 = l;
            }
            // sqrt(n!/m!) = 1/sqrt((n+1)(n+2)...m)
            double ratio = 1.0;
            for (int j = n + 1; j <= m; ++j) ratio /= double(j);
            const double root = std::sqrt(ratio);
            d(m, n) = gauss * root * std::pow(beta, k) * l;
            if (m != n) d(n, m) = gauss * root * std::pow(-std::conj(beta), k) * l;
        }
    }
    return d;
}

Matrix spin_fock(const Eigen::Matrix2cd& s, const Matrix& fock_block) {
    const auto nf = fock_block.rows();
    Matrix full = Matrix::Zero(2 * nf, 2 * nf);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (s(i, j) != Complex(0.0)) full.block(i * nf, j * nf, nf, nf) = s(i, j) * fock_block;
    return full;
}

Matrix spin_identity_fock(const Matrix& fock_block) {
    return spin_fock(Eigen::Matrix2cd::Identity(), fock_block);
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(0, 0) = 1.0;
    s(1, 1) = -1.0;
    return s;
}

Eigen::Matrix2cd pauli_plus() {
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(0, 1) = 1.0;  // |e><g|
    return s;
}

Eigen::Matrix2cd pauli_minus() {
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(1, 0) = 1.0;  // |g><e|
    return s;
}

// ---------------------------------------------------------------------------
// Spec operations

LadderOperators build_ladder(TruncationConfig t) {
    const Matrix a = fock_annihilation(t);
    return {DenseOperator{spin_identity_fock(a), t},
            DenseOperator{spin_identity_fock(a.adjoint()), t},
            DenseOperator{spin_identity_fock(fock_number(t)), t}};
}

DenseOperator displacement(Complex beta, TruncationConfig t) {
    return {spin_identity_fock(fock_displacement(beta, t)), t};
}

Vector coherent_ket(double alpha, TruncationConfig t) {
    const int nf = t.fock_dim();
    const double gauss = std::exp(-0.5 * alpha * alpha);
    Vector c(nf);
    double mag = gauss;  // |c_n| = gauss * alpha^n / sqrt(n!)
    Complex phase = 1.0;
    for (int n = 0; n < nf; ++n) {
        if (n > 0) {
            mag *= alpha / std::sqrt(double(n));
            phase *= kI;
        }
        c[n] = phase * mag;
    }
    double leak = 0.0;
    for (int n = t.guard_n + 1; n < nf; ++n) leak += std::norm(c[n]);
    // Also count what the truncation itself dropped.
    const double missing = 1.0 - c.squaredNorm();
    if (leak + std::max(missing, 0.0) > 1e-10)
        throw TruncationInsufficient("coherent_ket: population beyond guard level exceeds 1e-10");
    return c;
}

Vector coherent_derivative_ket(double alpha, int order, TruncationConfig t) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("coherent_derivative_ket: order must be 1 or 2");
    coherent_ket(alpha, t);  // reuse the truncation check
    const int nf = t.fock_dim();
    const double gauss = std::exp(-0.5 * alpha * alpha);
    // d/dalpha  [gauss alpha^n i^n/sqrt(n!)] = gauss i^n [n alpha^{n-1} - alpha^{n+1}]/sqrt(n!)
    // d2/dalpha2 ...                        = gauss i^n [n(n-1) alpha^{n-2}
    //                                          - (2n+1) alpha^n + alpha^{n+2}]/sqrt(n!)
    Vector d(nf);
    double inv_sqrt_fact = 1.0;
    Complex phase = 1.0;
    for (int n = 0; n < nf; ++n) {
        if (n > 0) {
            inv_sqrt_fact /= std::sqrt(double(n));
            phase *= kI;
        }
        const double am1 = (n >= 1) ? std::pow(alpha, n - 1) : 0.0;
        const double am2 = (n >= 2) ? std::pow(alpha, n - 2) : 0.0;
        const double a0 = std::pow(alpha, n);
        double poly;
        if (order == 1)
            poly = n * am1 - std::pow(alpha, n + 1);
        else
            poly = double(n) * (n - 1.0) * am2 - (2.0 * n + 1.0) * a0 + std::pow(alpha, n + 2);
        d[n] = phase * gauss * inv_sqrt_fact * poly;
    }
    return d;
}

DenseOperator expm_unitary(const DenseOperator& h, double t) {
    const double defect = h.hermiticity_defect();
    if (defect > 1e-10)
        throw NotHermitian("expm_unitary: hermiticity defect " + std::to_string(defect));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h.mat + h.mat.adjoint()));
    const auto& w = es.eigenvalues();
    Vector phases(w.size());
    for (int i = 0; i < w.size(); ++i) phases[i] = std::exp(-kI * w[i] * t);
    return {es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint(), h.trunc};
}

double guard_max_abs(const Matrix& m, TruncationConfig t) {
    if (m.rows() != t.dim() || m.cols() != t.dim())
        throw DimensionMismatch("guard_max_abs: matrix does not match truncation");
    const int nf = t.fock_dim();
    const int ng = t.guard_n + 1;  // guard levels per spin block
    double mx = 0.0;
    for (int bi = 0; bi < 2; ++bi)
        for (int bj = 0; bj < 2; ++bj)
            mx = std::max(mx, m.block(bi * nf, bj * nf, ng, ng).cwiseAbs().maxCoeff());
    return mx;
}

Matrix expm_general(const Matrix& a) {
    // [13/13] Pade with scaling and squaring (Higham 2005).
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) squarings = int(std::ceil(std::log2(norm1 / theta13)));
    const Matrix as = a / std::pow(2.0, squarings);

    const auto n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix a2 = as * as;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;
    const Matrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                           b[3] * a2 + b[1] * id);
    const Matrix v =
        a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

}  // namespace ionsim
