// Truncated Fock (x) two-level-spin linear algebra: states, operators,
// ladder/displacement construction, coherent kets and matrix exponentials.
//
// Basis convention used everywhere in this library (spin-major):
//   index(e, n) = n,                n = 0..N   (excited block first)
//   index(g, n) = (N+1) + n
// so a full-space vector is [psi_e(0..N) | psi_g(0..N)] and a full-space
// operator is a 2x2 grid of (N+1)x(N+1) Fock blocks.  With this ordering
// sigma^+ D sits in the (e,g) block and P_e is the squared norm of a
// contiguous block.

#ifndef IONSIM_FOCK_HPP
#define IONSIM_FOCK_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ionsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Errors

struct TruncationInsufficient : std::runtime_error {
    explicit TruncationInsufficient(const std::string& what) : std::runtime_error(what) {}
};

struct NotHermitian : std::runtime_error {
    explicit NotHermitian(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct QuadratureNotConverged : std::runtime_error {
    explicit QuadratureNotConverged(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveNormSquared : std::runtime_error {
    explicit NonPositiveNormSquared(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Truncation

/// Fock-space truncation.  Levels above guard_n are kept only to absorb
/// boundary artifacts; physics assertions are restricted to n <= guard_n.
struct TruncationConfig {
    int cutoff_n;  // highest Fock level kept (N)
    int guard_n;   // highest level trusted for physics, guard_n < cutoff_n

    TruncationConfig(int cutoff, int guard) : cutoff_n(cutoff), guard_n(guard) {
        if (guard_n < 1 || guard_n >= cutoff_n)
            throw std::invalid_argument("TruncationConfig: need 1 <= guard_n < cutoff_n");
    }
    /// Default guard at half the cutoff.
    explicit TruncationConfig(int cutoff) : TruncationConfig(cutoff, cutoff / 2) {}

    int fock_dim() const { return cutoff_n + 1; }
    int dim() const { return 2 * (cutoff_n + 1); }  // full Fock (x) spin dimension

    bool operator==(const TruncationConfig& o) const {
        return cutoff_n == o.cutoff_n && guard_n == o.guard_n;
    }
};

// ---------------------------------------------------------------------------
// State

enum class Spin { e, g };  // e = |up> = (1,0),  g = |down> = (0,1)

/// Complex amplitude vector over the truncated Fock (x) spin basis.
struct FockSpinState {
    Vector amps;             // length 2*(cutoff_n+1), [e-block | g-block]
    TruncationConfig trunc;

    FockSpinState(Vector v, TruncationConfig t) : amps(std::move(v)), trunc(t) {
        if (amps.size() != t.dim())
            throw DimensionMismatch("FockSpinState: amplitude length does not match truncation");
    }

    /// Basis state |n> (x) |spin>.
    static FockSpinState basis(int n, Spin s, TruncationConfig t);
    /// Spin (x) Fock product state from a Fock-only coefficient vector.
    static FockSpinState from_fock(const Vector& fock, Spin s, TruncationConfig t);

    int fock_dim() const { return trunc.fock_dim(); }
    auto e_block() { return amps.segment(0, fock_dim()); }
    auto g_block() { return amps.segment(fock_dim(), fock_dim()); }
    auto e_block() const { return amps.segment(0, fock_dim()); }
    auto g_block() const { return amps.segment(fock_dim(), fock_dim()); }

    double norm() const { return amps.norm(); }
    /// Population above the guard level, summed over both spin blocks.
    double boundary_leakage() const;
    FockSpinState normalized() const;
};

inline Complex inner(const FockSpinState& a, const FockSpinState& b) {
    if (!(a.trunc == b.trunc)) throw DimensionMismatch("inner: truncation mismatch");
    return a.amps.dot(b.amps);  // Eigen dot conjugates the left argument
}

// ---------------------------------------------------------------------------
// Operator

/// Dense square operator on the full Fock (x) spin space.
struct DenseOperator {
    Matrix mat;
    TruncationConfig trunc;

    DenseOperator(Matrix m, TruncationConfig t) : mat(std::move(m)), trunc(t) {
        if (mat.rows() != t.dim() || mat.cols() != t.dim())
            throw DimensionMismatch("DenseOperator: matrix does not match truncation");
    }

    static DenseOperator identity(TruncationConfig t) {
        return {Matrix::Identity(t.dim(), t.dim()), t};
    }

    FockSpinState apply(const FockSpinState& s) const {
        if (!(s.trunc == trunc)) throw DimensionMismatch("DenseOperator::apply: truncation mismatch");
        return {mat * s.amps, trunc};
    }

    DenseOperator adjoint() const { return {mat.adjoint(), trunc}; }

    /// max |A - A^dagger| entrywise
    double hermiticity_defect() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }
    /// max |A^dagger A - I| entrywise
    double unitarity_defect() const {
        return (mat.adjoint() * mat - Matrix::Identity(mat.rows(), mat.cols())).cwiseAbs().maxCoeff();
    }
};

inline DenseOperator operator+(const DenseOperator& a, const DenseOperator& b) {
    return {a.mat + b.mat, a.trunc};
}
inline DenseOperator operator-(const DenseOperator& a, const DenseOperator& b) {
    return {a.mat - b.mat, a.trunc};
}
inline DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
    return {a.mat * b.mat, a.trunc};
}
inline DenseOperator operator*(Complex c, const DenseOperator& a) { return {c * a.mat, a.trunc}; }
inline DenseOperator operator*(double c, const DenseOperator& a) { return {c * a.mat, a.trunc}; }

// ---------------------------------------------------------------------------
// Fock-block builders (matrices of size fock_dim x fock_dim)

Matrix fock_annihilation(TruncationConfig t);   // <n-1| a |n> = sqrt(n)
Matrix fock_number(TruncationConfig t);
/// D(beta) = exp(beta a^dag - beta* a), computed by exponentiating the
/// truncated generator (exactly unitary on the truncated space).
Matrix fock_displacement(Complex beta, TruncationConfig t);
/// Same matrix from the closed-form displaced-number matrix elements
/// (associated Laguerre polynomials).  Kept as an independent construction
/// for self-tests; the exponential path is the production default.
Matrix fock_displacement_laguerre(Complex beta, TruncationConfig t);

// Spin embeddings: full = spin_2x2 (x) fock_block.
Matrix spin_fock(const Eigen::Matrix2cd& s, const Matrix& fock_block);
Matrix spin_identity_fock(const Matrix& fock_block);          // I2 (x) A
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd pauli_plus();   // |e><g|
Eigen::Matrix2cd pauli_minus();  // |g><e|

// ---------------------------------------------------------------------------
// Spec operations (full-space)

struct LadderOperators {
    DenseOperator a;
    DenseOperator a_dag;
    DenseOperator num;
};

/// Ladder and number operators tensored with the spin identity.
LadderOperators build_ladder(TruncationConfig t);

/// Glauber displacement D(beta) (x) spin identity.
DenseOperator displacement(Complex beta, TruncationConfig t);

/// Fock coefficients of the coherent state |i alpha>, alpha real:
///   c_n = e^{-alpha^2/2} (i alpha)^n / sqrt(n!)
/// Throws TruncationInsufficient if population above guard_n exceeds 1e-10.
Vector coherent_ket(double alpha, TruncationConfig t);

/// Termwise alpha-derivative (order 1 or 2) of the coherent coefficients.
Vector coherent_derivative_ket(double alpha, int order, TruncationConfig t);

/// e^{-i H t} for hermitian H via eigendecomposition.
/// Throws NotHermitian when the hermiticity defect exceeds 1e-10.
DenseOperator expm_unitary(const DenseOperator& h, double t);

/// max |entry| over rows and columns whose Fock index lies inside the guard
/// subspace (both spin blocks).  Truncation artifacts live outside it.
double guard_max_abs(const Matrix& m, TruncationConfig t);

/// Scaling-and-squaring Pade expm for a general (possibly defective) matrix.
Matrix expm_general(const Matrix& a);

}  // namespace ionsim

#endif  // IONSIM_FOCK_HPP
