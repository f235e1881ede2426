#pragma once

#include <array>
#include <complex>
#include <span>

namespace sqss {

using cplx = std::complex<double>;

// Validation tolerances for density matrices.
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-12;

/// 2x2 complex matrix, row-major. General purpose: gates, Kraus operators
/// and density matrix candidates all live here.
struct Mat2 {
    std::array<cplx, 4> e{};

    cplx& at(int r, int c) { return e[2 * r + c]; }
    const cplx& at(int r, int c) const { return e[2 * r + c]; }

    static Mat2 zero() { return {}; }
    static Mat2 identity() { return {{cplx(1), cplx(0), cplx(0), cplx(1)}}; }
    static Mat2 from_rows(cplx m00, cplx m01, cplx m10, cplx m11) {
        return {{m00, m01, m10, m11}};
    }

    Mat2 dagger() const;
    cplx trace() const { return e[0] + e[3]; }
    bool is_finite() const;
};

Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator*(cplx s, const Mat2& a);

/// Vectorized density matrix, ordering (rho00, rho01, rho10, rho11).
struct VecState {
    std::array<cplx, 4> v{};

    cplx& operator[](int i) { return v[i]; }
    const cplx& operator[](int i) const { return v[i]; }
};

/// 4x4 superoperator acting on VecState, row-major.
struct Superop {
    std::array<cplx, 16> e{};

    cplx& at(int r, int c) { return e[4 * r + c]; }
    const cplx& at(int r, int c) const { return e[4 * r + c]; }

    static Superop identity();
    static Superop diagonal(cplx d0, cplx d1, cplx d2, cplx d3);
};

Superop operator*(const Superop& a, const Superop& b);
Superop operator+(const Superop& a, const Superop& b);
VecState operator*(const Superop& s, const VecState& x);

/// Kronecker product so that kron(a, conj(b)) * vectorize(rho) equals
/// vectorize(a * rho * b.dagger()) with the row-major stacking above.
Superop kron(const Mat2& a, const Mat2& b);

double max_abs_diff(const Mat2& a, const Mat2& b);
double max_abs_diff(const Superop& a, const Superop& b);
double max_abs_diff(const VecState& a, const VecState& b);

/// Smallest eigenvalue of the Hermitian part of m (closed-form 2x2 quadratic).
double min_eigenvalue(const Mat2& m);

/// Unit-trace Hermitian PSD 2x2 matrix: the circulated qubit state.
/// Construction rejects candidates that violate any invariant
/// (trace within 1e-12 of one, Hermitian within 1e-12, eigenvalues >= -1e-12)
/// with std::invalid_argument.
class DensityMatrix {
  public:
    explicit DensityMatrix(const Mat2& m);

    const Mat2& mat() const { return m_; }

    static DensityMatrix plus_state();       // |+><+|
    static DensityMatrix minus_state();      // |-><-|
    static DensityMatrix zero_state();       // |0><0|
    static DensityMatrix maximally_mixed();  // I/2

  private:
    Mat2 m_;
};

/// Row-major stacking of a 2x2 matrix into a 4-vector. Exact (a reshape).
VecState vectorize(const Mat2& m);

/// Inverse of vectorize; round-trips bit-for-bit.
Mat2 devectorize(const VecState& v);

/// Hilbert-Schmidt inner product tr(a^dagger b).
cplx hs_inner(const Mat2& a, const Mat2& b);

/// <+|rho|+> = (rho00+rho01+rho10+rho11)/2, clamped to [0, 1].
double x_plus_prob(const DensityMatrix& rho);

/// <-|rho|->; complements x_plus_prob to one.
double x_minus_prob(const DensityMatrix& rho);

}  // namespace sqss
