#include "sqss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sqss {

Mat2 Mat2::dagger() const {
    return {{std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])}};
}

bool Mat2::is_finite() const {
    for (const cplx& z : e) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.at(i, j) = a.at(i, 0) * b.at(0, j) + a.at(i, 1) * b.at(1, j);
    return r;
}

Mat2 operator*(cplx s, const Mat2& a) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.e[i] = s * a.e[i];
    return r;
}

Superop Superop::identity() {
    Superop s;
    for (int i = 0; i < 4; ++i) s.at(i, i) = 1.0;
    return s;
}

Superop Superop::diagonal(cplx d0, cplx d1, cplx d2, cplx d3) {
    Superop s;
    s.at(0, 0) = d0;
    s.at(1, 1) = d1;
    s.at(2, 2) = d2;
    s.at(3, 3) = d3;
    return s;
}

Superop operator*(const Superop& a, const Superop& b) {
    Superop r;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += a.at(i, k) * b.at(k, j);
            r.at(i, j) = acc;
        }
    }
    return r;
}

Superop operator+(const Superop& a, const Superop& b) {
    Superop r;
    for (int i = 0; i < 16; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

VecState operator*(const Superop& s, const VecState& x) {
    VecState y;
    for (int i = 0; i < 4; ++i) {
        cplx acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += s.at(i, k) * x[k];
        y[i] = acc;
    }
    return y;
}

Superop kron(const Mat2& a, const Mat2& b) {
    Superop s;
    for (int ra = 0; ra < 2; ++ra)
        for (int rb = 0; rb < 2; ++rb)
            for (int ca = 0; ca < 2; ++ca)
                for (int cb = 0; cb < 2; ++cb)
                    s.at(2 * ra + rb, 2 * ca + cb) = a.at(ra, ca) * b.at(rb, cb);
    return s;
}

double max_abs_diff(const Mat2& a, const Mat2& b) {
    double m = 0.0;
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a.e[i] - b.e[i]));
    return m;
}

double max_abs_diff(const Superop& a, const Superop& b) {
    double m = 0.0;
    for (int i = 0; i < 16; ++i) m = std::max(m, std::abs(a.e[i] - b.e[i]));
    return m;
}

double max_abs_diff(const VecState& a, const VecState& b) {
    double m = 0.0;
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double min_eigenvalue(const Mat2& m) {
    // Hermitian part h = (m + m^dagger)/2; eigenvalues are
    // mean(diag) -/+ sqrt(((h00-h11)/2)^2 + |h01|^2).
    const double h00 = m.e[0].real();
    const double h11 = m.e[3].real();
    const cplx h01 = 0.5 * (m.e[1] + std::conj(m.e[2]));
    const double mid = 0.5 * (h00 + h11);
    const double radius = std::hypot(0.5 * (h00 - h11), std::abs(h01));
    return mid - radius;
}

DensityMatrix::DensityMatrix(const Mat2& m) : m_(m) {
    if (!m.is_finite()) {
        throw std::invalid_argument("density matrix: entries must be finite");
    }
    const cplx tr = m.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw std::invalid_argument("density matrix: trace must equal 1 within 1e-12");
    }
    if (max_abs_diff(m, m.dagger()) > kHermitianTol) {
        throw std::invalid_argument("density matrix: must be Hermitian within 1e-12");
    }
    if (min_eigenvalue(m) < kEigenvalueFloor) {
        throw std::invalid_argument("density matrix: eigenvalues must be >= -1e-12");
    }
}

DensityMatrix DensityMatrix::plus_state() {
    return DensityMatrix(Mat2::from_rows(0.5, 0.5, 0.5, 0.5));
}

DensityMatrix DensityMatrix::minus_state() {
    return DensityMatrix(Mat2::from_rows(0.5, -0.5, -0.5, 0.5));
}

DensityMatrix DensityMatrix::zero_state() {
    return DensityMatrix(Mat2::from_rows(1.0, 0.0, 0.0, 0.0));
}

DensityMatrix DensityMatrix::maximally_mixed() {
    return DensityMatrix(Mat2::from_rows(0.5, 0.0, 0.0, 0.5));
}

VecState vectorize(const Mat2& m) {
    return {{m.e[0], m.e[1], m.e[2], m.e[3]}};
}

Mat2 devectorize(const VecState& v) {
    return {{v[0], v[1], v[2], v[3]}};
}

cplx hs_inner(const Mat2& a, const Mat2& b) {
    cplx acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += std::conj(a.e[i]) * b.e[i];
    return acc;
}

double x_plus_prob(const DensityMatrix& rho) {
    const auto& e = rho.mat().e;
    // Hermiticity makes the sum real up to validation tolerance.
    const double p = 0.5 * (e[0] + e[1] + e[2] + e[3]).real();
    return std::clamp(p, 0.0, 1.0);
}

double x_minus_prob(const DensityMatrix& rho) {
    const auto& e = rho.mat().e;
    const double p = 0.5 * (e[0] - e[1] - e[2] + e[3]).real();
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace sqss
