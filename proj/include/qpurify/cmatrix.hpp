#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

// Fixed-dimension complex vectors and matrices (dim 2 and 4) used throughout.
// Matrices are row-major. The 4-dimensional basis order is
// |uu>, |ud>, |du>, |dd> with the X qubit first: index = 2*x + s,
// x,s in {0 = up, 1 = down}.

namespace qpurify {

using cplx = std::complex<double>;

struct CVec2 {
    std::array<cplx, 2> e{};

    cplx& operator[](std::size_t i) { return e[i]; }
    const cplx& operator[](std::size_t i) const { return e[i]; }
};

struct CVec4 {
    std::array<cplx, 4> e{};

    cplx& operator[](std::size_t i) { return e[i]; }
    const cplx& operator[](std::size_t i) const { return e[i]; }
};

struct CMat2 {
    std::array<cplx, 4> e{};

    cplx& operator()(std::size_t r, std::size_t c) { return e[2 * r + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return e[2 * r + c]; }

    static CMat2 identity() { return CMat2{{cplx(1), cplx(0), cplx(0), cplx(1)}}; }
    static CMat2 zero() { return CMat2{}; }
};

struct CMat4 {
    std::array<cplx, 16> e{};

    cplx& operator()(std::size_t r, std::size_t c) { return e[4 * r + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return e[4 * r + c]; }

    static CMat4 identity() {
        CMat4 m;
        for (std::size_t i = 0; i < 4; ++i) m(i, i) = cplx(1);
        return m;
    }
    static CMat4 zero() { return CMat4{}; }
};

// ---- CVec2 / CMat2 arithmetic ----

inline CVec2 operator+(const CVec2& a, const CVec2& b) { return {{a[0] + b[0], a[1] + b[1]}}; }
inline CVec2 operator-(const CVec2& a, const CVec2& b) { return {{a[0] - b[0], a[1] - b[1]}}; }
inline CVec2 operator*(cplx s, const CVec2& a) { return {{s * a[0], s * a[1]}}; }
inline CVec2& operator+=(CVec2& a, const CVec2& b) { a[0] += b[0]; a[1] += b[1]; return a; }

inline CMat2 operator+(const CMat2& a, const CMat2& b) {
    CMat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}
inline CMat2 operator-(const CMat2& a, const CMat2& b) {
    CMat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}
inline CMat2 operator*(cplx s, const CMat2& a) {
    CMat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.e[i] = s * a.e[i];
    return r;
}
inline CMat2& operator+=(CMat2& a, const CMat2& b) {
    for (std::size_t i = 0; i < 4; ++i) a.e[i] += b.e[i];
    return a;
}

inline CMat2 operator*(const CMat2& a, const CMat2& b) {
    CMat2 r;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

inline CVec2 operator*(const CMat2& m, const CVec2& v) {
    return {{m(0, 0) * v[0] + m(0, 1) * v[1], m(1, 0) * v[0] + m(1, 1) * v[1]}};
}

inline CMat2 adjoint(const CMat2& m) {
    CMat2 r;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            r(i, j) = std::conj(m(j, i));
    return r;
}

inline cplx trace(const CMat2& m) { return m(0, 0) + m(1, 1); }
inline cplx det(const CMat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

// <a|b>
inline cplx inner(const CVec2& a, const CVec2& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}
inline double norm2(const CVec2& a) { return std::norm(a[0]) + std::norm(a[1]); }

// |a><b|
inline CMat2 outer(const CVec2& a, const CVec2& b) {
    CMat2 r;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            r(i, j) = a[i] * std::conj(b[j]);
    return r;
}

// <a|m|b>
inline cplx expect(const CVec2& a, const CMat2& m, const CVec2& b) {
    return inner(a, m * b);
}

// k rho k^dagger
inline CMat2 sandwich(const CMat2& k, const CMat2& rho) {
    return k * rho * adjoint(k);
}

inline CMat2 inverse(const CMat2& m) {
    cplx d = det(m);
    if (std::abs(d) == 0.0) throw std::runtime_error("singular 2x2 matrix");
    cplx inv_d = cplx(1) / d;
    return CMat2{{inv_d * m(1, 1), -inv_d * m(0, 1), -inv_d * m(1, 0), inv_d * m(0, 0)}};
}

inline CMat2 pow_int(const CMat2& m, long n) {
    CMat2 result = CMat2::identity();
    CMat2 base = m;
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

inline double max_abs(const CMat2& m) {
    double r = 0;
    for (const auto& x : m.e) r = std::max(r, std::abs(x));
    return r;
}
inline double max_abs_diff(const CMat2& a, const CMat2& b) { return max_abs(a - b); }
inline double max_abs(const CVec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

inline bool all_finite(const CMat2& m) {
    for (const auto& x : m.e)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

// ---- CVec4 / CMat4 arithmetic ----

inline CMat4 operator+(const CMat4& a, const CMat4& b) {
    CMat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}
inline CMat4 operator-(const CMat4& a, const CMat4& b) {
    CMat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}
inline CMat4 operator*(cplx s, const CMat4& a) {
    CMat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e[i] = s * a.e[i];
    return r;
}
inline CMat4& operator+=(CMat4& a, const CMat4& b) {
    for (std::size_t i = 0; i < 16; ++i) a.e[i] += b.e[i];
    return a;
}

inline CMat4 operator*(const CMat4& a, const CMat4& b) {
    CMat4 r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < 4; ++k) {
            cplx aik = a(i, k);
            if (aik == cplx(0)) continue;
            for (std::size_t j = 0; j < 4; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

inline CMat4 adjoint(const CMat4& m) {
    CMat4 r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            r(i, j) = std::conj(m(j, i));
    return r;
}

inline cplx trace(const CMat4& m) { return m(0, 0) + m(1, 1) + m(2, 2) + m(3, 3); }

inline cplx inner(const CVec4& a, const CVec4& b) {
    cplx s = 0;
    for (std::size_t i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline CMat4 outer(const CVec4& a, const CVec4& b) {
    CMat4 r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            r(i, j) = a[i] * std::conj(b[j]);
    return r;
}

inline CVec4 operator*(const CMat4& m, const CVec4& v) {
    CVec4 r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            r[i] += m(i, j) * v[j];
    return r;
}

inline CMat4 sandwich(const CMat4& k, const CMat4& rho) {
    return k * rho * adjoint(k);
}

inline double max_abs(const CMat4& m) {
    double r = 0;
    for (const auto& x : m.e) r = std::max(r, std::abs(x));
    return r;
}
inline double max_abs_diff(const CMat4& a, const CMat4& b) { return max_abs(a - b); }

inline bool all_finite(const CMat4& m) {
    for (const auto& x : m.e)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

// Eigenvalues of a Hermitian 2x2 matrix, ascending.
inline std::array<double, 2> hermitian_eigs(const CMat2& m) {
    double t = (m(0, 0) + m(1, 1)).real();
    double d = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    double disc = std::sqrt(std::max(0.0, t * t / 4.0 - d));
    return {t / 2.0 - disc, t / 2.0 + disc};
}

// Eigenvalues of a Hermitian 4x4 matrix via cyclic Jacobi sweeps, ascending.
std::array<double, 4> hermitian_eigs(const CMat4& m);

// Trace distance (1/2)||a - b||_1 between Hermitian 2x2 matrices.
inline double trace_distance(const CMat2& a, const CMat2& b) {
    auto ev = hermitian_eigs(a - b);
    return 0.5 * (std::abs(ev[0]) + std::abs(ev[1]));
}

}  // namespace qpurify
