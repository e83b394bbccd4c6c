#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace twt {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& v) {
    return {s * v[0], s * v[1], s * v[2]};
}
inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double sum(const Vec3& v) { return v[0] + v[1] + v[2]; }

/// Dense 3x3 matrix, row-major, value semantics.
struct Mat3 {
    std::array<double, 9> a{};

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }

    Mat3 transposed() const {
        Mat3 t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
        return t;
    }

    Vec3 row(int i) const { return {(*this)(i, 0), (*this)(i, 1), (*this)(i, 2)}; }
};

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {dot(m.row(0), v), dot(m.row(1), v), dot(m.row(2), v)};
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline Mat3 operator*(double s, const Mat3& m) {
    Mat3 c = m;
    for (double& x : c.a) x *= s;
    return c;
}

inline Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (std::size_t k = 0; k < 9; ++k) c.a[k] = a.a[k] - b.a[k];
    return c;
}

inline double det(const Mat3& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Closed-form (adjugate) inverse. Returns all-NaN when the determinant
/// vanishes; callers guard via cond1().
inline Mat3 inverse(const Mat3& m) {
    const double d = det(m);
    Mat3 inv;
    if (d == 0.0) {
        inv.a.fill(std::numeric_limits<double>::quiet_NaN());
        return inv;
    }
    const double s = 1.0 / d;
    inv(0, 0) = s * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
    inv(0, 1) = s * (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2));
    inv(0, 2) = s * (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1));
    inv(1, 0) = s * (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2));
    inv(1, 1) = s * (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0));
    inv(1, 2) = s * (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2));
    inv(2, 0) = s * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    inv(2, 1) = s * (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1));
    inv(2, 2) = s * (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    return inv;
}

inline double norm1(const Mat3& m) {
    double best = 0.0;
    for (int j = 0; j < 3; ++j) {
        double c = std::abs(m(0, j)) + std::abs(m(1, j)) + std::abs(m(2, j));
        best = std::max(best, c);
    }
    return best;
}

/// 1-norm condition number via the explicit inverse.
inline double cond1(const Mat3& m) {
    const double d = det(m);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    return norm1(m) * norm1(inverse(m));
}

/// Dense NxN matrix with partial-pivot LU solve, for the decoupling systems.
template <std::size_t N>
struct SquareMat {
    std::array<double, N * N> a{};

    double& operator()(int i, int j) { return a[N * static_cast<std::size_t>(i) + static_cast<std::size_t>(j)]; }
    double operator()(int i, int j) const { return a[N * static_cast<std::size_t>(i) + static_cast<std::size_t>(j)]; }

    static SquareMat identity() {
        SquareMat m;
        for (int i = 0; i < static_cast<int>(N); ++i) m(i, i) = 1.0;
        return m;
    }
};

template <std::size_t N>
inline double norm1(const SquareMat<N>& m) {
    const int n = static_cast<int>(N);
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += std::abs(m(i, j));
        best = std::max(best, c);
    }
    return best;
}

/// In-place LU factorization with partial pivoting. Returns false when a
/// pivot vanishes (matrix singular to working precision).
template <std::size_t N>
inline bool lu_factor(SquareMat<N>& m, std::array<int, N>& perm) {
    const int n = static_cast<int>(N);
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(m(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(m(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best)) return false;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
        }
        for (int i = k + 1; i < n; ++i) {
            m(i, k) /= m(k, k);
            const double f = m(i, k);
            for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return true;
}

template <std::size_t N>
inline std::array<double, N> lu_solve(const SquareMat<N>& lu, const std::array<int, N>& perm,
                                      const std::array<double, N>& b) {
    const int n = static_cast<int>(N);
    std::array<double, N> x{};
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= lu(i, j) * x[static_cast<std::size_t>(j)];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[static_cast<std::size_t>(i)] -= lu(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] /= lu(i, i);
    }
    return x;
}

template <std::size_t N>
inline bool invert(const SquareMat<N>& m, SquareMat<N>& out) {
    SquareMat<N> lu = m;
    std::array<int, N> perm{};
    if (!lu_factor(lu, perm)) return false;
    const int n = static_cast<int>(N);
    for (int j = 0; j < n; ++j) {
        std::array<double, N> e{};
        e[static_cast<std::size_t>(j)] = 1.0;
        const auto col = lu_solve(lu, perm, e);
        for (int i = 0; i < n; ++i) out(i, j) = col[static_cast<std::size_t>(i)];
    }
    return true;
}

/// 1-norm condition number via the explicit inverse; infinity when singular.
template <std::size_t N>
inline double cond1(const SquareMat<N>& m) {
    SquareMat<N> inv;
    if (!invert(m, inv)) return std::numeric_limits<double>::infinity();
    return norm1(m) * norm1(inv);
}

}  // namespace twt
