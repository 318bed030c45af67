#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ltmpc {

/// Forward-mode dual number with a fixed-capacity derivative vector.
///
/// Carries a value and up to kMaxDerivs partial derivatives. All duals
/// taking part in one expression must be seeded with the same derivative
/// count; mixing with plain doubles promotes them to constants.
class Dual {
public:
    static constexpr int kMaxDerivs = 12;

    double v = 0.0;
    int n = 0;
    std::array<double, kMaxDerivs> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: implicit by design
    Dual(double value, int nderiv, int seed_index) : v(value), n(nderiv) {
        d[static_cast<std::size_t>(seed_index)] = 1.0;
    }

    static Dual constant(double value, int nderiv) {
        Dual out(value);
        out.n = nderiv;
        return out;
    }

    Dual& operator+=(const Dual& o) {
        if (o.n > n) n = o.n;
        v += o.v;
        for (int i = 0; i < o.n; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        if (o.n > n) n = o.n;
        v -= o.v;
        for (int i = 0; i < o.n; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        const int m = o.n > n ? o.n : n;
        for (int i = 0; i < m; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        n = m;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        const int m = o.n > n ? o.n : n;
        const double inv = 1.0 / o.v;
        const double q = v * inv;
        for (int i = 0; i < m; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
        v = q;
        n = m;
        return *this;
    }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator-(const Dual& a) {
    Dual out;
    out.v = -a.v;
    out.n = a.n;
    for (int i = 0; i < a.n; ++i) out.d[i] = -a.d[i];
    return out;
}
inline Dual operator+(const Dual& a) { return a; }

inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }

namespace detail {
// chain rule helper: out = f(a.v) with derivative factor df
inline Dual unary(const Dual& a, double f, double df) {
    Dual out;
    out.v = f;
    out.n = a.n;
    for (int i = 0; i < a.n; ++i) out.d[i] = df * a.d[i];
    return out;
}
}  // namespace detail

inline Dual sin(const Dual& a) { return detail::unary(a, std::sin(a.v), std::cos(a.v)); }
inline Dual cos(const Dual& a) { return detail::unary(a, std::cos(a.v), -std::sin(a.v)); }
inline Dual tan(const Dual& a) {
    const double t = std::tan(a.v);
    return detail::unary(a, t, 1.0 + t * t);
}
inline Dual atan(const Dual& a) { return detail::unary(a, std::atan(a.v), 1.0 / (1.0 + a.v * a.v)); }
inline Dual sqrt(const Dual& a) {
    const double r = std::sqrt(a.v);
    return detail::unary(a, r, 0.5 / r);
}
inline Dual exp(const Dual& a) {
    const double e = std::exp(a.v);
    return detail::unary(a, e, e);
}
inline Dual abs(const Dual& a) { return a.v < 0.0 ? -a : a; }

inline Dual atan2(const Dual& y, const Dual& x) {
    const double den = x.v * x.v + y.v * y.v;
    Dual out;
    out.v = std::atan2(y.v, x.v);
    out.n = y.n > x.n ? y.n : x.n;
    for (int i = 0; i < out.n; ++i) {
        const double dy = i < y.n ? y.d[i] : 0.0;
        const double dx = i < x.n ? x.d[i] : 0.0;
        out.d[i] = (x.v * dy - y.v * dx) / den;
    }
    return out;
}

/// max(0, a); the kink at 0 takes the zero branch.
inline Dual pos_part(const Dual& a) { return a.v > 0.0 ? a : Dual::constant(0.0, a.n); }
inline double pos_part(double a) { return a > 0.0 ? a : 0.0; }

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

}  // namespace ltmpc
