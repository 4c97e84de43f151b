#pragma once

#include <cmath>

namespace pdm {

/// Second-order forward-mode jet: value with first and second derivative
/// along one real variable.
struct Jet {
    double v = 0.0;
    double d = 0.0;
    double dd = 0.0;

    constexpr Jet() = default;
    constexpr Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
    constexpr Jet(double value, double d1, double d2) : v(value), d(d1), dd(d2) {}

    static constexpr Jet variable(double x) { return {x, 1.0, 0.0}; }

    Jet& operator+=(const Jet& o) { v += o.v; d += o.d; dd += o.dd; return *this; }
    Jet& operator-=(const Jet& o) { v -= o.v; d -= o.d; dd -= o.dd; return *this; }
    Jet& operator*=(const Jet& o) {
        dd = dd * o.v + 2.0 * d * o.d + v * o.dd;
        d = d * o.v + v * o.d;
        v *= o.v;
        return *this;
    }
    Jet& operator/=(const Jet& o) {
        // q = a / b:  q' = (a' - q b') / b,  q'' = (a'' - 2 q' b' - q b'') / b
        const double q = v / o.v;
        const double q1 = (d - q * o.d) / o.v;
        const double q2 = (dd - 2.0 * q1 * o.d - q * o.dd) / o.v;
        v = q; d = q1; dd = q2;
        return *this;
    }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d, -a.dd}; }

// Chain rule for y = f(x): y' = f'(x) x', y'' = f''(x) x'^2 + f'(x) x''.
inline Jet chain(const Jet& x, double f, double f1, double f2) {
    return {f, f1 * x.d, f2 * x.d * x.d + f1 * x.dd};
}

inline Jet exp(const Jet& x) {
    const double e = std::exp(x.v);
    return chain(x, e, e, e);
}

inline Jet pow(const Jet& x, double p) {
    const double f = std::pow(x.v, p);
    return chain(x, f, p * f / x.v, p * (p - 1.0) * f / (x.v * x.v));
}

inline Jet sqrt(const Jet& x) { return pow(x, 0.5); }

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace pdm
