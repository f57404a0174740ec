#pragma once
// Independent reference computations shared by the test programs. Nothing
// here calls into the library.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

using real = long double;

// Exact fractions for series coefficients.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Rational operator-(Rational a, Rational b) { return a + Rational(-b.num, b.den); }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
    friend Rational operator-(Rational a) { return {-a.num, a.den}; }
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
};

// Closed-form lambda = 0 solution: f = t / sinh t, rho = coth t - 1/t.
struct Ps {
    real f, fp, fpp, rho, rhop, rhopp;
};

inline Ps ps(real t) {
    const real s = std::sinh(t), c = std::cosh(t);
    Ps p;
    p.f = t / s;
    p.fp = (s - t * c) / (s * s);
    p.fpp = (-t * s * s - 2 * c * (s - t * c)) / (s * s * s);
    p.rho = c / s - 1 / t;
    p.rhop = -1 / (s * s) + 1 / (t * t);
    p.rhopp = 2 * c / (s * s * s) - 2 / (t * t * t);
    return p;
}

// First positive root of tan t = t by bisection on sin t - t cos t over (pi, 3pi/2).
inline double tan_root() {
    real lo = 3.1416L, hi = 4.7123L;
    auto g = [](real t) { return std::sin(t) - t * std::cos(t); };
    for (int i = 0; i < 200; ++i) {
        const real mid = (lo + hi) / 2;
        ((g(mid) > 0) == (g(lo) > 0) ? lo : hi) = mid;
    }
    return static_cast<double>((lo + hi) / 2);
}

// Taylor coefficients of the regular solution about t = 0 from term-by-term
// matching of t^2 f'' = f (f^2 - 1) + t^2 rho^2 f and
// t^2 rho'' + 2 t rho' = 2 f^2 rho + lambda t^2 (rho^2 - 1) rho.
struct Taylor {
    std::vector<real> a;  // f
    std::vector<real> b;  // rho

    real f(real t) const { return value(a, t); }
    real fp(real t) const { return slope(a, t); }
    real rho(real t) const { return value(b, t); }
    real rhop(real t) const { return slope(b, t); }

    static real value(const std::vector<real>& c, real t) {
        real sum = 0;
        for (std::size_t n = c.size(); n-- > 0;) sum = sum * t + c[n];
        return sum;
    }
    static real slope(const std::vector<real>& c, real t) {
        real sum = 0;
        for (std::size_t n = c.size(); n-- > 1;) sum = sum * t + static_cast<real>(n) * c[n];
        return sum;
    }
};

inline std::vector<real> mul(const std::vector<real>& x, const std::vector<real>& y, std::size_t n) {
    std::vector<real> z(n, 0);
    for (std::size_t i = 0; i < n && i < x.size(); ++i)
        for (std::size_t j = 0; i + j < n && j < y.size(); ++j) z[i + j] += x[i] * y[j];
    return z;
}

inline Taylor taylor(real alpha, real beta, real lambda, std::size_t order) {
    const std::size_t n = order + 1;
    Taylor s;
    s.a.assign(n, 0);
    s.b.assign(n, 0);
    s.a[0] = 1;
    if (n > 2) s.a[2] = -alpha;
    if (n > 1) s.b[1] = beta;
    for (std::size_t k = 3; k < n; ++k) {
        // f-equation at t^k with a_k = 0: remaining right-hand side R, then (k(k-1) - 2) a_k = R.
        if (k % 2 == 0) {
            const auto f2 = mul(s.a, s.a, n);
            const auto f3 = mul(f2, s.a, n);
            const auto r2 = mul(s.b, s.b, n);
            const auto r2f = mul(r2, s.a, n);
            const real rhs = f3[k] - s.a[k] + r2f[k - 2];
            s.a[k] = rhs / (static_cast<real>(k * (k - 1)) - 2);
        } else {
            const auto f2 = mul(s.a, s.a, n);
            const auto f2r = mul(f2, s.b, n);
            const auto r3 = mul(mul(s.b, s.b, n), s.b, n);
            const real rhs = 2 * f2r[k] + lambda * (r3[k - 2] - s.b[k - 2]);
            s.b[k] = rhs / (static_cast<real>(k * (k + 1)) - 2);
        }
    }
    return s;
}

// Classical RK4 on (f, f', rho, rho') with fixed step.
struct Rk4Event {
    int kind = -1;  // 0: f' rises through 0 with 0 < f < 1, 1: f falls through 0, -1: none
    double t = 0.0;
};

inline Rk4Event rk4_first_f_event(std::array<real, 4> y, real t, real lambda, real h, real t_max) {
    auto rhs = [lambda](real t, const std::array<real, 4>& y) {
        const real f = y[0], r = y[2];
        return std::array<real, 4>{y[1], f * (f * f - 1) / (t * t) + r * r * f, y[3],
                                   -2 / t * y[3] + 2 * f * f * r / (t * t) + lambda * (r * r - 1) * r};
    };
    while (t < t_max) {
        auto k1 = rhs(t, y);
        std::array<real, 4> z;
        for (int i = 0; i < 4; ++i) z[i] = y[i] + h / 2 * k1[i];
        auto k2 = rhs(t + h / 2, z);
        for (int i = 0; i < 4; ++i) z[i] = y[i] + h / 2 * k2[i];
        auto k3 = rhs(t + h / 2, z);
        for (int i = 0; i < 4; ++i) z[i] = y[i] + h * k3[i];
        auto k4 = rhs(t + h, z);
        std::array<real, 4> yn;
        for (int i = 0; i < 4; ++i) yn[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (y[0] > 0 && yn[0] <= 0) return {1, static_cast<double>(t + h * y[0] / (y[0] - yn[0]))};
        if (y[1] < 0 && yn[1] >= 0 && yn[0] > 0 && yn[0] < 1)
            return {0, static_cast<double>(t + h * -y[1] / (yn[1] - y[1]))};
        y = yn;
        t += h;
    }
    return {};
}

}  // namespace oracle
