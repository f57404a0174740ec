#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "monopole/errors.hpp"

namespace monopole::rk {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Continuous extension of one accepted Dormand–Prince step (4th order).
template <std::size_t N>
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<Vec<N>, 5> coeff{};

    double t1() const { return t0 + h; }

    Vec<N> operator()(double t) const {
        const double theta = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        Vec<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = coeff[0][i] +
                   theta * (coeff[1][i] + theta1 * (coeff[2][i] + theta * (coeff[3][i] + theta1 * coeff[4][i])));
        return y;
    }

    Vec<N> start() const { return coeff[0]; }
    Vec<N> end() const {
        Vec<N> y;
        for (std::size_t i = 0; i < N; ++i) y[i] = coeff[0][i] + coeff[1][i];
        return y;
    }
};

struct StepControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double initial_step = 0.0;  ///< 0 selects a step from the starting radius
};

enum class StepAction { Continue, Stop };

enum class RunEnd { ReachedEnd, Stopped, NonFinite };

namespace detail {

// Dormand & Prince (1980) RK5(4)7M, with Shampine's dense output.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
double sup_norm(const Vec<N>& y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace detail

/// Adaptive Dormand–Prince 5(4) integration of y' = field(t, y) from t_start
/// to t_end. A step is accepted when the embedded error estimate satisfies
/// |err_i| <= abs_tol + rel_tol * |y_i| for every component. Each accepted step is
/// handed to on_step as a DenseSegment; returning StepAction::Stop ends the run.
///
/// Throws ErrorKind::Stiffness when the step size underflows on a finite state.
template <std::size_t N, class Field, class OnStep>
RunEnd integrate_adaptive(const Field& field, double t_start, Vec<N> y, double t_end,
                          const StepControls& ctl, OnStep&& on_step) {
    using namespace detail;
    double t = t_start;
    double h = ctl.initial_step > 0.0 ? ctl.initial_step : std::max(0.05 * std::abs(t_start), 1e-6);
    h = std::min({h, ctl.max_step, t_end - t});
    Vec<N> k1 = field(t, y);
    Vec<N> k2, k3, k4, k5, k6, k7, yt, y_new, err;
    bool last_failure_nonfinite = false;

    while (t < t_end) {
        const double h_min = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < h_min) {
            if (last_failure_nonfinite) return RunEnd::NonFinite;
            throw Error(ErrorKind::Stiffness, "step size underflow at t = " + std::to_string(t));
        }
        const bool final_step = t + h >= t_end;
        if (final_step) h = t_end - t;

        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = field(t + c2 * h, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = field(t + c3 * h, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = field(t + c4 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = field(t + c5 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double t_new = final_step ? t_end : t + h;
        k6 = field(t_new, yt);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = field(t_new, y_new);
        for (std::size_t i = 0; i < N; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

        if (!all_finite(y_new) || !all_finite(k7) || !all_finite(err)) {
            last_failure_nonfinite = true;
            h *= 0.25;
            continue;
        }
        double ratio = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double scale = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            ratio = std::max(ratio, std::abs(err[i]) / scale);
        }
        if (ratio > 1.0) {
            last_failure_nonfinite = false;
            h *= std::max(0.2, 0.9 * std::pow(ratio, -0.2));
            continue;
        }

        DenseSegment<N> seg;
        seg.t0 = t;
        seg.h = t_new - t;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = y_new[i] - y[i];
            const double bspl = h * k1[i] - dy;
            seg.coeff[0][i] = y[i];
            seg.coeff[1][i] = dy;
            seg.coeff[2][i] = bspl;
            seg.coeff[3][i] = dy - h * k7[i] - bspl;
            seg.coeff[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        t = t_new;
        y = y_new;
        k1 = k7;
        last_failure_nonfinite = false;
        if (on_step(seg) == StepAction::Stop) return RunEnd::Stopped;

        const double grow = ratio > 0.0 ? std::min(5.0, 0.9 * std::pow(ratio, -0.2)) : 5.0;
        h = std::min(h * grow, ctl.max_step);
    }
    return RunEnd::ReachedEnd;
}

}  // namespace monopole::rk
