#include "monopole/origin_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "monopole/errors.hpp"

namespace monopole {

void ShootPoint::validate() const {
    if (!(std::isfinite(alpha) && alpha >= 0.0) || !(std::isfinite(beta) && beta >= 0.0))
        raise(ErrorKind::ParameterDomain,
              "shoot point must be finite and non-negative, got alpha=" + std::to_string(alpha) +
                  " beta=" + std::to_string(beta));
}

SeriesCoefficients series_coefficients(const ShootPoint& sp, double lambda_hat) {
    sp.validate();
    return series_coefficients_of<double>(sp.alpha, sp.beta, lambda_hat);
}

PhaseState initial_state(const ShootPoint& sp, double lambda_hat, double t0) {
    if (!(t0 > 0.0 && t0 <= kMaxHandoff))
        raise(ErrorKind::HandoffDomain, "handoff radius must lie in (0, " + std::to_string(kMaxHandoff) +
                                            "], got " + std::to_string(t0));
    const SeriesCoefficients c = series_coefficients(sp, lambda_hat);
    const double t2 = t0 * t0;
    PhaseState s;
    s.t = t0;
    s.f = 1.0 - sp.alpha * t2 + c.a4 * t2 * t2;
    s.fp = -2.0 * sp.alpha * t0 + 4.0 * c.a4 * t2 * t0;
    s.rho = sp.beta * t0 + c.b3 * t2 * t0;
    s.rhop = sp.beta + 3.0 * c.b3 * t2;
    return s;
}

namespace {

struct Bounds {
    double k;
    double m;
    double two_s;  // 2S
};

Bounds contraction_bounds(const ShootPoint& sp, double lambda) {
    const double g2 = 1.0;
    const double rho02 = 1.0;
    const double k = std::max({2.0 * std::abs(sp.alpha), 2.0 * std::abs(sp.beta), 3.0});
    const double k2 = k * k;
    const double m1 = 0.5 * (2.0 * (2.0 * k + k2) + lambda * (k2 + rho02));
    const double m2 = (6.0 * k + 2.0 * k2 + 2.0 * g2 * k2) / 3.0;
    const double m3 = (8.0 + 3.0 * lambda) * k2 + lambda * rho02;
    const double m4 = 4.0 * k + 3.0 * (1.0 + g2) * k2;
    const double m = std::max(4.0 * k2 * k + lambda * (k2 + rho02) * k, (2.0 + g2) * k2 * k);
    return {k, m, std::log(std::max({m1, m2, m3, m4}))};
}

// Cumulative trapezoid of y on a uniform grid, starting from zero.
void cumulative_trapezoid(const std::vector<double>& y, double h, std::vector<double>& out) {
    out.assign(y.size(), 0.0);
    for (std::size_t i = 1; i < y.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (y[i - 1] + y[i]);
}

}  // namespace

double contraction_threshold(const ShootPoint& sp, double lambda_hat) {
    sp.validate();
    return -0.5 * contraction_bounds(sp, lambda_hat).two_s;
}

PicardHistory picard_verify(const ShootPoint& sp, double lambda_hat, double s_max, int n_iters,
                            const PicardOptions& options) {
    sp.validate();
    if (n_iters < 2) raise(ErrorKind::Precondition, "picard_verify needs at least 2 iterations");
    const Bounds b = contraction_bounds(sp, lambda_hat);
    const double threshold = -0.5 * b.two_s;
    if (s_max > threshold)
        raise(ErrorKind::ContractionDomain, "s_max = " + std::to_string(s_max) +
                                                " lies above the contraction threshold " + std::to_string(threshold));
    if (!(s_max > options.s_lower && options.max_ds > 0.0))
        raise(ErrorKind::Precondition, "invalid Picard quadrature grid");

    const auto n_cells = static_cast<std::size_t>(std::ceil((s_max - options.s_lower) / options.max_ds));
    const double h = (s_max - options.s_lower) / static_cast<double>(n_cells);
    const std::size_t n = n_cells + 1;

    std::vector<double> s(n), e2(n), e5(n), em3(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = (i + 1 == n) ? s_max : options.s_lower + h * static_cast<double>(i);
        e2[i] = std::exp(2.0 * s[i]);
        e5[i] = std::exp(5.0 * s[i]);
        em3[i] = std::exp(-3.0 * s[i]);
    }

    std::vector<double> phi(n, -sp.alpha), psi(n, sp.beta);
    std::vector<double> next_phi(n), next_psi(n);
    std::vector<double> w2(n), w5(n), c2(n), c5(n);
    std::vector<double> d_phi(n), d_psi(n);  // d/ds of the latest iterates

    PicardHistory hist;
    hist.s_max = s_max;
    hist.s_threshold = threshold;
    hist.bound_k = b.k;
    hist.bound_m = b.m;
    hist.grid_step = h;
    hist.phi_at_s_max.push_back(phi.back());
    hist.psi_at_s_max.push_back(psi.back());

    // Differences below this are indistinguishable from rounding in O(K) iterates.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * b.k;

    for (int it = 0; it < n_iters; ++it) {
        // phi update
        for (std::size_t i = 0; i < n; ++i) {
            const double F = 3.0 * phi[i] * phi[i] + e2[i] * phi[i] * phi[i] * phi[i] +
                             psi[i] * psi[i] * (1.0 + e2[i] * phi[i]);
            w2[i] = e2[i] * F;
            w5[i] = e5[i] * F;
        }
        cumulative_trapezoid(w2, h, c2);
        cumulative_trapezoid(w5, h, c5);
        for (std::size_t i = 0; i < n; ++i) {
            next_phi[i] = -sp.alpha + (c2[i] - em3[i] * c5[i]) / 3.0;
            d_phi[i] = em3[i] * c5[i];
        }
        // psi update
        for (std::size_t i = 0; i < n; ++i) {
            const double G = 2.0 * (2.0 * phi[i] + e2[i] * phi[i] * phi[i]) * psi[i] +
                             lambda_hat * (e2[i] * psi[i] * psi[i] - 1.0) * psi[i];
            w2[i] = e2[i] * G;
            w5[i] = e5[i] * G;
        }
        cumulative_trapezoid(w2, h, c2);
        cumulative_trapezoid(w5, h, c5);
        for (std::size_t i = 0; i < n; ++i) {
            next_psi[i] = sp.beta + (c2[i] - em3[i] * c5[i]) / 3.0;
            d_psi[i] = em3[i] * c5[i];
        }

        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            diff = std::max({diff, std::abs(next_phi[i] - phi[i]), std::abs(next_psi[i] - psi[i])});
        if (!hist.sup_differences.empty()) {
            const double prev = hist.sup_differences.back();
            hist.ratios.push_back(prev > floor ? diff / prev : std::numeric_limits<double>::quiet_NaN());
        }
        hist.sup_differences.push_back(diff);
        phi.swap(next_phi);
        psi.swap(next_psi);
        hist.phi_at_s_max.push_back(phi.back());
        hist.psi_at_s_max.push_back(psi.back());
    }

    // f = 1 + e^{2s} phi, rho = e^{s} psi; d/dt = e^{-s} d/ds.
    const double t = std::exp(s_max);
    const double ph = phi.back(), ps = psi.back();
    hist.final_state.t = t;
    hist.final_state.f = 1.0 + t * t * ph;
    hist.final_state.fp = t * (2.0 * ph + d_phi.back());
    hist.final_state.rho = t * ps;
    hist.final_state.rhop = ps + d_psi.back();
    return hist;
}

}  // namespace monopole
