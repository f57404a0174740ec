#pragma once

#include <vector>

#include "monopole/model.hpp"

namespace monopole {

/// Shooting pair for the origin asymptotics f ~ 1 - alpha t^2, rho ~ beta t.
struct ShootPoint {
    double alpha = 0.0;
    double beta = 0.0;

    /// Throws ParameterDomain unless both are finite and >= 0.
    void validate() const;
};

/// Next-order terms of the origin expansion,
///   f   = 1 - alpha t^2 + a4 t^4 + O(t^6)
///   rho = beta t + b3 t^3 + O(t^5)
template <class Scalar>
struct BasicSeriesCoefficients {
    Scalar a4{};
    Scalar b3{};
    int order = 4;
};

using SeriesCoefficients = BasicSeriesCoefficients<double>;

/// Closed-form coefficients, generic so they can be evaluated in exact arithmetic.
template <class Scalar>
BasicSeriesCoefficients<Scalar> series_coefficients_of(const Scalar& alpha, const Scalar& beta,
                                                       const Scalar& lambda_hat) {
    BasicSeriesCoefficients<Scalar> c;
    c.a4 = (Scalar(3) * alpha * alpha + beta * beta) / Scalar(10);
    c.b3 = -(beta * (Scalar(4) * alpha + lambda_hat)) / Scalar(10);
    return c;
}

SeriesCoefficients series_coefficients(const ShootPoint& sp, double lambda_hat);

inline constexpr double kDefaultHandoff = 1e-3;
inline constexpr double kMaxHandoff = 1e-2;

/// Starting state at the handoff radius t0 from the truncated series.
/// Throws HandoffDomain unless 0 < t0 <= kMaxHandoff.
PhaseState initial_state(const ShootPoint& sp, double lambda_hat, double t0 = kDefaultHandoff);

/// Picard iteration on the log-radius integral equations, used as an
/// independent check of the series start.
///
/// With s = log t, f = 1 + e^{2s} phi, rho = e^{s} psi, the iterates are
///   phi_{n+1}(s) = -alpha + 1/3 int_{-inf}^{s} (e^{2u} - e^{-3s+5u}) F(phi_n, psi_n, u) du
///   psi_{n+1}(s) =  beta  + 1/3 int_{-inf}^{s} (e^{2u} - e^{-3s+5u}) G(phi_n, psi_n, u) du
/// with F = 3 phi^2 + e^{2u} phi^3 + psi^2 (1 + e^{2u} phi) and
///      G = 2 (2 phi + e^{2u} phi^2) psi + lambda_hat (e^{2u} psi^2 - 1) psi.
struct PicardOptions {
    double s_lower = -30.0;  ///< truncation of the -infinity limit
    double max_ds = 0.01;    ///< upper bound on the uniform s-grid spacing
};

struct PicardHistory {
    double s_max = 0.0;
    double s_threshold = 0.0;  ///< -S: the contraction domain is s <= s_threshold
    double bound_k = 0.0;      ///< K of the iterate bound |phi_n|, |psi_n| <= K
    double bound_m = 0.0;      ///< M of the difference bound M e^{2s} / 3^{n+1}
    double grid_step = 0.0;
    /// phi_n(s_max), psi_n(s_max) for n = 0..n_iters.
    std::vector<double> phi_at_s_max;
    std::vector<double> psi_at_s_max;
    /// sup over the grid of max(|phi_{n+1} - phi_n|, |psi_{n+1} - psi_n|), n = 0..n_iters-1.
    std::vector<double> sup_differences;
    /// sup_differences[n] / sup_differences[n-1]; NaN once the previous
    /// difference has reached the round-off floor.
    std::vector<double> ratios;
    /// Final iterate converted back to (f, f', rho, rho') at t = e^{s_max}.
    PhaseState final_state;
};

/// -S from the iterate bounds: e^{2S} = max(M1, M2, M3, M4) with g0 = rho0 = 1.
double contraction_threshold(const ShootPoint& sp, double lambda_hat);

/// Runs n_iters Picard sweeps. Throws ContractionDomain when s_max lies above
/// the threshold and Precondition when n_iters < 2.
PicardHistory picard_verify(const ShootPoint& sp, double lambda_hat, double s_max, int n_iters,
                            const PicardOptions& options = {});

}  // namespace monopole
