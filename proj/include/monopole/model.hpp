#pragma once

#include <span>

namespace monopole {

/// Physical couplings of the SU(2) Yang–Mills–Higgs system.
///
/// lambda is the quartic Higgs coupling, g0 the gauge coupling e, rho0 the
/// Higgs vacuum value. The mass parameter mu = sqrt(lambda) * rho0 is derived,
/// never supplied independently.
struct ModelParams {
    double lambda = 0.0;
    double g0 = 1.0;
    double rho0 = 1.0;

    double mu() const;
    /// Throws ErrorKind::ParameterDomain unless lambda >= 0, g0 > 0, rho0 > 0.
    void validate() const;
};

/// Dimensionless reduction: t = g0 * rho0 * r, rho_hat = rho / rho0,
/// lambda_hat = lambda / g0^2. All solver internals work in these units.
struct ScaledParams {
    double lambda_hat = 0.0;
    double r_scale = 1.0;    ///< physical r per unit of t, 1 / (g0 rho0)
    double rho_scale = 1.0;  ///< rho0

    double alpha_to_physical(double alpha_hat) const;
    double beta_to_physical(double beta_hat) const;
    double alpha_to_scaled(double alpha) const;
    double beta_to_scaled(double beta) const;
};

ScaledParams nondimensionalize(const ModelParams& params);

/// Radial profiles and their derivatives at dimensionless radius t.
struct PhaseState {
    double t = 0.0;
    double f = 0.0;
    double fp = 0.0;
    double rho = 0.0;
    double rhop = 0.0;
};

/// Time derivative of (f, f', rho, rho').
struct Derivs {
    double df = 0.0;
    double dfp = 0.0;
    double drho = 0.0;
    double drhop = 0.0;
};

/// The dimensionless field equations
///
///   f''   = f (f^2 - 1) / t^2 + rho^2 f
///   rho'' = -(2/t) rho' + 2 f^2 rho / t^2 + lambda_hat (rho^2 - 1) rho
///
/// gauge_coupling_sign multiplies the rho^2 f term; it is +1 for the physical
/// system and exists only so validation runs can inject a known-wrong model.
struct Equations {
    double lambda_hat = 0.0;
    double gauge_coupling_sign = 1.0;

    Derivs operator()(double t, const PhaseState& s) const;
};

/// Right-hand side of the dimensionless system. Throws SingularPoint for t <= 0.
Derivs rhs(double t, const PhaseState& state, double lambda_hat);

/// Exact lambda = 0 solution: f = t / sinh t, rho = coth t - 1/t.
/// Small-t cancellations are handled with series, so every component keeps
/// near full relative precision down to t ~ 1e-8.
PhaseState ps_exact(double t);

/// Static energy density of the hedgehog ansatz in dimensionless units.
/// Its integral over (0, inf) is the mass in units of 4 pi rho0 / g0.
double energy_density(const PhaseState& state, double lambda_hat);

/// Trapezoid integral of energy_density over ordered samples.
double integrate_energy(std::span<const PhaseState> samples, double lambda_hat);

/// Physical mass from the dimensionless integral: (4 pi rho0 / g0) * integral.
double physical_mass(double dimensionless_mass, const ModelParams& params);

}  // namespace monopole
