#include "monopole/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "monopole/errors.hpp"

namespace monopole {

double ModelParams::mu() const { return std::sqrt(lambda) * rho0; }

void ModelParams::validate() const {
    if (!(std::isfinite(lambda) && lambda >= 0.0))
        raise(ErrorKind::ParameterDomain, "lambda must be finite and >= 0, got " + std::to_string(lambda));
    if (!(std::isfinite(g0) && g0 > 0.0))
        raise(ErrorKind::ParameterDomain, "g0 must be finite and > 0, got " + std::to_string(g0));
    if (!(std::isfinite(rho0) && rho0 > 0.0))
        raise(ErrorKind::ParameterDomain, "rho0 must be finite and > 0, got " + std::to_string(rho0));
}

double ScaledParams::alpha_to_physical(double alpha_hat) const { return alpha_hat / (r_scale * r_scale); }
double ScaledParams::beta_to_physical(double beta_hat) const { return beta_hat * rho_scale / r_scale; }
double ScaledParams::alpha_to_scaled(double alpha) const { return alpha * r_scale * r_scale; }
double ScaledParams::beta_to_scaled(double beta) const { return beta * r_scale / rho_scale; }

ScaledParams nondimensionalize(const ModelParams& params) {
    params.validate();
    ScaledParams out;
    out.lambda_hat = params.lambda / (params.g0 * params.g0);
    out.r_scale = 1.0 / (params.g0 * params.rho0);
    out.rho_scale = params.rho0;
    return out;
}

Derivs Equations::operator()(double t, const PhaseState& s) const {
    if (!(t > 0.0)) raise(ErrorKind::SingularPoint, "field equations are singular at t <= 0");
    const double inv_t2 = 1.0 / (t * t);
    Derivs d;
    d.df = s.fp;
    d.dfp = s.f * (s.f * s.f - 1.0) * inv_t2 + gauge_coupling_sign * s.rho * s.rho * s.f;
    d.drho = s.rhop;
    d.drhop = -2.0 * s.rhop / t + 2.0 * s.f * s.f * s.rho * inv_t2 +
              lambda_hat * (s.rho * s.rho - 1.0) * s.rho;
    return d;
}

Derivs rhs(double t, const PhaseState& state, double lambda_hat) {
    return Equations{lambda_hat}(t, state);
}

namespace {

// t cosh t - sinh t = sum_{k>=1} 2k t^{2k+1} / (2k+1)!
double cosh_minus_sinh_over_t(double t) {
    if (t > 0.5) return t * std::cosh(t) - std::sinh(t);
    const double t2 = t * t;
    double term = t * t2 / 6.0;  // t^3 / 3!
    double sum = 0.0;
    for (int k = 1; k < 30; ++k) {
        const double contrib = 2.0 * k * term;
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
        term *= t2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return sum;
}

// sinh^2 t - t^2 = sum_{k>=2} (2t)^{2k} / (2 (2k)!)
double sinh2_minus_t2(double t) {
    if (t > 0.5) {
        const double s = std::sinh(t);
        return s * s - t * t;
    }
    const double x2 = 4.0 * t * t;
    double term = x2 * x2 / 24.0;  // (2t)^4 / 4!
    double sum = 0.0;
    for (int k = 2; k < 30; ++k) {
        const double contrib = 0.5 * term;
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
        term *= x2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    }
    return sum;
}

}  // namespace

PhaseState ps_exact(double t) {
    if (!(t > 0.0)) raise(ErrorKind::Domain, "ps_exact requires t > 0");
    PhaseState s;
    s.t = t;
    if (t > 700.0) {
        // sinh overflows; every component is below double resolution of its limit.
        s.f = 0.0;
        s.fp = 0.0;
        s.rho = 1.0 - 1.0 / t;
        s.rhop = 1.0 / (t * t);
        return s;
    }
    const double sh = std::sinh(t);
    const double n = cosh_minus_sinh_over_t(t);
    s.f = t / sh;
    s.fp = -n / (sh * sh);
    s.rho = n / (t * sh);
    s.rhop = sinh2_minus_t2(t) / (t * t * sh * sh);
    return s;
}

double energy_density(const PhaseState& s, double lambda_hat) {
    const double t = s.t;
    if (!(t > 0.0)) raise(ErrorKind::Domain, "energy density requires t > 0");
    const double f2m1 = s.f * s.f - 1.0;
    const double r2m1 = s.rho * s.rho - 1.0;
    const double trp = t * s.rhop;
    return s.fp * s.fp + f2m1 * f2m1 / (2.0 * t * t) + s.f * s.f * s.rho * s.rho + 0.5 * trp * trp +
           0.25 * lambda_hat * t * t * r2m1 * r2m1;
}

double integrate_energy(std::span<const PhaseState> samples, double lambda_hat) {
    double total = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double h = samples[i].t - samples[i - 1].t;
        total += 0.5 * h * (energy_density(samples[i - 1], lambda_hat) + energy_density(samples[i], lambda_hat));
    }
    return total;
}

double physical_mass(double dimensionless_mass, const ModelParams& params) {
    params.validate();
    return 4.0 * std::numbers::pi * params.rho0 / params.g0 * dimensionless_mass;
}

}  // namespace monopole
