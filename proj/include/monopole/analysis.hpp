#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "monopole/model.hpp"

namespace monopole {

/// Sampled solution on [t0, t_report]. Samples up to t_graft come from the
/// integrator; later ones from the fitted exponential tail.
struct Profile {
    double lambda_hat = 0.0;
    std::vector<PhaseState> samples;
    double t_graft = 0.0;
    bool converged = false;
};

struct AuditMargins {
    double f_in_01 = 0.0;        ///< min over samples of min(f, 1 - f)
    double fp_negative = 0.0;    ///< min of -f'
    double rho_in_01 = 0.0;      ///< min of min(rho, 1 - rho)
    double rhop_positive = 0.0;  ///< min of rho'
};

struct AuditReport {
    bool f_in_01 = false;
    bool fp_negative = false;
    bool rho_in_01 = false;
    bool rhop_positive = false;
    AuditMargins worst_margins;
    double residual_max = 0.0;
    std::size_t samples_checked = 0;

    bool pass() const { return f_in_01 && fp_negative && rho_in_01 && rhop_positive; }
};

/// Checks 0 < f < 1, f' < 0, 0 < rho < 1, rho' > 0 at every given sample.
/// residual_max is filled when at least 5 samples are supplied.
AuditReport monotonicity_audit(std::span<const PhaseState> samples, double lambda_hat);

/// Audits the integrated part of a converged profile, t in (t0, t_graft].
/// Throws AuditDomain when the profile is not converged.
AuditReport monotonicity_audit(const Profile& profile);

/// Sup-norm over interior samples of the ODE residual, with f'' and rho''
/// taken as three-point central differences of the f' and rho' columns.
/// Sample spacing may be nonuniform. Throws TooFewSamples below 5 samples.
double residual_norm(std::span<const PhaseState> samples, double lambda_hat);

/// The frozen coefficient p(tau) for the Sturm probe.
struct ProbeProfile {
    std::function<double(double)> p;
    double tau_max = 0.0;  ///< p is defined on (0, tau_max]
    bool mass_term = true;
};

/// Probe coefficient from a sampled solution: p(tau) = f(tau / sqrt(lambda_hat))
/// by cubic Hermite interpolation of (f, f'). For lambda_hat = 0 the radius is
/// used directly and the mass term is dropped.
ProbeProfile make_probe_profile(std::span<const PhaseState> samples, double lambda_hat);

/// p == 1 on (0, inf) with the mass term: the spherical Bessel l = 1 case.
ProbeProfile flat_probe_profile();

struct ProbeOptions {
    double t_end = 5.0;
    double t0 = 1e-3;
    double initial_slope = 1.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double event_tol = 1e-10;
};

struct ProbeResult {
    std::optional<double> first_zero;
    double t_end = 0.0;
    /// True when Q kept its sign on (t0, t_end]; the comparison argument
    /// expects a zero there for any admissible p.
    bool flagged = false;
};

/// Integrates Q'' + (2/t) Q' + (1 - 2 p^2 / t^2) Q = 0 from Q(t0) = s t0,
/// Q'(t0) = s and returns the first zero of Q. Throws SturmDomain if p leaves
/// (0, 1] on the integration range, Domain if t_end exceeds the profile.
ProbeResult linearized_probe(const ProbeProfile& profile, const ProbeOptions& options = {});

enum class DecayComponent { F, OneMinusRho };
enum class DecayLaw { Exponential, Power };

std::string_view to_string(DecayComponent c) noexcept;

struct DecayFit {
    DecayComponent component = DecayComponent::F;
    DecayLaw law = DecayLaw::Exponential;
    double rate = 0.0;       ///< exponential rate r, or power p for DecayLaw::Power
    double amplitude = 0.0;  ///< prefactor A in the model below
    double prefactor_power = 0.0;  ///< k in A t^k e^{-r t}
    std::size_t samples = 0;

    /// Model value at radius t.
    double value(double t) const;
    /// d/dt of the model value.
    double derivative(double t) const;
};

/// Least-squares fit of log(component) over samples in [a, b].
///   f:            A t^k e^{-r t}, k = 1 for lambda_hat = 0, else 0
///   1 - rho:      A e^{-r t} / t for lambda_hat > 0, A t^{-p} for lambda_hat = 0
/// Throws FitDomain for non-positive values or fewer than 10 samples.
DecayFit fit_decay(std::span<const PhaseState> samples, double a, double b, DecayComponent component,
                   double lambda_hat);

}  // namespace monopole
