#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "monopole/analysis.hpp"
#include "monopole/integrator.hpp"
#include "monopole/model.hpp"
#include "monopole/origin_series.hpp"

namespace monopole {

struct ShooterControls {
    IntegratorControls integrator;
    double tol_alpha = 1e-8;
    double tol_beta = 1e-8;
    double t0 = kDefaultHandoff;
    double alpha_seed = 1.0 / 6.0;
    double beta_seed = 1.0 / 3.0;
    double expand_factor = 4.0;
    double search_lower = 1e-12;
    double search_upper = 1e12;
    int horizon_doublings = 2;     ///< t_max is retried at 2x, 4x before declaring a separatrix
    double graft_margin_f = 3.0;    ///< t_graft sits this far before the first f-event
    double graft_margin_rho = 1.5;  ///< and this far before the first rho-event
    int max_beta_refinements = 8;   ///< extra factor-16 narrowings of the beta bracket when t_graft misses the tube
    double fit_window = 2.0;       ///< decay fits use [t_graft - fit_window, t_graft]
    double t_report = 20.0;
    double sample_step = 1e-3;
    double gauge_coupling_sign = 1.0;  ///< -1 only for fault-injection runs

    void validate() const;
    Equations equations(double lambda_hat) const { return {lambda_hat, gauge_coupling_sign}; }
};

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    OutcomeTag lo_outcome = OutcomeTag::Horizon;
    OutcomeTag hi_outcome = OutcomeTag::Horizon;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

/// One classification made while searching or bisecting in alpha.
struct AlphaProbe {
    double alpha = 0.0;
    OutcomeTag tag = OutcomeTag::Horizon;
    std::optional<double> t_event;
    double t_max = 0.0;
};

/// Integrates from the series start at (alpha, beta) and classifies by f-fate.
Trajectory shoot(const ShootPoint& sp, double lambda_hat, const ShooterControls& controls,
                 std::optional<double> t_max = std::nullopt);

/// Geometric search from alpha_seed for an FPrimeZero / FZero pair.
/// Throws Precondition for beta <= 0 and BracketingFailure when the search
/// leaves [search_lower, search_upper].
Bracket bracket_alpha(double beta, double lambda_hat, const ShooterControls& controls,
                      std::vector<AlphaProbe>* log = nullptr);

struct AlphaResult {
    double alpha_star = 0.0;
    Bracket bracket;
    Trajectory trajectory;  ///< at alpha_star
    int iterations = 0;
    /// Bisection stopped because the midpoint reached the horizon even at
    /// the extended t_max; alpha_star is that midpoint.
    bool separatrix_at_horizon = false;
    /// Bisection stopped on a runaway preceded by rho crossing 1; the
    /// midpoint trajectory carries that rho-event.
    bool higgs_runaway = false;
    std::vector<AlphaProbe> log;
};

/// Bisection on the f-fate between an FPrimeZero and an FZero endpoint.
/// Throws Integrity when a midpoint blows up without a preceding rho-event.
AlphaResult bisect_alpha(const Bracket& bracket, double beta, double lambda_hat, const ShooterControls& controls);

/// bracket_alpha followed by bisect_alpha.
AlphaResult alpha_star(double beta, double lambda_hat, const ShooterControls& controls);

enum class BetaSide { TooSmall, TooLarge };

std::string_view to_string(BetaSide side) noexcept;

struct BetaProbe {
    double beta = 0.0;
    double alpha_star = 0.0;
    OutcomeTag rho_outcome = OutcomeTag::Horizon;
    std::optional<double> t_event;
    double growing_mode = 0.0;  ///< G at the end of the alpha* trajectory
    BetaSide side = BetaSide::TooSmall;
};

/// Side of the separatrix for a given beta: rho' or rho vanishing means too
/// small, rho crossing 1 means too large. Without a rho-event the sign of the
/// growing Higgs mode at the end of the trajectory decides.
BetaProbe classify_beta(double beta, double lambda_hat, const ShooterControls& controls,
                        AlphaResult* alpha_out = nullptr);

struct BetaBracket {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

struct SolveReport {
    double lambda_hat = 0.0;
    double alpha_star = 0.0;
    double beta_star = 0.0;
    Bracket alpha_bracket;
    BetaBracket beta_bracket;
    int beta_iterations = 0;
    int beta_refinements = 0;  ///< narrowings past tol_beta needed to reach the tube
    std::vector<BetaProbe> beta_log;
    Profile profile;
    double t_graft = 0.0;
    DecayFit f_fit;
    DecayFit higgs_fit;
    double graft_mismatch = 0.0;
    double residual_norm = 0.0;
    AuditReport audit;
    double energy = 0.0;
    OutcomeTag final_outcome = OutcomeTag::Horizon;
    std::size_t tangencies = 0;

    bool converged() const { return profile.converged; }
};

/// Nested bisection: beta between the too-small and too-large sides, with
/// alpha*(beta) found at each probe. Throws BracketingFailure (with the probe
/// log in the message) when no dichotomy exists in [search_lower, search_upper],
/// GraftDomain when the final trajectory is still not in the tube at t_graft
/// after max_beta_refinements further narrowings of the beta bracket.
SolveReport bisect_beta(double lambda_hat, const ShooterControls& controls);

/// Uniform resampling of the trajectory on t_k = t_begin + k h, k h <= t_stop - t_begin.
std::vector<PhaseState> resample(const Trajectory& traj, double t_stop, double h);

struct GraftResult {
    Profile profile;
    DecayFit f_fit;
    DecayFit higgs_fit;
    double mismatch = 0.0;
};

/// Fits the decay laws on [t_graft - window, t_graft] and continues the
/// samples with the fitted tails to t_report at the same spacing.
/// Throws GraftDomain when the sample at t_graft is outside the tube or the
/// fitted tail misses it by more than 10x the tube size.
GraftResult graft_tail(std::vector<PhaseState> samples, double lambda_hat, double t_graft,
                       const ShooterControls& controls);

/// Trapezoid over the samples plus the fitted tail's contribution past the last sample.
double profile_energy(const Profile& profile, const DecayFit& f_fit, const DecayFit& higgs_fit);

struct SweepCell {
    double alpha = 0.0;
    double beta = 0.0;
    OutcomeTag outcome = OutcomeTag::Horizon;
    std::optional<double> t_event;
    double t_end = 0.0;
};

/// Classifies every grid point (f-fate, then rho-fate when no f-event),
/// row-major by alpha then beta. Per-cell integration failures are recorded
/// as Blowup. threads = 0 uses the hardware concurrency.
std::vector<SweepCell> sweep(const std::vector<double>& alphas, const std::vector<double>& betas, double lambda_hat,
                             const ShooterControls& controls, unsigned threads = 1);

/// Physical-units front end: nondimensionalizes, solves, and reports the
/// dimensionless result. Conversion of alpha*, beta* back is left to the caller.
SolveReport solve(const ModelParams& params, const ShooterControls& controls);

}  // namespace monopole
