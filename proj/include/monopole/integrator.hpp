#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "monopole/dormand_prince.hpp"
#include "monopole/model.hpp"

namespace monopole {

struct IntegratorControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double t_max = 12.0;
    double event_tol = 1e-10;
    double tube_f = 1e-2;
    double tube_rho = 1e-2;
    double tube_slope = 1e-2;
    double blowup_bound = 2.0;   ///< |f| or |rho| beyond this is a runaway
    double blowup_slope = 1e3;   ///< |f'| or |rho'| beyond this is a runaway
    double max_step = 0.1;
    bool stop_on_f_event = true;  ///< f-events terminate (f-fate scan)

    /// Throws Precondition on non-positive entries, tube thresholds >= 1,
    /// or t_max <= start_t.
    void validate(double start_t) const;
};

enum class OutcomeTag { FPrimeZero, FZero, RhoPrimeZero, RhoZero, RhoCrossVev, Converged, Blowup, Horizon };

std::string_view to_string(OutcomeTag tag) noexcept;
std::optional<OutcomeTag> outcome_from_string(std::string_view name) noexcept;

enum class EventKind { FPrimeZero, FZero, RhoPrimeZero, RhoZero, RhoCrossVev, Tangency };

std::string_view to_string(EventKind kind) noexcept;

struct EventRecord {
    EventKind kind = EventKind::Tangency;
    double t = 0.0;
    PhaseState state;
    /// For tangencies: which crossing kind the touching function belongs to.
    EventKind of = EventKind::Tangency;
};

struct Outcome {
    OutcomeTag tag = OutcomeTag::Horizon;
    std::optional<double> t_event;
    PhaseState state;
};

enum class Termination { FEvent, Blowup, Horizon };

/// Result of one outward integration: accepted-step samples, their dense
/// interpolants, and the crossing events met on the way.
struct Trajectory {
    double lambda_hat = 0.0;
    std::vector<PhaseState> samples;             ///< start, then the end of each accepted step
    std::vector<rk::DenseSegment<4>> segments;   ///< segments[i] spans samples[i] .. samples[i+1]
    std::vector<EventRecord> f_events;
    std::vector<EventRecord> rho_events;
    std::vector<EventRecord> tangencies;
    Termination termination = Termination::Horizon;
    PhaseState final_state;

    double t_begin() const { return samples.front().t; }
    double t_end() const { return final_state.t; }
    /// Dense-output state; t must lie in [t_begin(), t_end()].
    PhaseState at(double t) const;
};

rk::Vec<4> to_vec(const PhaseState& s);
PhaseState to_state(double t, const rk::Vec<4>& y);

Trajectory integrate(const PhaseState& start, const Equations& equations, const IntegratorControls& controls);
Trajectory integrate(const PhaseState& start, double lambda_hat, const IntegratorControls& controls);

/// Bisection for a sign change of g on [a, b] down to |dt| <= tol.
/// Throws NoEvent when g(a) and g(b) share a strict sign (tangency is not a crossing).
double refine_event(const std::function<double(double)>& g, double a, double b, double tol);

/// First crossing of predicate(state) = 0 along the trajectory's dense output.
EventRecord find_crossing(const Trajectory& traj, const std::function<double(const PhaseState&)>& predicate,
                          double tol);

enum class FateMode { FFate, RhoFate };

/// Convergence tube: |f| < tube_f, |f'| < tube_slope, and the Higgs distance
/// and slope below tube_rho and tube_slope. For lambda_hat > 0 these are
/// |1 - rho| and |rho'|. For lambda_hat = 0, where rho approaches 1 as 1/t,
/// they are taken on rho + t rho' instead.
bool in_tube(const PhaseState& s, double lambda_hat, const IntegratorControls& controls);

/// Amplitude of the growing Higgs mode about rho = 1,
///   G = (1 + m t)(1 - rho) - t rho',  m = sqrt(2 lambda_hat).
/// G > 0 means rho is heading back below 1, G < 0 means it will cross 1.
double higgs_growing_mode(const PhaseState& s, double lambda_hat);

/// Assigns the trajectory to its fate class. Throws Integrity when an
/// f-zero and an f'-zero coincide within event_tol.
Outcome classify(const Trajectory& traj, FateMode mode, const IntegratorControls& controls);

}  // namespace monopole
