#include "monopole/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "monopole/errors.hpp"

namespace monopole {

void IntegratorControls::validate(double start_t) const {
    const bool positive = rel_tol > 0 && abs_tol > 0 && t_max > 0 && event_tol > 0 && tube_f > 0 &&
                          tube_rho > 0 && tube_slope > 0 && blowup_bound > 0 && blowup_slope > 0 && max_step > 0;
    if (!positive) raise(ErrorKind::Precondition, "integrator controls must all be positive");
    if (tube_f >= 1.0 || tube_rho >= 1.0) raise(ErrorKind::Precondition, "tube thresholds must be < 1");
    if (!(t_max > start_t)) raise(ErrorKind::Precondition, "t_max must exceed the starting radius");
}

std::string_view to_string(OutcomeTag tag) noexcept {
    switch (tag) {
        case OutcomeTag::FPrimeZero: return "FPrimeZero";
        case OutcomeTag::FZero: return "FZero";
        case OutcomeTag::RhoPrimeZero: return "RhoPrimeZero";
        case OutcomeTag::RhoZero: return "RhoZero";
        case OutcomeTag::RhoCrossVev: return "RhoCrossVev";
        case OutcomeTag::Converged: return "Converged";
        case OutcomeTag::Blowup: return "Blowup";
        case OutcomeTag::Horizon: return "Horizon";
    }
    return "Unknown";
}

std::optional<OutcomeTag> outcome_from_string(std::string_view name) noexcept {
    for (auto tag : {OutcomeTag::FPrimeZero, OutcomeTag::FZero, OutcomeTag::RhoPrimeZero, OutcomeTag::RhoZero,
                     OutcomeTag::RhoCrossVev, OutcomeTag::Converged, OutcomeTag::Blowup, OutcomeTag::Horizon})
        if (to_string(tag) == name) return tag;
    return std::nullopt;
}

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::FPrimeZero: return "FPrimeZero";
        case EventKind::FZero: return "FZero";
        case EventKind::RhoPrimeZero: return "RhoPrimeZero";
        case EventKind::RhoZero: return "RhoZero";
        case EventKind::RhoCrossVev: return "RhoCrossVev";
        case EventKind::Tangency: return "Tangency";
    }
    return "Unknown";
}

rk::Vec<4> to_vec(const PhaseState& s) { return {s.f, s.fp, s.rho, s.rhop}; }

PhaseState to_state(double t, const rk::Vec<4>& y) { return {t, y[0], y[1], y[2], y[3]}; }

PhaseState Trajectory::at(double t) const {
    if (t < t_begin() || t > t_end())
        raise(ErrorKind::Domain, "trajectory evaluated outside [" + std::to_string(t_begin()) + ", " +
                                     std::to_string(t_end()) + "] at t = " + std::to_string(t));
    if (segments.empty()) return final_state;
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const rk::DenseSegment<4>& s) { return v < s.t0; });
    const auto& seg = (it == segments.begin()) ? segments.front() : *std::prev(it);
    return to_state(t, seg(t));
}

double refine_event(const std::function<double(double)>& g, double a, double b, double tol) {
    double ga = g(a);
    const double gb = g(b);
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    if ((ga > 0) == (gb > 0)) raise(ErrorKind::NoEvent, "no sign change on [" + std::to_string(a) + ", " +
                                                            std::to_string(b) + "]");
    double lo = a, hi = b;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0) == (ga > 0)) {
            lo = mid;
            ga = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

EventRecord find_crossing(const Trajectory& traj, const std::function<double(const PhaseState&)>& predicate,
                          double tol) {
    for (const auto& seg : traj.segments) {
        const double t1 = std::min(seg.t1(), traj.t_end());
        if (t1 <= seg.t0) continue;
        const double ga = predicate(to_state(seg.t0, seg(seg.t0)));
        const double gb = predicate(to_state(t1, seg(t1)));
        if (ga == 0.0 || gb == 0.0 || (ga > 0) != (gb > 0)) {
            auto g = [&](double t) { return predicate(to_state(t, seg(t))); };
            EventRecord ev;
            ev.t = refine_event(g, seg.t0, t1, tol);
            ev.state = to_state(ev.t, seg(ev.t));
            return ev;
        }
    }
    raise(ErrorKind::NoEvent, "predicate has no sign change along the trajectory");
}

namespace {

struct Watch {
    EventKind kind;
    double (*value)(const rk::Vec<4>&);
    bool (*crosses)(double ga, double gb);
};

double comp_f(const rk::Vec<4>& y) { return y[0]; }
double comp_fp(const rk::Vec<4>& y) { return y[1]; }
double comp_rho(const rk::Vec<4>& y) { return y[2]; }
double comp_rhop(const rk::Vec<4>& y) { return y[3]; }
double comp_rho_minus_1(const rk::Vec<4>& y) { return y[2] - 1.0; }

bool down(double ga, double gb) { return ga > 0.0 && gb <= 0.0; }
bool up(double ga, double gb) { return ga < 0.0 && gb >= 0.0; }

constexpr std::array<Watch, 5> kWatches{{
    {EventKind::FZero, comp_f, down},
    {EventKind::FPrimeZero, comp_fp, up},
    {EventKind::RhoPrimeZero, comp_rhop, down},
    {EventKind::RhoCrossVev, comp_rho_minus_1, up},
    {EventKind::RhoZero, comp_rho, down},
}};

bool is_f_event(EventKind k) { return k == EventKind::FZero || k == EventKind::FPrimeZero; }

// Whether a refined crossing satisfies the side conditions of its class.
bool admissible(EventKind kind, const PhaseState& s) {
    switch (kind) {
        case EventKind::FZero: return s.fp < 0.0;
        case EventKind::FPrimeZero: return s.f > 0.0 && s.f < 1.0;
        case EventKind::RhoPrimeZero: return s.rho > 0.0 && s.rho < 1.0;
        case EventKind::RhoCrossVev: return s.rhop > 0.0;
        case EventKind::RhoZero: return true;
        case EventKind::Tangency: return false;
    }
    return false;
}

std::vector<EventRecord> scan_segment(const rk::DenseSegment<4>& seg, const rk::Vec<4>& ya, const rk::Vec<4>& yb,
                                      double tol, std::vector<EventRecord>& tangencies) {
    std::vector<EventRecord> found;
    for (const auto& w : kWatches) {
        const double ga = w.value(ya);
        const double gb = w.value(yb);
        if (w.crosses(ga, gb)) {
            auto g = [&](double t) { return w.value(seg(t)); };
            const double te = refine_event(g, seg.t0, seg.t1(), tol);
            EventRecord ev{w.kind, te, to_state(te, seg(te)), w.kind};
            if (admissible(w.kind, ev.state)) found.push_back(ev);
            continue;
        }
        // Sign excursion strictly inside the step: two crossings or a touch.
        for (double theta : {0.25, 0.5, 0.75}) {
            const double tm = seg.t0 + theta * seg.h;
            const double gm = w.value(seg(tm));
            if ((gm > 0.0 && ga < 0.0 && gb < 0.0) || (gm < 0.0 && ga > 0.0 && gb > 0.0)) {
                tangencies.push_back({EventKind::Tangency, tm, to_state(tm, seg(tm)), w.kind});
                break;
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const EventRecord& a, const EventRecord& b) { return a.t < b.t; });
    return found;
}

}  // namespace

Trajectory integrate(const PhaseState& start, const Equations& equations, const IntegratorControls& controls) {
    if (!(start.t > 0.0)) raise(ErrorKind::SingularPoint, "integration must start at t > 0");
    controls.validate(start.t);

    Trajectory traj;
    traj.lambda_hat = equations.lambda_hat;
    traj.samples.push_back(start);
    traj.final_state = start;
    traj.termination = Termination::Horizon;

    auto field = [&equations](double t, const rk::Vec<4>& y) {
        const Derivs d = equations(t, to_state(t, y));
        return rk::Vec<4>{d.df, d.dfp, d.drho, d.drhop};
    };

    rk::StepControls sc;
    sc.rel_tol = controls.rel_tol;
    sc.abs_tol = controls.abs_tol;
    sc.max_step = controls.max_step;

    rk::Vec<4> prev = to_vec(start);
    auto on_step = [&](const rk::DenseSegment<4>& seg) {
        const rk::Vec<4> yb = seg.end();
        traj.segments.push_back(seg);
        const auto events = scan_segment(seg, prev, yb, controls.event_tol, traj.tangencies);

        // f and f' cannot vanish together on a regular trajectory.
        const EventRecord* fz = nullptr;
        const EventRecord* fpz = nullptr;
        for (const auto& ev : events) {
            if (ev.kind == EventKind::FZero && !fz) fz = &ev;
            if (ev.kind == EventKind::FPrimeZero && !fpz) fpz = &ev;
        }
        if (fz && fpz && std::abs(fz->t - fpz->t) <= controls.event_tol)
            raise(ErrorKind::Integrity, "f and f' vanish simultaneously near t = " + std::to_string(fz->t));

        for (const auto& ev : events) {
            if (is_f_event(ev.kind)) {
                traj.f_events.push_back(ev);
                if (controls.stop_on_f_event) {
                    traj.samples.push_back(ev.state);
                    traj.final_state = ev.state;
                    traj.termination = Termination::FEvent;
                    return rk::StepAction::Stop;
                }
            } else {
                traj.rho_events.push_back(ev);
            }
        }

        const PhaseState sb = to_state(seg.t1(), yb);
        traj.samples.push_back(sb);
        traj.final_state = sb;
        prev = yb;
        if (std::abs(sb.f) > controls.blowup_bound || std::abs(sb.rho) > controls.blowup_bound ||
            std::abs(sb.fp) > controls.blowup_slope || std::abs(sb.rhop) > controls.blowup_slope) {
            traj.termination = Termination::Blowup;
            return rk::StepAction::Stop;
        }
        return rk::StepAction::Continue;
    };

    const rk::RunEnd end = rk::integrate_adaptive<4>(field, start.t, to_vec(start), controls.t_max, sc, on_step);
    if (end == rk::RunEnd::NonFinite) traj.termination = Termination::Blowup;
    return traj;
}

Trajectory integrate(const PhaseState& start, double lambda_hat, const IntegratorControls& controls) {
    return integrate(start, Equations{lambda_hat}, controls);
}

bool in_tube(const PhaseState& s, double lambda_hat, const IntegratorControls& c) {
    if (lambda_hat > 0.0)
        return std::abs(s.f) < c.tube_f && std::abs(1.0 - s.rho) < c.tube_rho && std::abs(s.fp) < c.tube_slope &&
               std::abs(s.rhop) < c.tube_slope;
    // Without a Higgs mass rho approaches 1 like 1/t, so both the distance and
    // the slope are taken on the extrapolated limit rho + t rho'. Its derivative
    // t rho'' + 2 rho' reduces to 2 f^2 rho / t on solutions.
    const double limit_slope = 2.0 * s.f * s.f * s.rho / s.t;
    return std::abs(s.f) < c.tube_f && std::abs(1.0 - s.rho - s.t * s.rhop) < c.tube_rho &&
           std::abs(s.fp) < c.tube_slope && std::abs(limit_slope) < c.tube_slope;
}

double higgs_growing_mode(const PhaseState& s, double lambda_hat) {
    const double m = std::sqrt(2.0 * std::max(lambda_hat, 0.0));
    return (1.0 + m * s.t) * (1.0 - s.rho) - s.t * s.rhop;
}

namespace {

OutcomeTag tag_of(EventKind k) {
    switch (k) {
        case EventKind::FPrimeZero: return OutcomeTag::FPrimeZero;
        case EventKind::FZero: return OutcomeTag::FZero;
        case EventKind::RhoPrimeZero: return OutcomeTag::RhoPrimeZero;
        case EventKind::RhoZero: return OutcomeTag::RhoZero;
        case EventKind::RhoCrossVev: return OutcomeTag::RhoCrossVev;
        case EventKind::Tangency: break;
    }
    raise(ErrorKind::Integrity, "tangency records carry no outcome");
}

}  // namespace

Outcome classify(const Trajectory& traj, FateMode mode, const IntegratorControls& controls) {
    // Exclusivity over the recorded f-events, in case the scan kept running past the first.
    if (traj.f_events.size() >= 2) {
        const auto& a = traj.f_events[0];
        const auto& b = traj.f_events[1];
        if (a.kind != b.kind && std::abs(a.t - b.t) <= controls.event_tol)
            raise(ErrorKind::Integrity, "f and f' vanish simultaneously near t = " + std::to_string(a.t));
    }
    const auto& events = (mode == FateMode::FFate) ? traj.f_events : traj.rho_events;
    if (!events.empty()) return {tag_of(events.front().kind), events.front().t, events.front().state};
    if (traj.termination == Termination::Blowup) return {OutcomeTag::Blowup, traj.final_state.t, traj.final_state};
    if (in_tube(traj.final_state, traj.lambda_hat, controls))
        return {OutcomeTag::Converged, std::nullopt, traj.final_state};
    return {OutcomeTag::Horizon, std::nullopt, traj.final_state};
}

}  // namespace monopole
