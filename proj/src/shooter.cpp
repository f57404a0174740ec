#include "monopole/shooter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "monopole/errors.hpp"

namespace monopole {

void ShooterControls::validate() const {
    if (!(tol_alpha > 0.0) || !(tol_beta > 0.0)) raise(ErrorKind::Precondition, "tolerances must be positive");
    if (!(t0 > 0.0) || t0 > kMaxHandoff) raise(ErrorKind::HandoffDomain, "t0 must lie in (0, 1e-2]");
    if (!(alpha_seed > 0.0) || !(beta_seed > 0.0)) raise(ErrorKind::Precondition, "seeds must be positive");
    if (!(expand_factor > 1.0)) raise(ErrorKind::Precondition, "expand_factor must exceed 1");
    if (!(search_lower > 0.0) || !(search_upper > search_lower))
        raise(ErrorKind::Precondition, "search bounds must satisfy 0 < lower < upper");
    if (horizon_doublings < 0) raise(ErrorKind::Precondition, "horizon_doublings must be >= 0");
    if (!(graft_margin_f >= 0.0) || !(graft_margin_rho >= 0.0) || !(fit_window > 0.0) || !(sample_step > 0.0))
        raise(ErrorKind::Precondition, "graft margin, fit window and sample step must be positive");
    if (!(t_report > t0)) raise(ErrorKind::Precondition, "t_report must exceed t0");
    integrator.validate(t0);
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

bool is_f_tag(OutcomeTag t) { return t == OutcomeTag::FPrimeZero || t == OutcomeTag::FZero; }

struct Shot {
    Trajectory traj;
    Outcome outcome;
    double t_max = 0.0;
};

// Shoots with t_max extended up to 2^horizon_doublings times while the f-fate is unresolved.
Shot shoot_resolved(double alpha, double beta, double lambda_hat, const ShooterControls& c) {
    Shot s;
    s.t_max = c.integrator.t_max;
    for (int k = 0;; ++k) {
        s.traj = shoot({alpha, beta}, lambda_hat, c, s.t_max);
        s.outcome = classify(s.traj, FateMode::FFate, c.integrator);
        const bool unresolved = s.outcome.tag == OutcomeTag::Horizon || s.outcome.tag == OutcomeTag::Converged;
        if (!unresolved || k >= c.horizon_doublings) return s;
        s.t_max *= 2.0;
    }
}

}  // namespace

Trajectory shoot(const ShootPoint& sp, double lambda_hat, const ShooterControls& controls,
                 std::optional<double> t_max) {
    IntegratorControls ic = controls.integrator;
    if (t_max) ic.t_max = *t_max;
    const PhaseState start = initial_state(sp, lambda_hat, controls.t0);
    return integrate(start, controls.equations(lambda_hat), ic);
}

Bracket bracket_alpha(double beta, double lambda_hat, const ShooterControls& c, std::vector<AlphaProbe>* log) {
    if (!(beta > 0.0)) raise(ErrorKind::Precondition, "bracket_alpha needs beta > 0");
    auto probe = [&](double a) {
        const Trajectory traj = shoot({a, beta}, lambda_hat, c);
        const Outcome out = classify(traj, FateMode::FFate, c.integrator);
        if (log) log->push_back({a, out.tag, out.t_event, c.integrator.t_max});
        return out.tag;
    };
    auto failure = [&](double lo, OutcomeTag lo_tag, double hi, OutcomeTag hi_tag) {
        raise(ErrorKind::BracketingFailure,
              "no FPrimeZero/FZero pair for beta = " + fmt(beta) + ": alpha = " + fmt(lo) + " gives " +
                  std::string(to_string(lo_tag)) + ", alpha = " + fmt(hi) + " gives " +
                  std::string(to_string(hi_tag)));
    };

    Bracket b;
    const double seed = c.alpha_seed;
    const OutcomeTag seed_tag = probe(seed);

    // Walk downward from `from` until an FPrimeZero; FZero points tighten hi.
    auto walk_down = [&](double from, OutcomeTag from_tag) {
        double a = from;
        OutcomeTag tag = from_tag;
        while (tag != OutcomeTag::FPrimeZero) {
            if (tag == OutcomeTag::FZero) {
                b.hi = a;
                b.hi_outcome = tag;
            }
            a /= c.expand_factor;
            if (a < c.search_lower) failure(a * c.expand_factor, tag, from, from_tag);
            tag = probe(a);
        }
        b.lo = a;
        b.lo_outcome = tag;
    };
    auto walk_up = [&](double from, OutcomeTag from_tag) {
        double a = from;
        OutcomeTag tag = from_tag;
        while (tag != OutcomeTag::FZero) {
            if (tag == OutcomeTag::FPrimeZero) {
                b.lo = a;
                b.lo_outcome = tag;
            }
            a *= c.expand_factor;
            if (a > c.search_upper) failure(from, from_tag, a / c.expand_factor, tag);
            tag = probe(a);
        }
        b.hi = a;
        b.hi_outcome = tag;
    };

    if (seed_tag == OutcomeTag::FPrimeZero) {
        walk_up(seed, seed_tag);
    } else if (seed_tag == OutcomeTag::FZero) {
        walk_down(seed, seed_tag);
    } else {
        walk_down(seed, seed_tag);
        walk_up(seed, seed_tag);
    }
    return b;
}

AlphaResult bisect_alpha(const Bracket& bracket, double beta, double lambda_hat, const ShooterControls& c) {
    if (!(bracket.lo < bracket.hi) || bracket.lo_outcome != OutcomeTag::FPrimeZero ||
        bracket.hi_outcome != OutcomeTag::FZero)
        raise(ErrorKind::Precondition, "bisect_alpha needs lo < hi with FPrimeZero at lo and FZero at hi");
    AlphaResult r;
    r.bracket = bracket;
    while (r.bracket.width() > c.tol_alpha) {
        const double mid = r.bracket.mid();
        if (mid <= r.bracket.lo || mid >= r.bracket.hi) break;
        Shot s = shoot_resolved(mid, beta, lambda_hat, c);
        r.log.push_back({mid, s.outcome.tag, s.outcome.t_event, s.t_max});
        if (!is_f_tag(s.outcome.tag)) {
            r.alpha_star = mid;
            r.trajectory = std::move(s.traj);
            if (s.outcome.tag == OutcomeTag::Blowup) {
                const bool rho_first = std::any_of(r.trajectory.rho_events.begin(), r.trajectory.rho_events.end(),
                                                   [](const EventRecord& e) { return e.kind == EventKind::RhoCrossVev; });
                if (!rho_first)
                    raise(ErrorKind::Integrity, "alpha midpoint " + fmt(mid) + " at beta = " + fmt(beta) +
                                                    " blew up at t = " + fmt(r.trajectory.t_end()) +
                                                    " without an f-event");
                r.higgs_runaway = true;
            } else {
                r.separatrix_at_horizon = true;
            }
            return r;
        }
        if (s.outcome.tag == OutcomeTag::FPrimeZero) {
            r.bracket.lo = mid;
        } else {
            r.bracket.hi = mid;
        }
        ++r.iterations;
    }
    r.alpha_star = r.bracket.mid();
    r.trajectory = shoot_resolved(r.alpha_star, beta, lambda_hat, c).traj;
    return r;
}

AlphaResult alpha_star(double beta, double lambda_hat, const ShooterControls& c) {
    std::vector<AlphaProbe> log;
    const Bracket b = bracket_alpha(beta, lambda_hat, c, &log);
    AlphaResult r = bisect_alpha(b, beta, lambda_hat, c);
    log.insert(log.end(), r.log.begin(), r.log.end());
    r.log = std::move(log);
    return r;
}

std::string_view to_string(BetaSide side) noexcept {
    return side == BetaSide::TooSmall ? "too_small" : "too_large";
}

BetaProbe classify_beta(double beta, double lambda_hat, const ShooterControls& c, AlphaResult* alpha_out) {
    AlphaResult ar = alpha_star(beta, lambda_hat, c);
    const Outcome rho = classify(ar.trajectory, FateMode::RhoFate, c.integrator);
    BetaProbe p;
    p.beta = beta;
    p.alpha_star = ar.alpha_star;
    p.rho_outcome = rho.tag;
    p.t_event = rho.t_event;
    p.growing_mode = higgs_growing_mode(ar.trajectory.final_state, lambda_hat);
    switch (rho.tag) {
        case OutcomeTag::RhoPrimeZero:
        case OutcomeTag::RhoZero: p.side = BetaSide::TooSmall; break;
        case OutcomeTag::RhoCrossVev: p.side = BetaSide::TooLarge; break;
        default: p.side = p.growing_mode > 0.0 ? BetaSide::TooSmall : BetaSide::TooLarge; break;
    }
    if (alpha_out) *alpha_out = std::move(ar);
    return p;
}

std::vector<PhaseState> resample(const Trajectory& traj, double t_stop, double h) {
    if (!(h > 0.0)) raise(ErrorKind::Precondition, "resample step must be positive");
    const double t_begin = traj.t_begin();
    t_stop = std::min(t_stop, traj.t_end());
    const auto n = static_cast<std::size_t>(std::floor((t_stop - t_begin) / h + 1e-9));
    std::vector<PhaseState> out;
    out.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out.push_back(traj.at(std::min(t_begin + static_cast<double>(k) * h, t_stop)));
    return out;
}

GraftResult graft_tail(std::vector<PhaseState> samples, double lambda_hat, double t_graft,
                       const ShooterControls& c) {
    if (samples.size() < 2) raise(ErrorKind::GraftDomain, "nothing to graft onto");
    while (samples.size() > 1 && samples.back().t > t_graft) samples.pop_back();
    const PhaseState edge = samples.back();
    if (!in_tube(edge, lambda_hat, c.integrator))
        raise(ErrorKind::GraftDomain, "profile is outside the convergence tube at t_graft = " + fmt(edge.t) +
                                          " (f = " + fmt(edge.f) + ", rho = " + fmt(edge.rho) + ")");
    GraftResult g;
    const double a = edge.t - c.fit_window;
    g.f_fit = fit_decay(samples, a, edge.t, DecayComponent::F, lambda_hat);
    g.higgs_fit = fit_decay(samples, a, edge.t, DecayComponent::OneMinusRho, lambda_hat);
    g.mismatch = std::max(std::abs(g.f_fit.value(edge.t) - edge.f), std::abs(g.higgs_fit.value(edge.t) - (1.0 - edge.rho)));
    const double limit = 10.0 * std::max(c.integrator.tube_f, c.integrator.tube_rho);
    if (g.mismatch > limit)
        raise(ErrorKind::GraftDomain, "fitted tail misses the profile by " + fmt(g.mismatch) + " at t_graft");

    const double h = samples.size() >= 2 ? samples[1].t - samples[0].t : c.sample_step;
    const double t_first = samples.front().t;
    const std::size_t k0 = samples.size();
    for (std::size_t k = k0;; ++k) {
        const double t = t_first + static_cast<double>(k) * h;
        if (t > c.t_report + 1e-9 * h) break;
        samples.push_back({t, g.f_fit.value(t), g.f_fit.derivative(t), 1.0 - g.higgs_fit.value(t),
                           -g.higgs_fit.derivative(t)});
    }
    g.profile.lambda_hat = lambda_hat;
    g.profile.t_graft = edge.t;
    g.profile.samples = std::move(samples);
    g.profile.converged = true;
    return g;
}

double profile_energy(const Profile& profile, const DecayFit& f_fit, const DecayFit& higgs_fit) {
    const double body = integrate_energy(profile.samples, profile.lambda_hat);
    const double T = profile.samples.back().t;
    // Past T substitute t = T / x and integrate over x in (0, 1] by the midpoint rule.
    constexpr int n = 4000;
    double tail = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n;
        const double t = T / x;
        const PhaseState s{t, f_fit.value(t), f_fit.derivative(t), 1.0 - higgs_fit.value(t), -higgs_fit.derivative(t)};
        tail += energy_density(s, profile.lambda_hat) * T / (x * x);
    }
    return body + tail / n;
}

SolveReport bisect_beta(double lambda_hat, const ShooterControls& c) {
    if (!(lambda_hat >= 0.0) || !std::isfinite(lambda_hat))
        raise(ErrorKind::ParameterDomain, "lambda_hat must be finite and >= 0");
    c.validate();
    SolveReport rep;
    rep.lambda_hat = lambda_hat;

    auto probe = [&](double beta) {
        BetaProbe p;
        try {
            p = classify_beta(beta, lambda_hat, c);
        } catch (const Error& e) {
            std::string log;
            for (const auto& q : rep.beta_log)
                log += " [beta " + fmt(q.beta) + ": " + std::string(to_string(q.rho_outcome)) + "]";
            raise(ErrorKind::BracketingFailure,
                  "beta probe " + fmt(beta) + " failed (" + e.what() + "); probes so far:" + log);
        }
        rep.beta_log.push_back(p);
        return p.side;
    };
    auto out_of_range = [&](double beta) {
        std::string log;
        for (const auto& q : rep.beta_log)
            log += " [beta " + fmt(q.beta) + ": " + std::string(to_string(q.rho_outcome)) + "]";
        raise(ErrorKind::BracketingFailure, "no too-small/too-large dichotomy in beta before " + fmt(beta) + ":" + log);
    };

    BetaBracket bb;
    double beta = c.beta_seed;
    if (probe(beta) == BetaSide::TooSmall) {
        bb.lo = beta;
        for (;;) {
            beta *= c.expand_factor;
            if (beta > c.search_upper) out_of_range(beta);
            if (probe(beta) == BetaSide::TooLarge) break;
            bb.lo = beta;
        }
        bb.hi = beta;
    } else {
        bb.hi = beta;
        for (;;) {
            beta /= c.expand_factor;
            if (beta < c.search_lower) out_of_range(beta);
            if (probe(beta) == BetaSide::TooSmall) break;
            bb.hi = beta;
        }
        bb.lo = beta;
    }

    auto finish = [&](const Trajectory& traj, double t_graft) {
        GraftResult g = graft_tail(resample(traj, t_graft, c.sample_step), lambda_hat, t_graft, c);
        rep.t_graft = g.profile.t_graft;
        rep.f_fit = g.f_fit;
        rep.higgs_fit = g.higgs_fit;
        rep.graft_mismatch = g.mismatch;
        rep.profile = std::move(g.profile);

        const auto& s = rep.profile.samples;
        auto body_end = std::find_if(s.begin(), s.end(), [&](const PhaseState& p) { return p.t > rep.t_graft; });
        rep.residual_norm = residual_norm(std::span<const PhaseState>(s.begin(), body_end), lambda_hat);
        rep.audit = monotonicity_audit(rep.profile);
        rep.energy = profile_energy(rep.profile, rep.f_fit, rep.higgs_fit);
    };

    auto bisect_to = [&](double tol) {
        while (bb.width() > tol) {
            const double mid = bb.mid();
            if (mid <= bb.lo || mid >= bb.hi) return false;
            (probe(mid) == BetaSide::TooSmall ? bb.lo : bb.hi) = mid;
            ++rep.beta_iterations;
        }
        return true;
    };
    bisect_to(c.tol_beta);

    // When the separatrix departure comes before the tube is reached, keep
    // narrowing the beta bracket: each factor 16 pushes the first event later.
    double tol = c.tol_beta;
    for (;;) {
        rep.beta_bracket = bb;
        rep.beta_star = bb.mid();
        AlphaResult ar = alpha_star(rep.beta_star, lambda_hat, c);
        rep.alpha_star = ar.alpha_star;
        rep.alpha_bracket = ar.bracket;
        const Trajectory& traj = ar.trajectory;
        rep.final_outcome = classify(traj, FateMode::FFate, c.integrator).tag;
        rep.tangencies = traj.tangencies.size();

        // The separatrix departure grows like e^{2t} against the f decay and like
        // e^{2 sqrt(2 lambda_hat) t} against the Higgs decay, hence separate margins.
        double t_graft = traj.t_end();
        if (!traj.f_events.empty()) t_graft = std::min(t_graft, traj.f_events.front().t - c.graft_margin_f);
        if (!traj.rho_events.empty()) t_graft = std::min(t_graft, traj.rho_events.front().t - c.graft_margin_rho);
        const bool room = t_graft - c.fit_window > traj.t_begin();
        const bool tube = room && in_tube(traj.at(t_graft), lambda_hat, c.integrator);
        if (tube || rep.beta_refinements >= c.max_beta_refinements) {
            if (!room)
                raise(ErrorKind::GraftDomain, "events at t <= " + fmt(t_graft) + " leave no room for the tail fit");
            finish(traj, t_graft);
            return rep;
        }
        tol = std::min(tol, bb.width()) / 16.0;
        if (!bisect_to(tol)) rep.beta_refinements = c.max_beta_refinements;
        ++rep.beta_refinements;
    }
}

std::vector<SweepCell> sweep(const std::vector<double>& alphas, const std::vector<double>& betas, double lambda_hat,
                             const ShooterControls& c, unsigned threads) {
    for (double v : alphas)
        if (!std::isfinite(v) || v < 0.0) raise(ErrorKind::Precondition, "sweep grid values must be finite and >= 0");
    for (double v : betas)
        if (!std::isfinite(v) || v < 0.0) raise(ErrorKind::Precondition, "sweep grid values must be finite and >= 0");
    std::vector<SweepCell> cells(alphas.size() * betas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i)
        for (std::size_t j = 0; j < betas.size(); ++j) {
            cells[i * betas.size() + j].alpha = alphas[i];
            cells[i * betas.size() + j].beta = betas[j];
        }

    auto run = [&](SweepCell& cell) {
        try {
            const Trajectory traj = shoot({cell.alpha, cell.beta}, lambda_hat, c);
            Outcome out = classify(traj, FateMode::FFate, c.integrator);
            if (!is_f_tag(out.tag)) out = classify(traj, FateMode::RhoFate, c.integrator);
            cell.outcome = out.tag;
            cell.t_event = out.t_event;
            cell.t_end = traj.t_end();
        } catch (const Error&) {
            cell.outcome = OutcomeTag::Blowup;
            cell.t_event.reset();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, cells.size())));
    if (threads <= 1) {
        for (auto& cell : cells) run(cell);
        return cells;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < cells.size(); i = next++) run(cells[i]);
        });
    for (auto& th : pool) th.join();
    return cells;
}

SolveReport solve(const ModelParams& params, const ShooterControls& controls) {
    params.validate();
    return bisect_beta(nondimensionalize(params).lambda_hat, controls);
}

}  // namespace monopole
