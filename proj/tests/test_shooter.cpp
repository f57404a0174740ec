#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "monopole/errors.hpp"
#include "monopole/shooter.hpp"
#include "oracles.hpp"

using namespace monopole;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Integrity;
}

// The ordinary equations in physical units, independent of the reduction.
struct PhysicalEvent {
    int kind = -1;  // 0: f' rises through 0, 1: f falls through 0
    double r = 0.0;
};

PhysicalEvent physical_rk4(double alpha, double beta, double lambda, double g0, double rho0, double h, double r_max) {
    using real = long double;
    auto rhs = [&](real r, const std::array<real, 4>& y) {
        const real f = y[0], p = y[2];
        return std::array<real, 4>{y[1], f * (f * f - 1) / (r * r) + g0 * g0 * p * p * f, y[3],
                                   -2 / r * y[3] + 2 * f * f * p / (r * r) + lambda * (p * p - rho0 * rho0) * p};
    };
    real r = 1e-3L / (g0 * rho0);
    std::array<real, 4> y{1 - alpha * r * r, -2 * alpha * r, beta * r, beta};
    while (r < r_max) {
        auto k1 = rhs(r, y);
        std::array<real, 4> z;
        for (int i = 0; i < 4; ++i) z[i] = y[i] + h / 2 * k1[i];
        auto k2 = rhs(r + h / 2, z);
        for (int i = 0; i < 4; ++i) z[i] = y[i] + h / 2 * k2[i];
        auto k3 = rhs(r + h / 2, z);
        for (int i = 0; i < 4; ++i) z[i] = y[i] + h * k3[i];
        auto k4 = rhs(r + h, z);
        std::array<real, 4> yn;
        for (int i = 0; i < 4; ++i) yn[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (y[0] > 0 && yn[0] <= 0) return {1, static_cast<double>(r + h * y[0] / (y[0] - yn[0]))};
        if (y[1] < 0 && yn[1] >= 0 && yn[0] > 0 && yn[0] < 1)
            return {0, static_cast<double>(r + h * -y[1] / (yn[1] - y[1]))};
        y = yn;
        r += h;
    }
    return {};
}

}  // namespace

TEST_CASE("alpha bracket contains the closed-form value") {
    ShooterControls c;
    const Bracket b = bracket_alpha(1.0 / 3.0, 0.0, c);
    CHECK(b.lo < 1.0 / 6.0);
    CHECK(b.hi > 1.0 / 6.0);
    CHECK(b.lo_outcome == OutcomeTag::FPrimeZero);
    CHECK(b.hi_outcome == OutcomeTag::FZero);

    const Bracket b1 = bracket_alpha(0.5, 1.0, c);
    CHECK(b1.lo_outcome == OutcomeTag::FPrimeZero);
    CHECK(b1.hi_outcome == OutcomeTag::FZero);
    CHECK(b1.lo < b1.hi);

    CHECK(kind_of([&] { bracket_alpha(0.0, 1.0, c); }) == ErrorKind::Precondition);
    CHECK(kind_of([&] { bracket_alpha(-1.0, 1.0, c); }) == ErrorKind::Precondition);
}

TEST_CASE("alpha bisection converges at the expected rate") {
    ShooterControls c;
    c.tol_alpha = 1e-6;
    const Bracket b = bracket_alpha(1.0 / 3.0, 0.0, c);
    const AlphaResult r = bisect_alpha(b, 1.0 / 3.0, 0.0, c);
    CHECK(std::abs(r.alpha_star - 1.0 / 6.0) < 1e-4);
    CHECK(r.bracket.width() <= c.tol_alpha);
    if (!r.separatrix_at_horizon && !r.higgs_runaway)
        CHECK(r.iterations == static_cast<int>(std::ceil(std::log2(b.width() / c.tol_alpha))));
    CHECK(r.bracket.lo_outcome == OutcomeTag::FPrimeZero);
    CHECK(r.bracket.hi_outcome == OutcomeTag::FZero);

    // Every probe refines: f' zeros sit below alpha*, f zeros above.
    for (const AlphaProbe& p : r.log) {
        if (p.tag == OutcomeTag::FPrimeZero) CHECK(p.alpha <= r.bracket.lo);
        if (p.tag == OutcomeTag::FZero) CHECK(p.alpha >= r.bracket.hi);
    }
}

TEST_CASE("classification sides agree with the independent integrator") {
    ShooterControls c;
    for (double a : {0.02, 0.1, 0.25, 1.0}) {
        const Trajectory t = shoot({a, 0.5}, 1.0, c);
        const Outcome o = classify(t, FateMode::FFate, c.integrator);
        const PhaseState s = initial_state({a, 0.5}, 1.0, c.t0);
        const auto ref = oracle::rk4_first_f_event({s.f, s.fp, s.rho, s.rhop}, s.t, 1.0L, 1e-4L, 12.0L);
        REQUIRE(ref.kind >= 0);
        CHECK(o.tag == (ref.kind == 0 ? OutcomeTag::FPrimeZero : OutcomeTag::FZero));
        REQUIRE(o.t_event.has_value());
        CHECK(std::abs(*o.t_event - ref.t) < 1e-3);
    }
}

TEST_CASE("beta bisection reproduces the closed form at zero coupling") {
    ShooterControls c;
    const SolveReport r = bisect_beta(0.0, c);
    CHECK(r.converged());
    CHECK(std::abs(r.alpha_star - 1.0 / 6.0) < 1e-6);
    CHECK(std::abs(r.beta_star - 1.0 / 3.0) < 1e-6);
    CHECK(r.beta_bracket.width() <= c.tol_beta);
    CHECK(r.audit.pass());

    double err = 0.0;
    for (const PhaseState& s : r.profile.samples) {
        const auto o = oracle::ps(s.t);
        err = std::max({err, std::abs(s.f - static_cast<double>(o.f)), std::abs(s.rho - static_cast<double>(o.rho))});
    }
    CHECK(err < 1e-4);
    CHECK(r.profile.samples.back().t == doctest::Approx(c.t_report).epsilon(1e-6));
    CHECK(r.energy == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.residual_norm < 1e-5);

    // Graft quality on the known tails: f ~ 2 t e^{-t}, 1 - rho ~ 1/t.
    CHECK(r.f_fit.rate == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r.higgs_fit.law == DecayLaw::Power);
    CHECK(r.higgs_fit.rate == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r.higgs_fit.amplitude == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("unit coupling solve") {
    ShooterControls c;
    const SolveReport r = bisect_beta(1.0, c);
    CHECK(r.converged());
    CHECK(r.audit.pass());
    CHECK(r.residual_norm < 1e-5);
    CHECK(r.higgs_fit.law == DecayLaw::Exponential);
    CHECK(r.higgs_fit.rate == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
    CHECK(r.f_fit.rate == doctest::Approx(1.0).epsilon(0.05));
    // Above the BPS energy for positive coupling.
    CHECK(r.energy > 1.0);

    // The midpoint trajectory survives well past the origin region.
    const Trajectory t = shoot({r.alpha_star, r.beta_star}, 1.0, c);
    CHECK(t.t_end() > 6.0);

    // Sides of the beta bracket.
    const BetaProbe lo = classify_beta(r.beta_bracket.lo, 1.0, c);
    const BetaProbe hi = classify_beta(r.beta_bracket.hi, 1.0, c);
    CHECK(lo.side == BetaSide::TooSmall);
    CHECK(hi.side == BetaSide::TooLarge);

    // Independent of the handoff radius.
    ShooterControls c2 = c;
    c2.t0 = 5e-4;
    const SolveReport r2 = bisect_beta(1.0, c2);
    CHECK(r2.alpha_star == doctest::Approx(r.alpha_star).epsilon(1e-6));
    CHECK(r2.beta_star == doctest::Approx(r.beta_star).epsilon(1e-6));
}

TEST_CASE("higgs rate at lambda_hat = 2 with a tight beta tolerance") {
    ShooterControls c;
    c.tol_beta = 1e-14;
    const SolveReport r = bisect_beta(2.0, c);
    CHECK(r.converged());
    CHECK(r.higgs_fit.rate == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("a loose beta tolerance skips the bisection") {
    ShooterControls c;
    c.tol_beta = 1e6;
    c.max_beta_refinements = 0;
    try {
        const SolveReport r = bisect_beta(0.0, c);
        CHECK(r.beta_iterations == 0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GraftDomain);
    }
}

TEST_CASE("graft rejects samples outside the tube") {
    std::vector<PhaseState> s;
    for (int k = 0; k <= 4000; ++k) s.push_back(ps_exact(1e-3 + 1e-3 * k));
    ShooterControls c;
    CHECK(kind_of([&] { graft_tail(s, 0.0, 4.0, c); }) == ErrorKind::GraftDomain);

    std::vector<PhaseState> ok;
    for (int k = 0; k <= 12000; ++k) ok.push_back(ps_exact(1e-3 + 1e-3 * k));
    const GraftResult g = graft_tail(ok, 0.0, 12.0, c);
    CHECK(g.profile.samples.back().t == doctest::Approx(c.t_report).epsilon(1e-6));
    double err = 0.0;
    for (const PhaseState& p : g.profile.samples) {
        const auto o = oracle::ps(p.t);
        err = std::max(err, std::abs(p.f - static_cast<double>(o.f)));
    }
    CHECK(err < 1e-4);
    CHECK(profile_energy(g.profile, g.f_fit, g.higgs_fit) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("sweep tags") {
    ShooterControls c;
    const std::vector<double> alphas{0.01, 0.04, 4.0, 10.0};
    const std::vector<double> betas{0.1, 0.5};
    const auto cells = sweep(alphas, betas, 1.0, c);
    REQUIRE(cells.size() == 8);
    for (const SweepCell& cell : cells) {
        const PhaseState s = initial_state({cell.alpha, cell.beta}, 1.0, c.t0);
        const auto ref = oracle::rk4_first_f_event({s.f, s.fp, s.rho, s.rhop}, s.t, 1.0L, 1e-4L, 12.0L);
        if (ref.kind < 0) continue;  // no f-event: tagged by the rho fate instead
        CHECK(cell.outcome == (ref.kind == 0 ? OutcomeTag::FPrimeZero : OutcomeTag::FZero));
        if (cell.alpha >= 4.0) CHECK(cell.outcome == OutcomeTag::FZero);
    }
    CHECK(cells[0].alpha == 0.01);
    CHECK(cells[0].beta == 0.1);
    CHECK(cells[1].beta == 0.5);

    const auto single = sweep({0.3}, {0.5}, 1.0, c);
    REQUIRE(single.size() == 1);
    const Outcome o = classify(shoot({0.3, 0.5}, 1.0, c), FateMode::FFate, c.integrator);
    CHECK(single[0].outcome == o.tag);

    const auto threaded = sweep(alphas, betas, 1.0, c, 4);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(threaded[i].outcome == cells[i].outcome);
        CHECK(threaded[i].t_event == cells[i].t_event);
    }
}

TEST_CASE("physical units round trip") {
    ShooterControls c;
    const SolveReport phys = solve({4.0, 2.0, 3.0}, c);
    const SolveReport dimless = bisect_beta(1.0, c);
    CHECK(phys.lambda_hat == doctest::Approx(1.0));
    CHECK(phys.alpha_star == doctest::Approx(dimless.alpha_star).epsilon(1e-12));
    CHECK(phys.beta_star == doctest::Approx(dimless.beta_star).epsilon(1e-12));

    // The physical equations classify the converted shoot points the same way.
    const ScaledParams sc = nondimensionalize({4.0, 2.0, 3.0});
    for (double a_hat : {0.05, 2.0}) {
        const double alpha = a_hat * 36.0;  // alpha_hat g0^2 rho0^2
        const double beta = 0.5 * 2.0 * 9.0;  // beta_hat g0 rho0^2
        CHECK(sc.alpha_to_scaled(alpha) == doctest::Approx(a_hat));
        CHECK(sc.beta_to_scaled(beta) == doctest::Approx(0.5));
        const PhysicalEvent pe = physical_rk4(alpha, beta, 4.0, 2.0, 3.0, 2e-5, 2.0);
        const Outcome o = classify(shoot({a_hat, 0.5}, 1.0, c), FateMode::FFate, c.integrator);
        REQUIRE(pe.kind >= 0);
        CHECK(o.tag == (pe.kind == 0 ? OutcomeTag::FPrimeZero : OutcomeTag::FZero));
        CHECK(std::abs(*o.t_event * sc.r_scale - pe.r) < 1e-3 * sc.r_scale);
    }
}

TEST_CASE("controls validation") {
    ShooterControls c;
    c.tol_alpha = 0.0;
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Precondition);
    ShooterControls d;
    d.expand_factor = 1.0;
    CHECK(kind_of([&] { d.validate(); }) == ErrorKind::Precondition);
    CHECK(to_string(BetaSide::TooSmall) == "too_small");
    CHECK(to_string(BetaSide::TooLarge) == "too_large");
}
