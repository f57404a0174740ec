// One line per acceptance criterion; exits nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "monopole/analysis.hpp"
#include "monopole/errors.hpp"
#include "monopole/integrator.hpp"
#include "monopole/origin_series.hpp"
#include "monopole/shooter.hpp"
#include "oracles.hpp"

using namespace monopole;
using oracle::Rational;

namespace {

struct Verdict {
    bool pass = false;
    std::string details;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Power series in u = t^2 with exact coefficients.
using Series = std::vector<Rational>;

Series inverse(const Series& c) {
    Series d(c.size());
    d[0] = Rational(1) / c[0];
    for (std::size_t n = 1; n < c.size(); ++n) {
        Rational s;
        for (std::size_t k = 1; k <= n; ++k) s = s + c[k] * d[n - k];
        d[n] = -s / c[0];
    }
    return d;
}

Series product(const Series& a, const Series& b) {
    Series p(a.size());
    for (std::size_t n = 0; n < a.size(); ++n)
        for (std::size_t k = 0; k <= n; ++k) p[n] = p[n] + a[k] * b[n - k];
    return p;
}

std::int64_t factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

// t / sinh t and (coth t - 1/t) / t as series in t^2.
void closed_form_series(Series& f, Series& rho_over_t) {
    const int n = 4;
    Series sinh_over_t(n), num(n);
    for (int k = 0; k < n; ++k) {
        sinh_over_t[k] = Rational(1, factorial(2 * k + 1));
        // (t cosh t - sinh t) / t^3
        num[k] = Rational(1, factorial(2 * k + 2)) - Rational(1, factorial(2 * k + 3));
    }
    f = inverse(sinh_over_t);
    rho_over_t = product(num, inverse(sinh_over_t));
}

Verdict bps_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport r = bisect_beta(0.0, ShooterControls{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Series f, rho;
    closed_form_series(f, rho);
    const double a_ref = -static_cast<double>(f[1].num) / static_cast<double>(f[1].den);
    const double b_ref = static_cast<double>(rho[0].num) / static_cast<double>(rho[0].den);
    double err = 0.0;
    for (const PhaseState& s : r.profile.samples) {
        if (s.t < 0.01 || s.t > 10.0) continue;
        const auto o = oracle::ps(s.t);
        err = std::max({err, std::abs(s.f - static_cast<double>(o.f)), std::abs(s.rho - static_cast<double>(o.rho))});
    }
    const bool pass = std::abs(r.alpha_star - a_ref) <= 1e-3 && std::abs(r.beta_star - b_ref) <= 1e-3 &&
                      err < 1e-4 && secs < 30.0;
    return {pass, fmt("alpha*=%.10f (ref %.10f) beta*=%.10f (ref %.10f) max|err| on [0.01,10]=%.3e runtime=%.2fs",
                      r.alpha_star, a_ref, r.beta_star, b_ref, err, secs)};
}

Verdict series_closed_forms() {
    const auto c = series_coefficients_of<Rational>(Rational(1, 6), Rational(1, 3), Rational(0));
    Series f, rho;
    closed_form_series(f, rho);
    const bool pass = c.a4 == f[2] && c.b3 == rho[1] && f[2] == Rational(7, 360) && rho[1] == Rational(-1, 45);
    return {pass, fmt("a4=%lld/%lld b3=%lld/%lld (expansions give %lld/%lld, %lld/%lld)", (long long)c.a4.num,
                      (long long)c.a4.den, (long long)c.b3.num, (long long)c.b3.den, (long long)f[2].num,
                      (long long)f[2].den, (long long)rho[1].num, (long long)rho[1].den)};
}

Verdict picard_contraction() {
    bool pass = true;
    std::string d;
    for (auto [a, b, l] : {std::array{1.0 / 6, 1.0 / 3, 0.0}, std::array{1.0, 1.0, 1.0}}) {
        const ShootPoint sp{a, b};
        const double s_max = contraction_threshold(sp, l);
        const PicardHistory h = picard_verify(sp, l, s_max, 8);
        double worst = 0.0;
        int floored = 0;
        for (double q : h.ratios) {
            if (std::isnan(q)) {
                ++floored;  // previous difference already at round-off
                continue;
            }
            worst = std::max(worst, q);
        }
        pass = pass && worst <= 1.0 / 3.0 + 0.05 && h.ratios.size() == 7;
        d += fmt("(%.4g,%.4g,%g): s_max=%.4f max ratio=%.4f, %d at round-off; ", a, b, l, s_max, worst, floored);
    }
    return {pass, d};
}

Verdict classifier_dichotomy() {
    ShooterControls c;
    bool pass = true;
    std::string d;
    for (auto [alpha, want] : {std::pair{1e-3, OutcomeTag::FPrimeZero}, std::pair{50.0, OutcomeTag::FZero}}) {
        const Outcome o = classify(shoot({alpha, 0.5}, 1.0, c), FateMode::FFate, c.integrator);
        const PhaseState s = initial_state({alpha, 0.5}, 1.0, c.t0);
        const auto ref = oracle::rk4_first_f_event({s.f, s.fp, s.rho, s.rhop}, s.t, 1.0L, 1e-4L, 40.0L);
        const OutcomeTag ref_tag = ref.kind == 0 ? OutcomeTag::FPrimeZero : OutcomeTag::FZero;
        const double dt = o.t_event ? std::abs(*o.t_event - ref.t) : std::numeric_limits<double>::infinity();
        pass = pass && ref.kind >= 0 && o.tag == want && ref_tag == want && dt < 1e-3;
        d += fmt("alpha=%g: %s at t=%.6f, RK4 %s at t=%.6f; ", alpha, std::string(to_string(o.tag)).c_str(),
                 o.t_event.value_or(NAN), ref.kind < 0 ? "none" : std::string(to_string(ref_tag)).c_str(), ref.t);
    }
    return {pass, d};
}

Verdict rho_dichotomy() {
    ShooterControls c;
    bool pass = true;
    std::string d;
    for (double beta : {1e-3, 50.0}) {
        const BetaProbe p = classify_beta(beta, 1.0, c);
        const bool ok = beta < 1.0
                            ? (p.rho_outcome == OutcomeTag::RhoPrimeZero || p.rho_outcome == OutcomeTag::RhoZero)
                            : p.rho_outcome == OutcomeTag::RhoCrossVev;
        pass = pass && ok;
        d += fmt("beta=%g: alpha*=%.6g %s at t=%.4f; ", beta, p.alpha_star,
                 std::string(to_string(p.rho_outcome)).c_str(), p.t_event.value_or(NAN));
    }
    return {pass, d};
}

// Shared unit-coupling solves for criteria 6 to 9.
const SolveReport& unit_solve() {
    static const SolveReport r = bisect_beta(1.0, ShooterControls{});
    return r;
}

Verdict unit_monopole() {
    const SolveReport& r = unit_solve();
    const AuditMargins& m = r.audit.worst_margins;
    const bool margins = m.f_in_01 > 0 && m.fp_negative > 0 && m.rho_in_01 > 0 && m.rhop_positive > 0;
    const bool pass = r.converged() && r.audit.pass() && margins && r.residual_norm < 1e-6 &&
                      std::abs(r.f_fit.rate - 1.0) <= 0.05 && std::abs(r.higgs_fit.rate - std::sqrt(2.0)) <= 0.07;
    return {pass, fmt("converged=%d audit=%d min margin=%.3e residual=%.3e f-rate=%.4f higgs-rate=%.4f (sqrt2=%.4f)",
                      r.converged(), r.audit.pass(), std::min({m.f_in_01, m.fp_negative, m.rho_in_01, m.rhop_positive}),
                      r.residual_norm, r.f_fit.rate, r.higgs_fit.rate, std::sqrt(2.0))};
}

Verdict sturm_probe() {
    const double root = oracle::tan_root();
    const ProbeResult flat = linearized_probe(flat_probe_profile());
    const ProbeResult solved = linearized_probe(make_probe_profile(unit_solve().profile.samples, 1.0));
    const bool pass = flat.first_zero && std::abs(*flat.first_zero - root) <= 1e-3 &&
                      std::abs(*flat.first_zero - 4.4934) <= 1e-3 && solved.first_zero && *solved.first_zero <= 4.4944;
    return {pass, fmt("flat zero=%.8f (tan t = t root %.8f) solved-profile zero=%.6f", flat.first_zero.value_or(NAN),
                      root, solved.first_zero.value_or(NAN))};
}

Verdict handoff_insensitivity() {
    ShooterControls c;
    c.t0 = 5e-4;
    const SolveReport r = bisect_beta(1.0, c);
    const double da = std::abs(r.alpha_star - unit_solve().alpha_star);
    const double db = std::abs(r.beta_star - unit_solve().beta_star);
    return {da < 1e-7 && db < 1e-7, fmt("|d alpha*|=%.3e |d beta*|=%.3e", da, db)};
}

// Closed-form energy density integrated in extended precision.
double closed_form_mass() {
    auto density = [](oracle::real t) {
        const auto p = oracle::ps(t);
        const oracle::real f2m1 = p.f * p.f - 1;
        return p.fp * p.fp + f2m1 * f2m1 / (2 * t * t) + p.f * p.f * p.rho * p.rho + t * t * p.rhop * p.rhop / 2;
    };
    const oracle::real a = 1e-4L, b = 200.0L;
    const int n = 400000;
    const oracle::real h = (b - a) / n;
    oracle::real sum = 0;  // Simpson
    for (int k = 0; k <= n; ++k) sum += (k == 0 || k == n ? 1 : (k % 2 ? 4 : 2)) * density(a + k * h);
    // The density vanishes at the origin and falls like 1 / t^2 far out.
    return static_cast<double>(sum * h / 3 + 1 / b);
}

Verdict energy_sanity() {
    const double ref = closed_form_mass();
    const double e0 = bisect_beta(0.0, ShooterControls{}).energy;
    const double e1 = unit_solve().energy;
    const bool pass = std::abs(ref - 1.0) <= 1e-3 && std::abs(e0 - ref) <= 1e-3 && e1 > 1.0;
    return {pass, fmt("lambda_hat=0 mass=%.7f (closed-form quadrature %.7f) lambda_hat=1 mass=%.6f", e0, ref, e1)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"BPS oracle equivalence", bps_equivalence},
        {"series closed forms", series_closed_forms},
        {"Picard contraction", picard_contraction},
        {"classifier dichotomy", classifier_dichotomy},
        {"rho-fate dichotomy", rho_dichotomy},
        {"unit-coupling monopole", unit_monopole},
        {"Sturm probe", sturm_probe},
        {"handoff insensitivity", handoff_insensitivity},
        {"energy sanity", energy_sanity},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, run] : criteria) {
        ++n;
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", n, name, v.details.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
