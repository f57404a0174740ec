#include "monopole/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "monopole/dormand_prince.hpp"
#include "monopole/errors.hpp"

namespace monopole {

AuditReport monotonicity_audit(std::span<const PhaseState> samples, double lambda_hat) {
    AuditReport r;
    constexpr double inf = std::numeric_limits<double>::infinity();
    AuditMargins m{inf, inf, inf, inf};
    for (const auto& s : samples) {
        m.f_in_01 = std::min({m.f_in_01, s.f, 1.0 - s.f});
        m.fp_negative = std::min(m.fp_negative, -s.fp);
        m.rho_in_01 = std::min({m.rho_in_01, s.rho, 1.0 - s.rho});
        m.rhop_positive = std::min(m.rhop_positive, s.rhop);
    }
    r.samples_checked = samples.size();
    if (samples.empty()) return r;
    r.worst_margins = m;
    r.f_in_01 = m.f_in_01 > 0.0;
    r.fp_negative = m.fp_negative > 0.0;
    r.rho_in_01 = m.rho_in_01 > 0.0;
    r.rhop_positive = m.rhop_positive > 0.0;
    if (samples.size() >= 5) r.residual_max = residual_norm(samples, lambda_hat);
    return r;
}

AuditReport monotonicity_audit(const Profile& profile) {
    if (!profile.converged) raise(ErrorKind::AuditDomain, "monotonicity audit needs a converged profile");
    if (profile.samples.size() < 2) raise(ErrorKind::AuditDomain, "profile has fewer than two samples");
    const double t0 = profile.samples.front().t;
    auto first = std::find_if(profile.samples.begin(), profile.samples.end(),
                              [t0](const PhaseState& s) { return s.t > t0; });
    auto last = std::find_if(first, profile.samples.end(),
                             [&](const PhaseState& s) { return s.t > profile.t_graft; });
    return monotonicity_audit(std::span<const PhaseState>(first, last), profile.lambda_hat);
}

namespace {

// Three-point derivative at the middle node of a nonuniform stencil.
double central(double t0, double y0, double t1, double y1, double t2, double y2) {
    const double h1 = t1 - t0;
    const double h2 = t2 - t1;
    return -h2 / (h1 * (h1 + h2)) * y0 + (h2 - h1) / (h1 * h2) * y1 + h1 / (h2 * (h1 + h2)) * y2;
}

}  // namespace

double residual_norm(std::span<const PhaseState> samples, double lambda_hat) {
    if (samples.size() < 5)
        raise(ErrorKind::TooFewSamples, "residual needs at least 5 samples, got " + std::to_string(samples.size()));
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const auto& a = samples[i - 1];
        const auto& s = samples[i];
        const auto& b = samples[i + 1];
        if (!(a.t < s.t && s.t < b.t)) raise(ErrorKind::Precondition, "samples must be strictly increasing in t");
        const double fpp = central(a.t, a.fp, s.t, s.fp, b.t, b.fp);
        const double rpp = central(a.t, a.rhop, s.t, s.rhop, b.t, b.rhop);
        const Derivs d = rhs(s.t, s, lambda_hat);
        worst = std::max({worst, std::abs(fpp - d.dfp), std::abs(rpp - d.drhop)});
    }
    return worst;
}

ProbeProfile make_probe_profile(std::span<const PhaseState> samples, double lambda_hat) {
    if (samples.size() < 2) raise(ErrorKind::Precondition, "probe profile needs at least two samples");
    if (lambda_hat < 0.0) raise(ErrorKind::ParameterDomain, "lambda_hat must be >= 0");
    const double scale = lambda_hat > 0.0 ? std::sqrt(lambda_hat) : 1.0;
    std::vector<PhaseState> pts(samples.begin(), samples.end());
    ProbeProfile out;
    out.mass_term = lambda_hat > 0.0;
    out.tau_max = pts.back().t * scale;
    out.p = [pts = std::move(pts), scale](double tau) {
        const double r = tau / scale;
        const auto& head = pts.front();
        if (r <= head.t) return 1.0 - (1.0 - head.f) * (r / head.t) * (r / head.t);
        auto it = std::upper_bound(pts.begin(), pts.end(), r, [](double v, const PhaseState& s) { return v < s.t; });
        if (it == pts.end()) return pts.back().f;
        const auto& b = *it;
        const auto& a = *std::prev(it);
        const double h = b.t - a.t;
        const double x = (r - a.t) / h;
        const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
        const double h10 = x * (1 - x) * (1 - x);
        const double h01 = x * x * (3 - 2 * x);
        const double h11 = x * x * (x - 1);
        return h00 * a.f + h10 * h * a.fp + h01 * b.f + h11 * h * b.fp;
    };
    return out;
}

ProbeProfile flat_probe_profile() {
    ProbeProfile out;
    out.p = [](double) { return 1.0; };
    out.tau_max = std::numeric_limits<double>::infinity();
    out.mass_term = true;
    return out;
}

ProbeResult linearized_probe(const ProbeProfile& profile, const ProbeOptions& opt) {
    if (!(opt.t0 > 0.0) || !(opt.t_end > opt.t0)) raise(ErrorKind::Precondition, "probe needs 0 < t0 < t_end");
    if (opt.initial_slope == 0.0) raise(ErrorKind::Precondition, "probe initial slope must be nonzero");
    if (opt.t_end > profile.tau_max)
        raise(ErrorKind::Domain, "probe range t_end = " + std::to_string(opt.t_end) + " exceeds profile range " +
                                     std::to_string(profile.tau_max));
    const double mass = profile.mass_term ? 1.0 : 0.0;
    auto coefficient = [&](double t) {
        const double p = profile.p(t);
        // Interpolation may overshoot 1 by round-off next to the origin.
        if (!(p > 0.0) || p > 1.0 + 1e-12)
            raise(ErrorKind::SturmDomain, "probe coefficient p = " + std::to_string(p) + " outside (0, 1] at t = " +
                                              std::to_string(t));
        return std::min(p, 1.0);
    };
    auto field = [&](double t, const rk::Vec<2>& y) {
        const double p = coefficient(t);
        return rk::Vec<2>{y[1], -2.0 / t * y[1] - (mass - 2.0 * p * p / (t * t)) * y[0]};
    };

    rk::StepControls sc;
    sc.rel_tol = opt.rel_tol;
    sc.abs_tol = opt.abs_tol * std::abs(opt.initial_slope);
    sc.max_step = 0.1;

    ProbeResult result;
    result.t_end = opt.t_end;
    const double sign = opt.initial_slope > 0.0 ? 1.0 : -1.0;
    rk::integrate_adaptive<2>(field, opt.t0, rk::Vec<2>{opt.initial_slope * opt.t0, opt.initial_slope}, opt.t_end,
                              sc, [&](const rk::DenseSegment<2>& seg) {
                                  if (sign * seg.end()[0] > 0.0) return rk::StepAction::Continue;
                                  auto g = [&](double t) { return sign * seg(t)[0]; };
                                  double lo = seg.t0, hi = seg.t1();
                                  while (hi - lo > opt.event_tol) {
                                      const double mid = 0.5 * (lo + hi);
                                      if (mid <= lo || mid >= hi) break;
                                      (g(mid) > 0.0 ? lo : hi) = mid;
                                  }
                                  result.first_zero = 0.5 * (lo + hi);
                                  return rk::StepAction::Stop;
                              });
    result.flagged = !result.first_zero.has_value();
    return result;
}

std::string_view to_string(DecayComponent c) noexcept {
    return c == DecayComponent::F ? "f" : "one_minus_rho";
}

double DecayFit::value(double t) const {
    if (law == DecayLaw::Power) return amplitude * std::pow(t, -rate);
    return amplitude * std::pow(t, prefactor_power) * std::exp(-rate * t);
}

double DecayFit::derivative(double t) const {
    if (law == DecayLaw::Power) return -rate * amplitude * std::pow(t, -rate - 1.0);
    return value(t) * (prefactor_power / t - rate);
}

DecayFit fit_decay(std::span<const PhaseState> samples, double a, double b, DecayComponent component,
                   double lambda_hat) {
    DecayFit fit;
    fit.component = component;
    if (component == DecayComponent::F) {
        fit.prefactor_power = lambda_hat > 0.0 ? 0.0 : 1.0;
    } else if (lambda_hat > 0.0) {
        fit.prefactor_power = -1.0;
    } else {
        fit.law = DecayLaw::Power;
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& s : samples) {
        if (s.t < a || s.t > b) continue;
        const double v = component == DecayComponent::F ? s.f : 1.0 - s.rho;
        if (!(v > 0.0))
            raise(ErrorKind::FitDomain, std::string(to_string(component)) + " is non-positive at t = " +
                                            std::to_string(s.t));
        double x, y;
        if (fit.law == DecayLaw::Power) {
            x = std::log(s.t);
            y = std::log(v);
        } else {
            x = s.t;
            y = std::log(v) - fit.prefactor_power * std::log(s.t);
        }
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 10) raise(ErrorKind::FitDomain, "decay fit needs at least 10 samples in the window, got " +
                                                std::to_string(n));
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (!(denom > 0.0)) raise(ErrorKind::FitDomain, "degenerate fit window");
    const double slope = (dn * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / dn;
    fit.rate = -slope;
    fit.amplitude = std::exp(intercept);
    fit.samples = n;
    return fit;
}

}  // namespace monopole
