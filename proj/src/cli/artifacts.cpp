#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "monopole/cli.hpp"

namespace monopole::cli {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("write failed for " + path.string());
}

void write_profile_csv(const std::filesystem::path& path, const std::vector<PhaseState>& samples) {
    std::string text = "t,f,fp,rho,rhop\n";
    text.reserve(samples.size() * 100);
    for (const auto& s : samples)
        text += g17(s.t) + ',' + g17(s.f) + ',' + g17(s.fp) + ',' + g17(s.rho) + ',' + g17(s.rhop) + '\n';
    write_text(path, text);
}

std::vector<PhaseState> read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "t,f,fp,rho,rhop")
        throw IoError(path.string() + ": expected header t,f,fp,rho,rhop");
    std::vector<PhaseState> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        PhaseState s;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &s.t, &s.f, &s.fp, &s.rho, &s.rhop) != 5)
            throw IoError(path.string() + ": malformed row '" + line + "'");
        out.push_back(s);
    }
    return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
    os << "alpha,beta,outcome,t_event\n";
    for (const auto& c : cells) {
        os << g17(c.alpha) << ',' << g17(c.beta) << ',' << to_string(c.outcome) << ',';
        if (c.t_event) os << g17(*c.t_event);
        os << '\n';
    }
}

std::string report_json(const SolveReport& r, const RunConfig& cfg) {
    const ScaledParams sp = cfg.scaled();
    const ModelParams mp = cfg.model_params();
    nlohmann::ordered_json j;
    j["converged"] = r.converged();
    j["audit_pass"] = r.audit.pass();
    j["lambda_hat"] = r.lambda_hat;
    if (cfg.physical()) {
        j["lambda"] = mp.lambda;
        j["g0"] = mp.g0;
        j["rho0"] = mp.rho0;
        j["mu"] = mp.mu();
    }
    j["r_scale"] = sp.r_scale;
    j["rho_scale"] = sp.rho_scale;
    j["alpha_star"] = sp.alpha_to_physical(r.alpha_star);
    j["beta_star"] = sp.beta_to_physical(r.beta_star);
    j["alpha_hat_star"] = r.alpha_star;
    j["beta_hat_star"] = r.beta_star;
    j["alpha_bracket_lo"] = r.alpha_bracket.lo;
    j["alpha_bracket_hi"] = r.alpha_bracket.hi;
    j["alpha_bracket_width"] = r.alpha_bracket.width();
    j["alpha_lo_outcome"] = std::string(to_string(r.alpha_bracket.lo_outcome));
    j["alpha_hi_outcome"] = std::string(to_string(r.alpha_bracket.hi_outcome));
    j["beta_bracket_lo"] = r.beta_bracket.lo;
    j["beta_bracket_hi"] = r.beta_bracket.hi;
    j["beta_bracket_width"] = r.beta_bracket.width();
    j["beta_iterations"] = r.beta_iterations;
    j["beta_refinements"] = r.beta_refinements;
    j["final_outcome"] = std::string(to_string(r.final_outcome));
    j["t_graft"] = r.t_graft;
    j["t_report"] = r.profile.samples.empty() ? 0.0 : r.profile.samples.back().t;
    j["graft_mismatch"] = r.graft_mismatch;
    j["f_decay_rate"] = r.f_fit.rate;
    j["f_decay_amplitude"] = r.f_fit.amplitude;
    j["higgs_decay_law"] = r.higgs_fit.law == DecayLaw::Power ? "power" : "exponential";
    j["higgs_decay_rate"] = r.higgs_fit.rate;
    j["higgs_decay_amplitude"] = r.higgs_fit.amplitude;
    j["residual_norm"] = r.residual_norm;
    j["audit_f_in_01"] = r.audit.f_in_01;
    j["audit_fp_negative"] = r.audit.fp_negative;
    j["audit_rho_in_01"] = r.audit.rho_in_01;
    j["audit_rhop_positive"] = r.audit.rhop_positive;
    j["margin_f_in_01"] = r.audit.worst_margins.f_in_01;
    j["margin_fp_negative"] = r.audit.worst_margins.fp_negative;
    j["margin_rho_in_01"] = r.audit.worst_margins.rho_in_01;
    j["margin_rhop_positive"] = r.audit.worst_margins.rhop_positive;
    j["energy"] = r.energy;
    j["mass"] = physical_mass(r.energy, mp);
    j["tangencies"] = r.tangencies;
    j["profile_samples"] = r.profile.samples.size();
    j["t0"] = cfg.controls.t0;
    j["rel_tol"] = cfg.controls.integrator.rel_tol;
    j["abs_tol"] = cfg.controls.integrator.abs_tol;
    j["t_max"] = cfg.controls.integrator.t_max;
    j["tol_alpha"] = cfg.controls.tol_alpha;
    j["tol_beta"] = cfg.controls.tol_beta;
    nlohmann::ordered_json probes = nlohmann::ordered_json::array();
    for (const auto& p : r.beta_log) {
        nlohmann::ordered_json q;
        q["beta"] = p.beta;
        q["alpha_star"] = p.alpha_star;
        q["rho_outcome"] = std::string(to_string(p.rho_outcome));
        q["t_event"] = p.t_event ? nlohmann::ordered_json(*p.t_event) : nlohmann::ordered_json(nullptr);
        q["growing_mode"] = p.growing_mode;
        q["side"] = std::string(to_string(p.side));
        probes.push_back(std::move(q));
    }
    j["beta_probes"] = std::move(probes);
    return j.dump(2) + "\n";
}

}  // namespace monopole::cli
