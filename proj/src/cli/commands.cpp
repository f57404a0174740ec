#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "monopole/cli.hpp"
#include "monopole/errors.hpp"

namespace monopole::cli {

namespace {

constexpr double kBesselZero = 4.493409457909064;  // first positive root of tan t = t

std::string g(double v, int digits = 10) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v + 0.0);
    return buf;
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': not a number: '" + text + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw UsageError("config key '" + key + "': expected true/false, got '" + text + "'");
}

struct Setting {
    std::function<void(const std::string&)> from_config;
    std::map<CLI::App*, CLI::Option*> options;  // per subcommand
};

class Parser {
public:
    Parser() : app_("Spherically symmetric monopole profile solver", "monopole") {
        app_.require_subcommand(1);
        solve_ = app_.add_subcommand("solve", "Solve for the monopole profile and write profile.csv, report.json");
        sweep_ = app_.add_subcommand("sweep", "Classify a grid of shooting parameters (alpha, beta)");
        validate_ = app_.add_subcommand("validate", "End-to-end check of the lambda = 0 solve against the closed form");
        probe_ = app_.add_subcommand("probe", "First zero of the linearized Higgs perturbation");
        series_ = app_.add_subcommand("series", "Origin series coefficients and Picard contraction history");
        for (CLI::App* sub : {solve_, sweep_, validate_, probe_, series_}) add_common(sub);

        add(sweep_, "--alphas", "alphas", "alpha grid: a,b,c or lo:hi:n", [this](const std::string& v) { cfg.alphas = parse_grid(v); });
        add(sweep_, "--betas", "betas", "beta grid: a,b,c or lo:hi:n", [this](const std::string& v) { cfg.betas = parse_grid(v); });
        add(series_, "--alpha", "alpha", "alpha of the shooting pair", [this](const std::string& v) { cfg.series_alpha = parse_number("alpha", v); });
        add(series_, "--beta", "beta", "beta of the shooting pair", [this](const std::string& v) { cfg.series_beta = parse_number("beta", v); });
        add(series_, "--iterations", "iterations", "number of Picard sweeps (>= 2)", [this](const std::string& v) {
            const double n = parse_number("iterations", v);
            if (n != std::floor(n) || n < 2 || n > 1000) throw UsageError("--iterations must be an integer in [2, 1000]");
            cfg.picard_iterations = static_cast<int>(n);
        });
        add(probe_, "--t-end", "t-end", "end of the probe range (default 5)", [this](const std::string& v) { cfg.probe_t_end = parse_number("t-end", v); });
        auto* flat = probe_->add_flag("--flat", "use p = 1 instead of a solved profile");
        settings_["flat"].options[probe_] = flat;
        settings_["flat"].from_config = [this](const std::string& v) { cfg.probe_flat = parse_bool("flat", v); };
        auto* fault = validate_->add_flag("--inject-fault", "flip the sign of the gauge coupling term")->group("");
        settings_["inject-fault"].options[validate_] = fault;
        settings_["inject-fault"].from_config = [this](const std::string& v) { cfg.inject_fault = parse_bool("inject-fault", v); };
    }

    CLI::App& app() { return app_; }

    /// Copies parsed flag values into cfg and fills unset ones from --config.
    void finalize() {
        CLI::App* active = nullptr;
        for (CLI::App* sub : {solve_, sweep_, validate_, probe_, series_})
            if (sub->parsed()) active = sub;
        cfg.command = active->get_name();
        for (auto& [key, s] : settings_) {
            auto it = s.options.find(active);
            if (it == s.options.end() || it->second->count() == 0) continue;
            if (it->second->get_expected_min() == 0) {
                s.from_config("true");
            } else {
                s.from_config(it->second->as<std::string>());
            }
        }
        if (!config_path_.empty()) {
            for (const auto& [key, value] : read_config_file(config_path_)) {
                auto it = settings_.find(key);
                if (it == settings_.end() || key == "config") throw UsageError("unknown config key '" + key + "'");
                auto opt = it->second.options.find(active);
                if (opt == it->second.options.end()) continue;  // belongs to another subcommand
                if (opt->second->count() > 0) continue;          // the flag wins
                it->second.from_config(value);
            }
        }
        cfg.controls.gauge_coupling_sign = cfg.inject_fault ? -1.0 : 1.0;
        try {
            cfg.controls.validate();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }

    RunConfig cfg;

private:
    void add(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help,
             std::function<void(const std::string&)> apply) {
        settings_[key].options[sub] = sub->add_option(flag, help)->type_name("VALUE");
        settings_[key].from_config = std::move(apply);
    }

    void add_number(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help,
                    std::function<void(double)> apply) {
        add(sub, flag, key, help, [key, apply = std::move(apply)](const std::string& v) { apply(parse_number(key, v)); });
    }

    void add_common(CLI::App* sub) {
        add_number(sub, "--lambda", "lambda", "quartic coupling lambda >= 0 (physical units)", [this](double v) { cfg.lambda = v; });
        add_number(sub, "--g0", "g0", "gauge coupling g0 > 0 (default 1)", [this](double v) { cfg.g0 = v; });
        add_number(sub, "--rho0", "rho0", "Higgs vacuum value rho0 > 0 (default 1)", [this](double v) { cfg.rho0 = v; });
        add_number(sub, "--lambda-hat", "lambda-hat", "dimensionless coupling lambda / g0^2", [this](double v) { cfg.lambda_hat = v; });
        add_number(sub, "--rel-tol", "rel-tol", "integrator relative tolerance (default 1e-10)", [this](double v) { cfg.controls.integrator.rel_tol = v; });
        add_number(sub, "--abs-tol", "abs-tol", "integrator absolute tolerance (default 1e-12)", [this](double v) { cfg.controls.integrator.abs_tol = v; });
        add_number(sub, "--t-max", "t-max", "integration horizon (default 12)", [this](double v) { cfg.controls.integrator.t_max = v; });
        add_number(sub, "--tol-alpha", "tol-alpha", "alpha bracket width (default 1e-8)", [this](double v) { cfg.controls.tol_alpha = v; });
        add_number(sub, "--tol-beta", "tol-beta", "beta bracket width (default 1e-8)", [this](double v) { cfg.controls.tol_beta = v; });
        add_number(sub, "--t0", "t0", "series handoff radius (default 1e-3)", [this](double v) { cfg.controls.t0 = v; });
        add(sub, "--out", "out", "output directory", [this](const std::string& v) { cfg.out_dir = v; });
        sub->add_option("--config", config_path_, "key=value file; flags take precedence")->type_name("PATH");
    }

    CLI::App app_;
    CLI::App* solve_ = nullptr;
    CLI::App* sweep_ = nullptr;
    CLI::App* validate_ = nullptr;
    CLI::App* probe_ = nullptr;
    CLI::App* series_ = nullptr;
    std::map<std::string, Setting> settings_;
    std::string config_path_;
};

std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
    const std::filesystem::path dir = cfg.out_dir.value_or(".");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams params = cfg.model_params();
    const ScaledParams sp = nondimensionalize(params);
    SolveReport rep;
    try {
        rep = solve(params, cfg.controls);
    } catch (const Error& e) {
        err << "solve failed: " << e.what() << '\n';
        return kSolveFailure;
    }
    const auto dir = prepare_out_dir(cfg);
    write_profile_csv(dir / "profile.csv", rep.profile.samples);
    write_text(dir / "report.json", report_json(rep, cfg));

    out << "lambda_hat      " << g(rep.lambda_hat) << '\n'
        << "alpha_star      " << g(sp.alpha_to_physical(rep.alpha_star), 12) << '\n'
        << "beta_star       " << g(sp.beta_to_physical(rep.beta_star), 12) << '\n'
        << "energy          " << g(rep.energy, 8) << '\n'
        << "residual_norm   " << g(rep.residual_norm, 3) << '\n'
        << "t_graft         " << g(rep.t_graft, 6) << '\n'
        << "audit           " << (rep.audit.pass() ? "pass" : "FAIL") << '\n'
        << "wrote " << (dir / "profile.csv").string() << ", " << (dir / "report.json").string() << '\n';
    if (!rep.audit.pass()) {
        err << "monotonicity audit failed\n";
        return kCheckFailure;
    }
    return kOk;
}

unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MONOPOLE_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.alphas.empty() || cfg.betas.empty()) throw UsageError("sweep needs non-empty --alphas and --betas");
    const double lambda_hat = cfg.scaled().lambda_hat;
    std::vector<SweepCell> cells;
    try {
        cells = sweep(cfg.alphas, cfg.betas, lambda_hat, cfg.controls, sweep_threads());
    } catch (const Error& e) {
        err << "sweep failed: " << e.what() << '\n';
        return kSolveFailure;
    }
    if (cfg.out_dir) {
        const auto dir = prepare_out_dir(cfg);
        std::ostringstream os;
        write_sweep_csv(os, cells);
        write_text(dir / "sweep.csv", os.str());
        out << "wrote " << (dir / "sweep.csv").string() << " (" << cells.size() << " cells)\n";
    } else {
        write_sweep_csv(out, cells);
    }
    return kOk;
}

struct Check {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    // Looser integration shifts every compared quantity; widen the bounds as the fourth root.
    const double widen = std::max(1.0, std::pow(cfg.controls.integrator.rel_tol / 1e-10, 0.25));
    std::vector<Check> checks;
    auto check = [&](std::string name, double value, double target, double tol) {
        checks.push_back({std::move(name), value, target, tol, std::isfinite(value) && std::abs(value - target) <= tol});
    };

    std::string failure;
    try {
        const SolveReport rep = bisect_beta(0.0, cfg.controls);
        check("alpha_hat_star", rep.alpha_star, 1.0 / 6.0, 1e-3 * widen);
        check("beta_hat_star", rep.beta_star, 1.0 / 3.0, 1e-3 * widen);
        double worst = 0.0;
        for (const auto& s : rep.profile.samples) {
            if (s.t < 0.01 || s.t > 10.0) continue;
            const PhaseState e = ps_exact(s.t);
            worst = std::max({worst, std::abs(s.f - e.f), std::abs(s.rho - e.rho)});
        }
        check("profile_max_error", worst, 0.0, 1e-4 * widen);
        check("audit_pass", rep.audit.pass() ? 1.0 : 0.0, 1.0, 0.0);
        check("residual_norm", rep.residual_norm, 0.0, 1e-5 * widen * widen);
        check("f_decay_rate", rep.f_fit.rate, 1.0, 0.02 * widen);
        check("higgs_decay_power", rep.higgs_fit.rate, 1.0, 0.02 * widen);
        check("higgs_decay_amplitude", rep.higgs_fit.amplitude, 1.0, 0.02 * widen);
        check("energy", rep.energy, 1.0, 1e-3 * widen);
    } catch (const Error& e) {
        failure = e.what();
        checks.push_back({"solve", std::nan(""), 0.0, 0.0, false});
    }
    try {
        const ProbeResult pr = linearized_probe(flat_probe_profile());
        check("flat_probe_zero", pr.first_zero.value_or(std::nan("")), kBesselZero, 1e-3);
    } catch (const Error& e) {
        failure += std::string(failure.empty() ? "" : "; ") + e.what();
        checks.push_back({"flat_probe_zero", std::nan(""), kBesselZero, 1e-3, false});
    }

    bool all = true;
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %-16s %-16s %-12s %s\n", "check", "value", "target", "tolerance", "result");
    out << line;
    for (const auto& c : checks) {
        std::snprintf(line, sizeof line, "%-24s %-16.9g %-16.9g %-12.3g %s\n", c.name.c_str(), c.value, c.target,
                      c.tolerance, c.pass ? "pass" : "FAIL");
        out << line;
        all = all && c.pass;
    }
    if (!failure.empty()) err << "validation error: " << failure << '\n';

    if (cfg.out_dir) {
        nlohmann::ordered_json j;
        j["pass"] = all;
        j["rel_tol"] = cfg.controls.integrator.rel_tol;
        j["tolerance_widening"] = widen;
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& c : checks)
            arr.push_back({{"name", c.name},
                           {"value", std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nlohmann::ordered_json(nullptr)},
                           {"target", c.target},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
        j["checks"] = std::move(arr);
        write_text(prepare_out_dir(cfg) / "validate.json", j.dump(2) + "\n");
    }
    out << (all ? "validation passed\n" : "validation FAILED\n");
    return all ? kOk : kCheckFailure;
}

int cmd_probe(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ProbeOptions opt;
    opt.t_end = cfg.probe_t_end;
    double lambda_hat = 0.0;
    ProbeResult pr;
    try {
        ProbeProfile profile;
        if (cfg.probe_flat) {
            profile = flat_probe_profile();
        } else {
            const ModelParams params = cfg.model_params();
            lambda_hat = nondimensionalize(params).lambda_hat;
            const SolveReport rep = solve(params, cfg.controls);
            profile = make_probe_profile(rep.profile.samples, lambda_hat);
        }
        pr = linearized_probe(profile, opt);
    } catch (const Error& e) {
        err << "probe failed: " << e.what() << '\n';
        return kSolveFailure;
    }
    if (pr.first_zero) {
        out << "first_zero " << g(*pr.first_zero, 12) << '\n';
    } else {
        out << "first_zero absent on (t0, " << g(opt.t_end) << "]\n";
    }
    out << "bessel_zero " << g(kBesselZero, 12) << '\n';
    if (cfg.out_dir) {
        nlohmann::ordered_json j;
        j["flat"] = cfg.probe_flat;
        j["lambda_hat"] = lambda_hat;
        j["t_end"] = opt.t_end;
        j["first_zero"] = pr.first_zero ? nlohmann::ordered_json(*pr.first_zero) : nlohmann::ordered_json(nullptr);
        j["flagged"] = pr.flagged;
        j["bessel_zero"] = kBesselZero;
        write_text(prepare_out_dir(cfg) / "probe.json", j.dump(2) + "\n");
    }
    if (pr.flagged) {
        err << "no zero of the probe solution before t_end\n";
        return kCheckFailure;
    }
    return kOk;
}

int cmd_series(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    double lambda_hat = 0.0;
    ShootPoint sp{cfg.series_alpha, cfg.series_beta};
    if (cfg.lambda || cfg.lambda_hat) {
        const ScaledParams scaled = cfg.scaled();
        lambda_hat = scaled.lambda_hat;
        if (cfg.physical()) sp = {scaled.alpha_to_scaled(sp.alpha), scaled.beta_to_scaled(sp.beta)};
    }
    SeriesCoefficients coeffs;
    PicardHistory hist;
    PhaseState start;
    try {
        coeffs = series_coefficients(sp, lambda_hat);
        hist = picard_verify(sp, lambda_hat, contraction_threshold(sp, lambda_hat), cfg.picard_iterations);
        start = initial_state(sp, lambda_hat, std::min(std::exp(hist.s_max), kMaxHandoff));
    } catch (const Error& e) {
        err << "series failed: " << e.what() << '\n';
        return kSolveFailure;
    }
    out << "alpha_hat " << g(sp.alpha, 12) << "\nbeta_hat  " << g(sp.beta, 12) << "\nlambda_hat " << g(lambda_hat)
        << "\na4 " << g(coeffs.a4, 12) << "\nb3 " << g(coeffs.b3, 12) << '\n'
        << "picard s_max " << g(hist.s_max, 8) << " (t = " << g(std::exp(hist.s_max), 6) << ")\n"
        << "iteration  sup_difference  ratio\n";
    for (std::size_t i = 0; i < hist.sup_differences.size(); ++i) {
        char line[96];
        const double ratio = i == 0 ? std::nan("") : hist.ratios[i - 1];
        std::snprintf(line, sizeof line, "%-10zu %-15.6g %.6g\n", i + 1, hist.sup_differences[i], ratio);
        out << line;
    }
    if (cfg.out_dir) {
        auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
        nlohmann::ordered_json j;
        j["alpha_hat"] = sp.alpha;
        j["beta_hat"] = sp.beta;
        j["lambda_hat"] = lambda_hat;
        j["a4"] = coeffs.a4;
        j["b3"] = coeffs.b3;
        j["picard_s_max"] = hist.s_max;
        j["picard_bound_k"] = hist.bound_k;
        j["picard_bound_m"] = hist.bound_m;
        nlohmann::ordered_json diffs = nlohmann::ordered_json::array(), ratios = nlohmann::ordered_json::array();
        for (double d : hist.sup_differences) diffs.push_back(num(d));
        for (double r : hist.ratios) ratios.push_back(num(r));
        j["picard_sup_differences"] = std::move(diffs);
        j["picard_ratios"] = std::move(ratios);
        j["picard_f"] = hist.final_state.f;
        j["picard_rho"] = hist.final_state.rho;
        j["series_f"] = start.t == hist.final_state.t ? nlohmann::ordered_json(start.f) : nlohmann::ordered_json(nullptr);
        j["series_rho"] = start.t == hist.final_state.t ? nlohmann::ordered_json(start.rho) : nlohmann::ordered_json(nullptr);
        write_text(prepare_out_dir(cfg) / "series.json", j.dump(2) + "\n");
    }
    return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Parser parser;
    try {
        parser.app().parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = parser.app().exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    try {
        parser.finalize();
        const RunConfig& cfg = parser.cfg;
        if (cfg.command == "solve") return cmd_solve(cfg, out, err);
        if (cfg.command == "sweep") return cmd_sweep(cfg, out, err);
        if (cfg.command == "validate") return cmd_validate(cfg, out, err);
        if (cfg.command == "probe") return cmd_probe(cfg, out, err);
        return cmd_series(cfg, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n\n" << parser.app().help();
        return kUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return e.kind() == ErrorKind::ParameterDomain ? kUsage : kSolveFailure;
    }
}

}  // namespace monopole::cli
