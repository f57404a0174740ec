#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "monopole/analysis.hpp"
#include "monopole/model.hpp"
#include "monopole/shooter.hpp"

namespace monopole::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSolveFailure = 2, kCheckFailure = 3, kIoFailure = 4 };

/// Thrown for malformed configuration; maps to kUsage.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown for unreadable or unwritable files; maps to kIoFailure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::optional<double> lambda;
    std::optional<double> g0;
    std::optional<double> rho0;
    std::optional<double> lambda_hat;
    ShooterControls controls;
    std::optional<std::filesystem::path> out_dir;
    std::vector<double> alphas;
    std::vector<double> betas;
    double series_alpha = 0.0;
    double series_beta = 0.0;
    int picard_iterations = 8;
    bool probe_flat = false;
    double probe_t_end = 5.0;
    bool inject_fault = false;

    bool physical() const { return lambda.has_value(); }
    /// Requires exactly one of lambda / lambda_hat; g0 and rho0 default to 1.
    ModelParams model_params() const;
    ScaledParams scaled() const;
};

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
/// Keys are returned with '_' normalized to '-'.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// "a,b,c" or "lo:hi:n" (n evenly spaced points, inclusive).
std::vector<double> parse_grid(const std::string& text);

void write_profile_csv(const std::filesystem::path& path, const std::vector<PhaseState>& samples);
std::vector<PhaseState> read_profile_csv(const std::filesystem::path& path);
void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);
std::string report_json(const SolveReport& report, const RunConfig& config);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Entry point used by the executable and by tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace monopole::cli
