#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "monopole/cli.hpp"

namespace monopole::cli {

ModelParams RunConfig::model_params() const {
    if (lambda && lambda_hat) throw UsageError("give either --lambda (with --g0, --rho0) or --lambda-hat, not both");
    if (!lambda && !lambda_hat) throw UsageError("missing coupling: give --lambda or --lambda-hat");
    if (lambda_hat && (g0 || rho0)) throw UsageError("--g0 and --rho0 only apply together with --lambda");
    ModelParams p;
    if (lambda) {
        p.lambda = *lambda;
        p.g0 = g0.value_or(1.0);
        p.rho0 = rho0.value_or(1.0);
    } else {
        // Unit scales: lambda = lambda_hat g0^2 with g0 = rho0 = 1.
        p.lambda = *lambda_hat;
    }
    p.validate();
    return p;
}

ScaledParams RunConfig::scaled() const { return nondimensionalize(model_params()); }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw UsageError("not a number: '" + text + "'");
    return v;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty()) throw UsageError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::vector<double> parse_grid(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return {};
    if (std::count(t.begin(), t.end(), ':') == 2) {
        const auto c1 = t.find(':');
        const auto c2 = t.find(':', c1 + 1);
        const double lo = to_double(t.substr(0, c1));
        const double hi = to_double(t.substr(c1 + 1, c2 - c1 - 1));
        const double nd = to_double(t.substr(c2 + 1));
        if (nd < 1 || nd != std::floor(nd)) throw UsageError("grid count must be a positive integer in '" + text + "'");
        const auto n = static_cast<std::size_t>(nd);
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i)
            g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        return g;
    }
    std::vector<double> g;
    std::size_t start = 0;
    while (start <= t.size()) {
        const auto comma = t.find(',', start);
        const std::string item = t.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        g.push_back(to_double(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return g;
}

}  // namespace monopole::cli
