#include "workreal_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace workreal::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(const std::string& text, const std::string& field, std::size_t line) {
    std::string body = text;
    double factor = 1.0;
    if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
        body = trim(body.substr(0, body.size() - 2));
        factor = std::numbers::pi;
        if (body.empty()) body = "1";
        if (body == "-") body = "-1";
    }
    double value = 0.0;
    const char* begin = body.data();
    const char* end = body.data() + body.size();
    if (!body.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || body.empty()) {
        throw ConfigError(line, field, "expected a number, got '" + text + "'");
    }
    value *= factor;
    if (!std::isfinite(value)) throw ConfigError(line, field, "value must be finite");
    return value;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& field, std::size_t line) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(line, field, "expected a non-negative integer, got '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& text, const std::string& field, std::size_t line) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(line, field, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_axis(const std::string& body, const std::string& axis, std::size_t line) {
    if (body.empty()) throw ConfigError(line, axis, "empty grid");
    std::vector<double> values;
    if (body.find(':') != std::string::npos) {
        const auto parts = split(body, ':');
        if (parts.size() != 3) throw ConfigError(line, axis, "range must be lo:hi:n");
        const double lo = parse_double(parts[0], axis, line);
        const double hi = parse_double(parts[1], axis, line);
        const auto n = parse_unsigned(parts[2], axis, line);
        if (n == 0) throw ConfigError(line, axis, "range needs at least one point");
        if (n == 1) {
            if (lo != hi) throw ConfigError(line, axis, "a one-point range needs lo == hi");
            return {lo};
        }
        if (hi < lo) throw ConfigError(line, axis, "range must satisfy lo <= hi");
        values.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            values.push_back(i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
        return values;
    }
    for (const auto& item : split(body, ',')) values.push_back(parse_double(item, axis, line));
    return values;
}

std::map<std::string, std::vector<double>> parse_grid_spec_at(std::string_view spec, std::size_t line) {
    std::map<std::string, std::vector<double>> grids;
    for (const auto& clause : split(spec, ';')) {
        if (clause.empty()) continue;
        const auto eq = clause.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "grid", "expected axis=values in '" + clause + "'");
        const std::string axis = trim(std::string_view(clause).substr(0, eq));
        if (axis.empty()) throw ConfigError(line, "grid", "missing axis name in '" + clause + "'");
        if (grids.contains(axis)) throw ConfigError(line, axis, "axis given twice");
        grids[axis] = parse_axis(trim(std::string_view(clause).substr(eq + 1)), axis, line);
    }
    if (grids.empty()) throw ConfigError(line, "grid", "no axes given");
    return grids;
}

}  // namespace

std::string_view experiment_name(Experiment e) {
    switch (e) {
        case Experiment::TlsTheta: return "tls-theta";
        case Experiment::SqueezeGrid: return "squeeze-grid";
        case Experiment::SqueezeBeta: return "squeeze-beta";
        case Experiment::JarzynskiCheck: return "jarzynski-check";
        case Experiment::McCrosscheck: return "mc-crosscheck";
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (auto e : {Experiment::TlsTheta, Experiment::SqueezeGrid, Experiment::SqueezeBeta,
                   Experiment::JarzynskiCheck, Experiment::McCrosscheck}) {
        if (experiment_name(e) == name) return e;
    }
    return std::nullopt;
}

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) + field + ": " + message),
      line_(line),
      field_(std::move(field)) {}

std::map<std::string, std::vector<double>> parse_grid_spec(std::string_view spec) {
    return parse_grid_spec_at(spec, 0);
}

void SweepConfig::set(const std::string& raw_key, const std::string& raw_value, std::size_t line) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string value = trim(raw_value);
    if (value.empty()) throw ConfigError(line, key, "missing value");

    if (key == "experiment") {
        const auto e = parse_experiment(value);
        if (!e) throw ConfigError(line, key, "unknown experiment '" + value + "'");
        experiment = *e;
    } else if (key == "beta") {
        const double b = parse_double(value, key, line);
        if (!(b > 0.0)) throw ConfigError(line, key, "must be positive");
        beta = b;
    } else if (key == "n_max") {
        n_max = parse_unsigned(value, key, line);
        if (n_max < 1) throw ConfigError(line, key, "must be at least 1");
    } else if (key == "seed") {
        seed = parse_unsigned(value, key, line);
    } else if (key == "grid" || key == "grid_spec") {
        for (auto& [axis, values] : parse_grid_spec_at(value, line)) grids[axis] = std::move(values);
    } else if (key == "entropy_base") {
        if (value == "e") {
            base = EntropyBase::Natural;
        } else if (value == "2") {
            base = EntropyBase::Bits;
        } else {
            throw ConfigError(line, key, "must be e or 2");
        }
    } else if (key == "degeneracy") {
        if (value == "fine") {
            view = WorkView::FineGrained;
        } else if (value == "grouped") {
            view = WorkView::ValueGrouped;
        } else {
            throw ConfigError(line, key, "must be fine or grouped");
        }
    } else if (key == "threads") {
        threads = parse_unsigned(value, key, line);
    } else if (key == "out") {
        out = value;
    } else if (key == "alpha") {
        alpha = parse_double(value, key, line);
    } else if (key == "beta_angle") {
        beta_angle = parse_double(value, key, line);
    } else if (key == "theta") {
        theta = parse_double(value, key, line);
    } else if (key == "spectra") {
        if (value == "equal") {
            incommensurate = false;
        } else if (value == "incommensurate") {
            incommensurate = true;
        } else {
            throw ConfigError(line, key, "must be equal or incommensurate");
        }
    } else if (key == "r1" || key == "r2") {
        const double r = parse_double(value, key, line);
        if (r < 0.0) throw ConfigError(line, key, "must be >= 0");
        (key == "r1" ? r1 : r2) = r;
    } else if (key == "samples") {
        samples = parse_unsigned(value, key, line);
        if (samples == 0) throw ConfigError(line, key, "must be positive");
    } else if (key == "draws") {
        draws = parse_unsigned(value, key, line);
        if (draws == 0) throw ConfigError(line, key, "must be positive");
    } else if (key == "auto_extend") {
        auto_extend = parse_bool(value, key, line);
    } else {
        throw ConfigError(line, key, "unknown key");
    }
    echo.emplace_back(key, value);
}

std::vector<double> SweepConfig::grid_or(const std::string& axis, std::vector<double> fallback) const {
    const auto it = grids.find(axis);
    return it == grids.end() ? fallback : it->second;
}

void SweepConfig::validate() const {
    static const std::map<Experiment, std::set<std::string>> axes = {
        {Experiment::TlsTheta, {"theta"}},
        {Experiment::SqueezeGrid, {"r1", "r2", "r"}},
        {Experiment::SqueezeBeta, {"beta", "r"}},
        {Experiment::JarzynskiCheck, {"beta"}},
        {Experiment::McCrosscheck, {}},
    };
    for (const auto& [axis, values] : grids) {
        if (!axes.at(experiment).contains(axis)) {
            throw ConfigError(0, axis, "axis not used by " + std::string(experiment_name(experiment)));
        }
        if (values.empty()) throw ConfigError(0, axis, "empty grid");
        const bool radial = axis == "r" || axis == "r1" || axis == "r2";
        for (double v : values) {
            if (radial && v < 0.0) throw ConfigError(0, axis, "squeeze amplitudes must be >= 0");
            if (axis == "beta" && !(v > 0.0)) throw ConfigError(0, axis, "inverse temperatures must be positive");
        }
    }
    if (experiment == Experiment::SqueezeBeta) {
        const auto it = grids.find("r");
        if (it != grids.end()) {
            if (it->second.size() < 2 || !std::is_sorted(it->second.begin(), it->second.end()) ||
                it->second.front() <= 0.0) {
                throw ConfigError(0, "r", "needs at least two positive ascending values");
            }
        }
    }
    if ((experiment == Experiment::McCrosscheck || experiment == Experiment::JarzynskiCheck) && !seed) {
        throw ConfigError(0, "seed", "required for sampling experiments");
    }
}

void load_config_text(std::string_view text, SweepConfig& config) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigError(line, content, "expected key = value");
        config.set(content.substr(0, eq), content.substr(eq + 1), line);
    }
}

void load_config_file(const std::filesystem::path& path, SweepConfig& config) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "config", "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    load_config_text(buffer.str(), config);
}

}  // namespace workreal::cli
