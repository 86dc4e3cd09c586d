#include "workreal_cli/runner.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "workreal/errors.hpp"
#include "workreal/hilbert.hpp"
#include "workreal/oscillator.hpp"
#include "workreal/tpm.hpp"
#include "workreal/two_level.hpp"
#include "workreal_cli/csv.hpp"

namespace workreal::cli {

namespace {

using Manifest = std::vector<std::pair<std::string, std::string>>;
using nlohmann::json;

struct Outcome {
    std::vector<std::filesystem::path> files;
    double budget = 0.0;
    bool passed = true;
    json details = json::object();
};

std::string describe_grid(const std::vector<double>& g) {
    if (g.size() == 1) return format_double(g.front());
    return format_double(g.front()) + ":" + format_double(g.back()) + ":" + std::to_string(g.size());
}

Manifest base_manifest(const SweepConfig& config) {
    Manifest m;
    m.emplace_back("workreal", WORKREAL_VERSION_STRING);
    m.emplace_back("experiment", std::string(experiment_name(config.experiment)));
    for (const auto& [key, value] : config.echo) {
        if (key == "threads" || key == "out") continue;
        m.emplace_back("config." + key, value);
    }
    m.emplace_back("entropy_base", config.base == EntropyBase::Natural ? "e" : "2");
    m.emplace_back("degeneracy", config.view == WorkView::FineGrained ? "fine" : "grouped");
    return m;
}

std::filesystem::path output_path(const SweepConfig& config, const std::string& suffix) {
    return config.out / (std::string(experiment_name(config.experiment)) + suffix);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

TlsSpectra spectra_of(const SweepConfig& config) {
    return config.incommensurate ? TlsSpectra::incommensurate() : TlsSpectra::equal(1.0);
}

OscillatorOptions oscillator_options(const SweepConfig& config) {
    OscillatorOptions o;
    o.view = config.view;
    o.base = config.base;
    o.n_max = config.n_max;
    o.threads = config.threads;
    return o;
}

Outcome run_tls_theta(const SweepConfig& config) {
    const double beta = config.beta.value_or(1.0);
    const auto grid = config.grid_or("theta", default_theta_grid());
    const auto rows = tls_theta_sweep(beta, spectra_of(config), grid, config.alpha, config.beta_angle, config.base,
                                      config.threads);
    Manifest m = base_manifest(config);
    m.emplace_back("beta", format_double(beta));
    m.emplace_back("spectra", config.incommensurate ? "incommensurate" : "equal");
    m.emplace_back("theta", describe_grid(grid));
    m.emplace_back("truncation_budget", "0");
    Outcome out;
    const auto path = output_path(config, ".csv");
    CsvWriter csv(path, m, {"theta", "k_cor", "k_cor_flipped", "k_en_fine", "k_en_grouped"});
    std::size_t negative = 0;
    for (const auto& r : rows) {
        csv.row(std::vector<double>{r.theta, r.k_cor, r.k_cor_flipped, r.k_en_fine, r.k_en_grouped});
        if (std::min(r.k_cor, r.k_cor_flipped) < 0.0) ++negative;
    }
    csv.close();
    out.files.push_back(path);
    out.details = {{"beta", beta}, {"rows", rows.size()}, {"rows_with_correlator_violation", negative}};
    return out;
}

Outcome run_squeeze_grid(const SweepConfig& config) {
    const double beta = config.beta.value_or(0.1);
    const auto fallback = config.grid_or("r", linspace(0.0, 0.1, 101));
    const auto r1 = config.grid_or("r1", fallback);
    const auto r2 = config.grid_or("r2", fallback);
    const auto grid = squeeze_grid_sweep(beta, r1, r2, oscillator_options(config), config.auto_extend);

    Manifest m = base_manifest(config);
    m.emplace_back("beta", format_double(beta));
    m.emplace_back("r1", describe_grid(grid.r1));
    m.emplace_back("r2", describe_grid(grid.r2));
    m.emplace_back("extended", grid.extended ? "true" : "false");
    m.emplace_back("n_max", std::to_string(grid.n_max));
    m.emplace_back("truncation_budget", format_double(grid.budget));

    Outcome out;
    out.budget = grid.budget;
    const auto path = output_path(config, ".csv");
    CsvWriter csv(path, m, {"r1", "r2", "k_en"});
    double min_k = std::numeric_limits<double>::infinity();
    std::pair<double, double> argmin{0.0, 0.0};
    for (std::size_t i = 0; i < grid.r1.size(); ++i) {
        for (std::size_t j = 0; j < grid.r2.size(); ++j) {
            const double k = grid.k_en(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            csv.row(std::vector<double>{grid.r1[i], grid.r2[j], k});
            if (k < min_k) {
                min_k = k;
                argmin = {grid.r1[i], grid.r2[j]};
            }
        }
    }
    csv.close();
    out.files.push_back(path);

    json contours = json::object();
    for (const auto& [level, tag] : {std::pair{0.0, std::string("0")}, std::pair{-0.05, std::string("-0.05")}}) {
        const auto points = contour_points(grid, level);
        Manifest cm = m;
        cm.emplace_back("level", tag);
        const auto cpath = output_path(config, ".contour_" + tag + ".csv");
        CsvWriter c(cpath, cm, {"r1", "r2"});
        for (const auto& p : points) c.row(std::vector<double>{p.r1, p.r2});
        c.close();
        out.files.push_back(cpath);
        contours[tag] = points.size();
    }
    out.details = {{"beta", beta},        {"n_max", grid.n_max},     {"extended", grid.extended},
                   {"min_k_en", min_k},   {"argmin_r1", argmin.first}, {"argmin_r2", argmin.second},
                   {"contour_points", contours}};
    return out;
}

Outcome run_squeeze_beta(const SweepConfig& config) {
    std::vector<double> fallback{0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0};
    if (config.beta) fallback = {*config.beta};
    const auto betas = config.grid_or("beta", fallback);
    const auto r_grid = config.grid_or("r", default_beta_sweep_r_grid());
    const auto sweep = beta_sweep_min_k(betas, r_grid, oscillator_options(config));

    Outcome out;
    for (const auto& row : sweep.rows) out.budget = std::max(out.budget, row.budget);
    Manifest m = base_manifest(config);
    m.emplace_back("r", describe_grid(r_grid));
    m.emplace_back("depth_shrinks_with_beta", sweep.depth_shrinks_with_beta ? "true" : "false");
    m.emplace_back("argmin_peak_beta",
                   sweep.argmin_peak ? format_double(sweep.rows[*sweep.argmin_peak].beta) : std::string("none"));
    m.emplace_back("truncation_budget", format_double(out.budget));
    const auto path = output_path(config, ".csv");
    CsvWriter csv(path, m, {"beta", "min_k_en", "argmin_r", "n_max", "budget", "evaluations"});
    json rows = json::array();
    for (const auto& row : sweep.rows) {
        csv.row(std::vector<double>{row.beta, row.min_k_en, row.argmin_r, static_cast<double>(row.n_max), row.budget,
                                    static_cast<double>(row.evaluations)});
        rows.push_back({{"beta", row.beta}, {"min_k_en", row.min_k_en}, {"argmin_r", row.argmin_r}});
    }
    csv.close();
    out.files.push_back(path);
    out.details = {{"rows", rows},
                   {"depth_shrinks_with_beta", sweep.depth_shrinks_with_beta},
                   {"argmin_peak_beta", sweep.argmin_peak ? json(sweep.rows[*sweep.argmin_peak].beta) : json()}};
    return out;
}

Outcome run_jarzynski(const SweepConfig& config) {
    constexpr double kTwoLevelBound = 1e-10;
    std::mt19937_64 rng(*config.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> log_beta(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> gap(0.2, 3.0);

    Outcome out;
    Manifest m = base_manifest(config);
    m.emplace_back("draws", std::to_string(config.draws));
    const auto betas = config.grid_or("beta", {0.5, 1.0});
    m.emplace_back("oscillator_beta", describe_grid(betas));
    m.emplace_back("r1", format_double(config.r1));
    m.emplace_back("r2", format_double(config.r2));

    struct Row {
        std::string model;
        std::vector<double> values;  // beta, theta, alpha, beta_angle, r1, r2, deviation, bound
    };
    std::vector<Row> rows;
    double worst_tls = 0.0;
    for (std::size_t d = 0; d < config.draws; ++d) {
        const TlsAngles a{angle(rng), angle(rng), angle(rng)};
        const double beta = std::exp(log_beta(rng));
        const EnergySpectrum s0({0.0, gap(rng)}, 0);
        const EnergySpectrum s1({0.0, gap(rng)}, 1);
        const EnergySpectrum s2({0.0, gap(rng)}, 2);
        const auto u = tls_propagator(a);
        const auto joint = three_time_joint(build_thermal_state(s0, beta), u, u, s0, s1, s2);
        const double df = thermodynamic_potentials(s2, beta).free_energy -
                          thermodynamic_potentials(s0, beta).free_energy;
        const double dev = jarzynski_deviation(total_work_distribution(joint, config.view), beta, df);
        worst_tls = std::max(worst_tls, dev);
        out.passed = out.passed && dev < kTwoLevelBound;
        rows.push_back({"two-level", {beta, a.theta, a.alpha, a.beta_angle, 0.0, 0.0, dev, kTwoLevelBound}});
    }
    double worst_osc_ratio = 0.0;
    for (double beta : betas) {
        const auto joints = oscillator_three_time(beta, config.r1, config.r2, config.n_max);
        const double dev = jarzynski_deviation(total_work_distribution(joints.measured, config.view), beta, 0.0);
        out.budget = std::max(out.budget, joints.budget);
        worst_osc_ratio = std::max(worst_osc_ratio, dev / joints.budget);
        out.passed = out.passed && dev < joints.budget;
        rows.push_back({"oscillator", {beta, 0.0, 0.0, 0.0, config.r1, config.r2, dev, joints.budget}});
    }
    m.emplace_back("truncation_budget", format_double(out.budget));
    const auto path = output_path(config, ".csv");
    CsvWriter csv(path, m, {"model", "beta", "theta", "alpha", "beta_angle", "r1", "r2", "deviation", "bound"});
    for (const auto& r : rows) {
        std::vector<std::string> cells{r.model};
        for (double v : r.values) cells.push_back(format_double(v));
        csv.row(cells);
    }
    csv.close();
    out.files.push_back(path);
    out.details = {{"max_two_level_deviation", worst_tls},
                   {"max_oscillator_deviation_over_budget", worst_osc_ratio},
                   {"passed", out.passed}};
    return out;
}

Outcome run_mc(const SweepConfig& config) {
    constexpr double kMinPValue = 1e-3;
    const double beta = config.beta.value_or(1.0);
    const auto spectra = spectra_of(config);
    const TlsAngles angles{config.alpha, config.beta_angle, config.theta};
    const auto u = tls_propagator(angles);
    const auto rho = build_thermal_state(spectra.t0, beta);
    const auto exact = three_time_joint(rho, u, u, spectra.t0, spectra.t1, spectra.t2);
    const auto sampled =
        sample_trajectories(rho, u, u, config.samples, *config.seed, spectra.t0, spectra.t1, spectra.t2);

    const std::size_t d = exact.dim();
    const double n = static_cast<double>(config.samples);
    double chi2 = 0.0;
    std::size_t cells = 0;
    Outcome out;
    Manifest m = base_manifest(config);
    m.emplace_back("beta", format_double(beta));
    m.emplace_back("theta", format_double(config.theta));
    m.emplace_back("samples", std::to_string(config.samples));
    m.emplace_back("seed", std::to_string(*config.seed));

    std::vector<std::vector<double>> rows;
    for (std::size_t k2 = 0; k2 < d; ++k2) {
        for (std::size_t k1 = 0; k1 < d; ++k1) {
            for (std::size_t k0 = 0; k0 < d; ++k0) {
                const double p = exact(k2, k1, k0);
                const double f = sampled(k2, k1, k0);
                if (p > 0.0) {
                    const double expected = n * p;
                    chi2 += (f * n - expected) * (f * n - expected) / expected;
                    ++cells;
                }
                rows.push_back({static_cast<double>(k0), static_cast<double>(k1), static_cast<double>(k2), p, f,
                                std::round(f * n)});
            }
        }
    }
    const double dof = static_cast<double>(cells > 1 ? cells - 1 : 1);
    const double p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), chi2));
    out.passed = p_value > kMinPValue;
    m.emplace_back("chi2", format_double(chi2));
    m.emplace_back("dof", format_double(dof));
    m.emplace_back("p_value", format_double(p_value));
    m.emplace_back("truncation_budget", "0");
    const auto path = output_path(config, ".csv");
    CsvWriter csv(path, m, {"k0", "k1", "k2", "exact", "empirical", "count"});
    for (const auto& r : rows) csv.row(r);
    csv.close();
    out.files.push_back(path);
    out.details = {{"chi2", chi2}, {"dof", dof}, {"p_value", p_value}, {"passed", out.passed}};
    return out;
}

void append_summary(const SweepConfig& config, const Outcome& outcome, int exit_code, double wall_time,
                    const std::string& message) {
    json record;
    record["experiment"] = std::string(experiment_name(config.experiment));
    record["version"] = WORKREAL_VERSION_STRING;
    json cfg = json::object();
    for (const auto& [key, value] : config.echo) cfg[key] = value;
    record["config"] = cfg;
    record["threads"] = config.threads;
    record["truncation_budget"] = outcome.budget;
    record["wall_time_s"] = wall_time;
    record["exit_code"] = exit_code;
    if (!message.empty()) record["message"] = message;
    json files = json::array();
    for (const auto& f : outcome.files) files.push_back(f.filename().string());
    record["files"] = files;
    record["results"] = outcome.details;
    std::ofstream out(output_path(config, ".summary.jsonl"), std::ios::app | std::ios::binary);
    out << record.dump() << '\n';
}

}  // namespace

std::size_t resolve_threads(std::optional<std::size_t> flag, const char* env_value) {
    if (flag) return *flag;
    if (env_value && *env_value) {
        SweepConfig probe;
        probe.set("threads", env_value);
        return probe.threads;
    }
    return 0;
}

RunResult run(const SweepConfig& config, std::ostream& log) {
    RunResult result;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        config.validate();
        std::filesystem::create_directories(config.out);
        switch (config.experiment) {
            case Experiment::TlsTheta: outcome = run_tls_theta(config); break;
            case Experiment::SqueezeGrid: outcome = run_squeeze_grid(config); break;
            case Experiment::SqueezeBeta: outcome = run_squeeze_beta(config); break;
            case Experiment::JarzynskiCheck: outcome = run_jarzynski(config); break;
            case Experiment::McCrosscheck: outcome = run_mc(config); break;
        }
        if (!outcome.passed) {
            result.exit_code = kExitCheckFailed;
            result.message = std::string(experiment_name(config.experiment)) + ": check failed";
        }
    } catch (const ConfigError& e) {
        result.exit_code = kExitInvalidConfig;
        result.message = std::string("invalid config: ") + e.what();
    } catch (const InvalidParameter& e) {
        result.exit_code = kExitInvalidConfig;
        result.message = std::string("invalid parameter: ") + e.what();
    } catch (const TruncationError& e) {
        result.exit_code = kExitTruncation;
        result.message = std::string("truncation failure: ") + e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.files = outcome.files;
    if (result.exit_code != kExitInvalidConfig) {
        append_summary(config, outcome, result.exit_code, wall, result.message);
        result.files.push_back(output_path(config, ".summary.jsonl"));
    }
    if (!result.message.empty()) log << result.message << '\n';
    for (const auto& f : outcome.files) log << "wrote " << f.string() << '\n';
    return result;
}

}  // namespace workreal::cli
