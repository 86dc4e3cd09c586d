// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "properties.hpp"
#include "workreal/oscillator.hpp"
#include "workreal/squeeze.hpp"
#include "workreal/two_level.hpp"

using namespace workreal;

namespace {

struct Verdict {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void report(int id, double budget_s, const std::function<Verdict()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0.0 && t > budget_s) {
        v.passed = false;
        v.detail += "; runtime over " + std::to_string(budget_s) + " s";
    }
    if (!v.passed) ++failures;
    std::printf("criterion %d %s: %s [%.2f s]\n", id, v.passed ? "PASS" : "FAIL", v.detail.c_str(), t);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const double kPi = std::numbers::pi;

double distance_to_quarter_turn(double theta) {
    const double q = theta / (kPi / 2.0);
    return std::abs(q - std::round(q)) * (kPi / 2.0);
}

Verdict boundary_structure() {
    const auto grid = default_theta_grid();
    const auto rows = tls_theta_sweep(1.0, TlsSpectra::equal(), grid);
    std::size_t interior = 0, bad = 0;
    for (const auto& r : rows) {
        if (distance_to_quarter_turn(r.theta) <= 1e-3) continue;
        ++interior;
        if (std::min(r.k_cor, r.k_cor_flipped) >= 0.0) ++bad;
    }
    double worst_edge = 0.0;
    for (int k = 0; k <= 4; ++k) {
        const auto lg = tls_leggett_garg(1.0, TlsSpectra::equal(), TlsAngles{0.0, 0.0, k * kPi / 2.0});
        worst_edge = std::max(worst_edge, std::abs(std::min(*lg.k_cor, *lg.k_cor_flipped)));
    }
    return {bad == 0 && worst_edge <= 1e-10,
            fmt("%zu of %zu interior angles negative, max |min K| at multiples of pi/2 = %.3g", interior - bad,
                interior, worst_edge)};
}

Verdict maximal_violation() {
    const TlsAngles angles{0.0, 0.0, kPi / 3.0};
    const double k = *tls_leggett_garg(1.0, TlsSpectra::equal(), angles).k_cor;
    const auto u = tls_propagator(angles).matrix();
    const auto rho = build_thermal_state(TlsSpectra::equal().t0, 1.0);
    std::vector<double> p0(rho.populations().begin(), rho.populations().end());
    const double oracle = testing::path_enumeration_correlators(p0, u, u).k_cor();
    return {std::abs(k + 0.125) <= 1e-12 && std::abs(k - oracle) <= 1e-12,
            fmt("K_cor(pi/3) = %.17g, oracle %.17g", k, oracle)};
}

Verdict entropic_disagreement() {
    const auto rows = tls_theta_sweep(1.0, TlsSpectra::equal(), default_theta_grid());
    std::size_t fine = 0, grouped = 0;
    for (const auto& r : rows) {
        const bool cor = std::min(r.k_cor, r.k_cor_flipped) < 0.0;
        if (cor && r.k_en_fine >= 0.0) ++fine;
        if (cor && r.k_en_grouped >= 0.0) ++grouped;
    }
    return {fine > 0, fmt("%zu angles with correlator violation and K_en >= 0 (grouped work values: %zu)", fine,
                          grouped)};
}

Verdict temperature_independence() {
    const auto grid = default_theta_grid();
    const auto ref = tls_theta_sweep(1.0, TlsSpectra::equal(), grid);
    double worst = 0.0, worst_en = 0.0;
    for (double beta : {0.1, 10.0}) {
        const auto rows = tls_theta_sweep(beta, TlsSpectra::equal(), grid);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            worst = std::max({worst, std::abs(rows[i].k_cor - ref[i].k_cor),
                              std::abs(rows[i].k_cor_flipped - ref[i].k_cor_flipped)});
            worst_en = std::max(worst_en, std::abs(rows[i].k_en_fine - ref[i].k_en_fine));
        }
    }
    return {worst <= 1e-12, fmt("max K_cor spread %.3g; K_en spread across beta %.4g", worst, worst_en)};
}

Verdict closed_form_gate() {
    double worst = 0.0;
    bool parity = true;
    for (double r : {0.02, 0.2, 1.0}) {
        const auto closed = squeeze_matrix_closed_form(r, 20);
        const auto oracle = squeeze_matrix_exponential_oracle(r, 20, 180);
        worst = std::max(worst, (closed.g - oracle.g).cwiseAbs().maxCoeff());
        for (int m = 0; m <= 20; ++m)
            for (int n = 0; n <= 20; ++n)
                if ((m + n) % 2 && closed.g(m, n) != 0.0) parity = false;
    }
    return {worst <= 1e-8 && parity, fmt("max |closed - oracle| = %.3g, parity zeros %s", worst,
                                         parity ? "exact" : "broken")};
}

Verdict oscillator_landmark() {
    OscillatorOptions o;
    const std::vector<double> betas{0.1};
    const auto sweep = beta_sweep_min_k(betas, default_beta_sweep_r_grid(), o);
    const auto& row = sweep.rows.at(0);
    double positive_at = -1.0;
    for (double r = row.argmin_r * 1.25; r <= 1.0; r *= 1.25) {
        if (oscillator_k_en(0.1, r, r, o).k_en > 0.0) {
            positive_at = r;
            break;
        }
    }
    const bool ok = row.min_k_en < 0.0 && row.argmin_r >= 0.008 && row.argmin_r <= 0.05 && positive_at > 0.0;
    return {ok, fmt("min K_en = %.6g at r1 = r2 = %.5g (n_max %zu, budget %.2g), positive again by r = %.4g",
                    row.min_k_en, row.argmin_r, row.n_max, row.budget, positive_at)};
}

Verdict contour_check() {
    OscillatorOptions o;
    std::vector<double> axis;
    for (int i = 0; i <= 20; ++i) axis.push_back(0.005 * i);
    const auto grid = squeeze_grid_sweep(0.1, axis, axis, o, false);
    const double diag = grid.k_en(4, 4);
    const double ab = grid.k_en(20, 4), ba = grid.k_en(4, 20);
    std::size_t negative = (grid.k_en.array() < 0.0).count();
    const bool ok = diag < 0.0 && negative > 0 && std::abs(ab - ba) > 1e-6;
    return {ok, fmt("K(0.02,0.02) = %.6g, %zu negative cells, K(0.1,0.02) = %.6g vs K(0.02,0.1) = %.6g", diag,
                    negative, ab, ba)};
}

Verdict temperature_trend() {
    OscillatorOptions o;
    const std::vector<double> betas{0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0};
    const auto sweep = beta_sweep_min_k(betas, default_beta_sweep_r_grid(), o);
    const double hot = sweep.rows.front().min_k_en, cold = sweep.rows.back().min_k_en;
    const bool shallower = std::abs(cold) < std::abs(hot);
    bool peak_ok = false;
    std::string peak = "none";
    if (sweep.argmin_peak) {
        const double b = sweep.rows[*sweep.argmin_peak].beta;
        peak_ok = b >= 0.3 && b <= 3.0;
        peak = fmt("%.3g", b);
    }
    std::ostringstream s;
    s << "min K_en(beta=0.1) = " << hot << ", min K_en(beta=10) = " << cold << ", argmin r:";
    for (const auto& r : sweep.rows) s << ' ' << r.beta << "->" << r.argmin_r;
    s << "; interior argmin peak " << peak;
    return {shallower && peak_ok, s.str()};
}

Verdict jarzynski() {
    const auto tls = testing::jarzynski_two_level_property(2024, 100, 1e-10);
    std::string osc;
    bool ok = tls.passed;
    for (double beta : {0.5, 1.0}) {
        const auto j = oscillator_three_time(beta, 0.3, 0.2);
        const double dev = jarzynski_deviation(total_work_distribution(j.measured), beta, 0.0);
        ok = ok && dev < j.budget;
        osc += fmt(" beta %.1f: %.3g < %.3g;", beta, dev, j.budget);
    }
    return {ok, fmt("two-level worst %.3g over %zu draws; oscillator", tls.worst, tls.cases) + osc};
}

Verdict property_suites() {
    const std::vector<testing::PropertyOutcome> outcomes{
        testing::entropy_chain_property(11),     testing::grouping_property(12),
        testing::normalization_property(13),     testing::marginalization_property(14),
        testing::monte_carlo_property(15),       testing::classical_surrogate_property(16, 200),
    };
    bool ok = true;
    std::string detail;
    for (const auto& o : outcomes) {
        ok = ok && o.passed;
        detail += fmt("%s %s (%zu cases, worst %.3g); ", o.name.c_str(), o.passed ? "ok" : "failed", o.cases, o.worst);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    report(1, 1.0, boundary_structure);
    report(2, 1.0, maximal_violation);
    report(3, 0.0, entropic_disagreement);
    report(4, 0.0, temperature_independence);
    report(5, 30.0, closed_form_gate);
    report(6, 300.0, oscillator_landmark);
    report(7, 0.0, contour_check);
    report(8, 0.0, temperature_trend);
    report(9, 0.0, jarzynski);
    report(10, 0.0, property_suites);
    return failures;
}
