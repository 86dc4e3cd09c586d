#include "workreal/two_level.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "workreal/parallel.hpp"

namespace workreal {

TlsAngles TlsAngles::canonical() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta_angle) || !std::isfinite(theta)) {
        throw InvalidParameter("two-level angles must be finite");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0;
    return TlsAngles{alpha, beta_angle, t};
}

UnitaryPropagator tls_propagator(const TlsAngles& angles) {
    const TlsAngles a = angles.canonical();
    using namespace std::complex_literals;
    const double c = std::cos(0.5 * a.theta);
    const double s = std::sin(0.5 * a.theta);
    const std::complex<double> sum_phase = std::exp(0.5i * (a.alpha + a.beta_angle));
    const std::complex<double> diff_phase = std::exp(0.5i * (a.alpha - a.beta_angle));
    Eigen::MatrixXcd u(2, 2);
    u(0, 0) = sum_phase * c;
    u(0, 1) = diff_phase * s;
    u(1, 0) = -std::conj(diff_phase) * s;
    u(1, 1) = std::conj(sum_phase) * c;
    return UnitaryPropagator(std::move(u));
}

TlsSpectra TlsSpectra::equal(double gap) {
    return TlsSpectra{EnergySpectrum::two_level(gap, 0), EnergySpectrum::two_level(gap, 1),
                      EnergySpectrum::two_level(gap, 2)};
}

TlsSpectra TlsSpectra::incommensurate() {
    return TlsSpectra{EnergySpectrum::two_level(1.0, 0), EnergySpectrum::two_level(std::sqrt(2.0), 1),
                      EnergySpectrum::two_level(std::sqrt(3.0), 2)};
}

std::vector<double> default_theta_grid(std::size_t points) {
    if (points < 2) throw InvalidParameter("theta grid needs at least two points");
    std::vector<double> grid(points);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = step * static_cast<double>(i);
    grid.back() = 2.0 * std::numbers::pi;
    return grid;
}

LeggettGargResult tls_leggett_garg(double beta, const TlsSpectra& spectra, const TlsAngles& angles, WorkView view,
                                   EntropyBase base) {
    const DiagonalDensity rho0 = build_thermal_state(spectra.t0, beta);
    const UnitaryPropagator u = tls_propagator(angles);
    const JointDistribution3 measured = three_time_joint(rho0, u, u, spectra.t0, spectra.t1, spectra.t2);
    const JointDistribution no_middle = two_time_joint_skipping_middle(rho0, u, u, spectra.t0, spectra.t2);
    LeggettGargOptions options;
    options.view = view;
    options.base = base;
    options.mapping = DichotomicMapping::ground_excited(2);
    return evaluate_leggett_garg(measured, no_middle, options);
}

std::vector<TlsSweepRow> tls_theta_sweep(double beta, const TlsSpectra& spectra, std::span<const double> theta_grid,
                                         double alpha, double beta_angle, EntropyBase base, std::size_t threads) {
    std::vector<TlsSweepRow> rows(theta_grid.size());
    parallel_for(theta_grid.size(), threads, [&](std::size_t i) {
        const TlsAngles angles{alpha, beta_angle, theta_grid[i]};
        const auto fine = tls_leggett_garg(beta, spectra, angles, WorkView::FineGrained, base);
        const auto grouped = tls_leggett_garg(beta, spectra, angles, WorkView::ValueGrouped, base);
        rows[i] = TlsSweepRow{theta_grid[i], *fine.k_cor, *fine.k_cor_flipped, fine.k_en, grouped.k_en};
    });
    return rows;
}

}  // namespace workreal
