#pragma once

// Driven two-level system: the propagator between adiabatic bases is an
// SU(2) matrix fixed by a mixing angle theta and two phases.

#include <cstddef>
#include <span>
#include <vector>

#include "workreal/hilbert.hpp"
#include "workreal/leggett_garg.hpp"

namespace workreal {

struct TlsAngles {
    double alpha = 0.0;
    double beta_angle = 0.0;
    double theta = 0.0;

    /// Validates finiteness and maps theta into [0, 2*pi).
    TlsAngles canonical() const;
};

/// [[ e^{i(a+b)/2} cos(t/2),  e^{i(a-b)/2} sin(t/2)],
///  [-e^{-i(a-b)/2} sin(t/2), e^{-i(a+b)/2} cos(t/2)]]
/// With alpha = beta = 0 this is the real rotation by theta/2.
UnitaryPropagator tls_propagator(const TlsAngles& angles);

/// Spectra at the three measurement times.
struct TlsSpectra {
    EnergySpectrum t0;
    EnergySpectrum t1;
    EnergySpectrum t2;

    /// {0, gap} at every time (work values in {-gap, 0, gap}).
    static TlsSpectra equal(double gap = 1.0);
    /// {0,1}, {0,sqrt 2}, {0,sqrt 3}: no two index pairs share a work value.
    static TlsSpectra incommensurate();
};

struct TlsSweepRow {
    double theta = 0.0;
    double k_cor = 0.0;
    double k_cor_flipped = 0.0;
    double k_en_fine = 0.0;
    double k_en_grouped = 0.0;
};

inline constexpr std::size_t kDefaultThetaPoints = 721;

/// `points` equally spaced angles covering [0, 2*pi] inclusive.
std::vector<double> default_theta_grid(std::size_t points = kDefaultThetaPoints);

/// Thermal start at `beta`, u21 = u10 = tls_propagator(theta, phases).
LeggettGargResult tls_leggett_garg(double beta, const TlsSpectra& spectra, const TlsAngles& angles,
                                   WorkView view = WorkView::FineGrained, EntropyBase base = EntropyBase::Natural);

/// One row per grid angle, in grid order.
std::vector<TlsSweepRow> tls_theta_sweep(double beta, const TlsSpectra& spectra, std::span<const double> theta_grid,
                                         double alpha = 0.0, double beta_angle = 0.0,
                                         EntropyBase base = EntropyBase::Natural, std::size_t threads = 1);

}  // namespace workreal
