#pragma once

// Finite-dimensional spectra, diagonal states and propagators between
// instantaneous eigenbases. Measurement projectors are never materialized:
// an outcome is an index into an EnergySpectrum.

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "workreal/errors.hpp"

namespace workreal {

/// Inverse temperature meaning "ground state" for build_thermal_state.
inline constexpr double kGroundState = std::numeric_limits<double>::infinity();

/// Ordered eigenvalues of H at one measurement time (hbar = 1).
class EnergySpectrum {
public:
    EnergySpectrum(std::vector<double> levels, int time_index = 0);

    std::size_t size() const noexcept { return levels_.size(); }
    double operator[](std::size_t k) const { return levels_[k]; }
    std::span<const double> levels() const noexcept { return levels_; }
    int time_index() const noexcept { return time_index_; }

    /// Same levels, rigidly shifted by c.
    EnergySpectrum shifted(double c) const;

    /// E_k = k + 1/2 for k = 0..n_max (oscillator in units of hbar*omega).
    static EnergySpectrum harmonic(std::size_t n_max, int time_index = 0);
    /// Two levels {0, gap}.
    static EnergySpectrum two_level(double gap = 1.0, int time_index = 0);

private:
    std::vector<double> levels_;
    int time_index_;
};

/// Populations of an initial state diagonal in an EnergySpectrum.
class DiagonalDensity {
public:
    /// Validates non-negativity and normalization (1e-12).
    explicit DiagonalDensity(std::vector<double> populations,
                             std::optional<double> beta = std::nullopt);

    std::size_t size() const noexcept { return populations_.size(); }
    double operator[](std::size_t k) const { return populations_[k]; }
    std::span<const double> populations() const noexcept { return populations_; }
    std::optional<double> beta() const noexcept { return beta_; }
    bool is_thermal() const noexcept { return beta_.has_value(); }

    static DiagonalDensity uniform(std::size_t dim);

private:
    std::vector<double> populations_;
    std::optional<double> beta_;
};

/// Unitary between the eigenbasis at an earlier time (columns) and the
/// eigenbasis at a later time (rows).
///
/// A propagator may declare a trusted column band: truncated Fock-space
/// matrices are only unitary to within a budget on their leading columns.
class UnitaryPropagator {
public:
    static constexpr double kDefaultTolerance = 1e-10;

    /// Full-matrix unitarity check against `tolerance`.
    explicit UnitaryPropagator(Eigen::MatrixXcd matrix, double tolerance = kDefaultTolerance);

    /// Unitarity is enforced only on columns [0, trusted_columns) with
    /// `budget` as tolerance.
    static UnitaryPropagator truncated(Eigen::MatrixXcd matrix, std::size_t trusted_columns,
                                       double budget);

    static UnitaryPropagator identity(std::size_t dim);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    std::complex<double> operator()(std::size_t row, std::size_t col) const {
        return matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }
    /// |U_{row,col}|^2 for every entry.
    Eigen::MatrixXd transition_probabilities() const { return matrix_.cwiseAbs2(); }

    std::size_t trusted_columns() const noexcept { return trusted_columns_; }
    double tolerance() const noexcept { return tolerance_; }
    /// Deviation measured at construction over the trusted band.
    double unitarity_defect() const noexcept { return defect_; }

private:
    static constexpr std::size_t kAllColumns = std::numeric_limits<std::size_t>::max();
    UnitaryPropagator(Eigen::MatrixXcd matrix, std::size_t trusted, double tolerance, bool);

    Eigen::MatrixXcd matrix_;
    std::size_t trusted_columns_;
    double tolerance_;
    double defect_;
};

struct ThermodynamicPotentials {
    double partition_function;  ///< may overflow for |beta * E_min| > ~700; use the log
    double log_partition_function;
    double free_energy;  ///< F = -ln(Z)/beta
};

struct UnitarityReport {
    double max_deviation = 0.0;      ///< max_{mn} |(U^dagger U - I)_{mn}|
    std::size_t worst_column = 0;    ///< column whose norm defect is largest
    bool within_tolerance = true;
};

/// p_k = exp(-beta E_k)/Z, shifted by E_min before exponentiating.
/// beta == kGroundState puts all weight on the lowest level(s).
DiagonalDensity build_thermal_state(const EnergySpectrum& spectrum, double beta);

ThermodynamicPotentials thermodynamic_potentials(const EnergySpectrum& spectrum, double beta);

/// u21 * u10, i.e. evolution t0 -> t2 without looking at t1.
UnitaryPropagator compose_propagators(const UnitaryPropagator& u10, const UnitaryPropagator& u21);

/// Checks U^dagger U = I over all columns, or over the first `columns` ones.
UnitarityReport validate_unitary(const Eigen::MatrixXcd& u, double tolerance,
                                 std::optional<std::size_t> columns = std::nullopt);
UnitarityReport validate_unitary(const UnitaryPropagator& u, double tolerance);

/// Per-column |1 - sum_m |U_{mn}|^2|.
std::vector<double> column_norm_defects(const Eigen::MatrixXcd& u);

}  // namespace workreal
