#pragma once

// Harmonic oscillator driven by squeezing transformations between energy
// measurements (hbar * omega = 1, E_k = k + 1/2 at every measurement time).

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "workreal/entropy.hpp"
#include "workreal/leggett_garg.hpp"
#include "workreal/squeeze.hpp"
#include "workreal/tpm.hpp"

namespace workreal {

struct TruncationPolicy {
    double thermal_tail = 1e-12;     ///< max thermal weight above n_max
    double support_mass = 1e-10;     ///< columns carrying 1 - support_mass of the state
    double column_defect = 1e-10;    ///< max unitarity defect on those columns
    double max_budget = 1e-9;        ///< reject results leaking more than this
    std::size_t granularity = 16;    ///< n_max + 1 is rounded up to a multiple
    std::size_t max_n = 4095;
};

struct OscillatorTruncation {
    std::size_t n_max = 0;
    std::size_t support_columns = 0;
    double thermal_tail_mass = 0.0;
};

/// Thermal weight of levels above n_max, exp(-beta (n_max + 1)).
double oscillator_thermal_tail(double beta, std::size_t n_max);

/// Smallest n_max (rounded per policy) such that the thermal tail is below
/// policy.thermal_tail and every column of G(r_max) inside the thermal
/// support leaks less than policy.column_defect.
OscillatorTruncation select_truncation(double beta, double r_max, const TruncationPolicy& policy = {});

struct OscillatorJoints {
    JointDistribution3 measured;   ///< t0, t1, t2 all measured
    JointDistribution no_middle;   ///< G(r1 + r2) from t0 to t2
    OscillatorTruncation truncation;
    /// Largest probability mass missing from any of the joints, plus the thermal
    /// tail and a rounding allowance for the cell sums.
    double budget = 0.0;
};

/// p(k2,k1,k0) = G^2_{k2 k1}(r2) G^2_{k1 k0}(r1) rho_{k0}; the unmeasured
/// branch uses G(r1 + r2), since phi = 0 squeezes compose additively.
/// n_max = 0 selects the truncation automatically. Throws TruncationError
/// when the budget exceeds policy.max_budget.
OscillatorJoints oscillator_three_time(double beta, double r1, double r2, std::size_t n_max = 0,
                                       SqueezeMatrixCache* cache = nullptr, const TruncationPolicy& policy = {});

struct OscillatorOptions {
    WorkView view = WorkView::FineGrained;
    EntropyBase base = EntropyBase::Natural;
    std::size_t n_max = 0;  ///< 0 = automatic per evaluation
    std::size_t threads = 1;
    TruncationPolicy policy;
};

struct OscillatorPoint {
    double k_en = 0.0;
    double k_en_weak = 0.0;
    std::size_t n_max = 0;
    double budget = 0.0;
};

OscillatorPoint oscillator_k_en(double beta, double r1, double r2, const OscillatorOptions& options,
                                SqueezeMatrixCache* cache = nullptr);

struct ContourPoint {
    double r1;
    double r2;
};

struct SqueezeGrid {
    double beta = 0.0;
    std::vector<double> r1;
    std::vector<double> r2;
    Eigen::MatrixXd k_en;  ///< rows follow r1, columns r2
    std::size_t n_max = 0;
    double budget = 0.0;
    bool extended = false;  ///< grid was widened to bracket the sign change
};

/// K3_en on the rectangular (r1, r2) grid. With `auto_extend`, both axes are
/// stretched (up to 3 doublings) until K3_en on the last diagonal cell is
/// positive.
SqueezeGrid squeeze_grid_sweep(double beta, std::span<const double> r1_grid, std::span<const double> r2_grid,
                               const OscillatorOptions& options, bool auto_extend = false);

/// Points where K3_en crosses `level`, linearly interpolated along grid edges.
std::vector<ContourPoint> contour_points(const SqueezeGrid& grid, double level);

struct BetaSweepRow {
    double beta = 0.0;
    double min_k_en = 0.0;
    double argmin_r = 0.0;
    std::size_t n_max = 0;
    double budget = 0.0;
    std::size_t evaluations = 0;
};

struct BetaSweep {
    std::vector<BetaSweepRow> rows;
    /// |min K| at the largest beta is smaller than at the smallest beta.
    bool depth_shrinks_with_beta = false;
    /// Index of an interior local maximum of argmin_r, if any.
    std::optional<std::size_t> argmin_peak;
};

/// Default scan for the r1 = r2 line: geometric from 0.002 to 1.6.
std::vector<double> default_beta_sweep_r_grid();

/// Along r1 = r2 = r: coarse scan over `r_grid` (stopping once K3_en has
/// risen on two consecutive points or turned positive past the minimum),
/// then golden-section refinement of the minimum to `r_tolerance`.
BetaSweep beta_sweep_min_k(std::span<const double> beta_grid, std::span<const double> r_grid,
                           const OscillatorOptions& options, double r_tolerance = 1e-4);

/// Golden-section search for a minimum of f on [lo, hi].
struct GoldenResult {
    double x;
    double fx;
    std::size_t evaluations;
};
GoldenResult golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                     double tolerance);

}  // namespace workreal
